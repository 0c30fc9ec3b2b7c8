import json
import subprocess
import sys

import pytest

from twinsum.accumulate import Schedule, run
from twinsum.cli import main
from twinsum.state import checkpoint_csv_text, load_state, read_checkpoint_csv

from conftest import PUBLISHED_MEANS_CSV


def invoke(*argv) -> int:
    return main([str(a) for a in argv])


def test_run_writes_csv_and_state(tmp_path, capsys):
    csv_path = tmp_path / "cp.csv"
    state_path = tmp_path / "s.json"
    rc = invoke(
        "run", "--start-exp", 10, "--end-exp", 12,
        "--state", state_path, "--output", csv_path,
    )
    assert rc == 0
    out = capsys.readouterr().out
    assert "N=2^10=1024" in out and "N=2^12=4096" in out
    library = run(Schedule(10, 12))
    assert csv_path.read_text() == checkpoint_csv_text(library)
    state = load_state(str(state_path))
    assert state.next_exponent == 13


def test_run_to_22_reproduces_first_published_row(tmp_path, capsys):
    csv_path = tmp_path / "cp.csv"
    rc = invoke("run", "--start-exp", 22, "--end-exp", 22,
                "--state", tmp_path / "s.json", "--output", csv_path)
    assert rc == 0
    rows = read_checkpoint_csv(str(csv_path))
    assert len(rows) == 1
    assert rows[0].n == 2**22
    assert rows[0].mean == pytest.approx(1.330875543, rel=1e-8)
    assert rows[0].ratio == pytest.approx(1.00799191245, rel=1e-8)


def test_run_rejects_reversed_exponents(tmp_path):
    with pytest.raises(SystemExit) as exc:
        invoke("run", "--start-exp", 14, "--end-exp", 12, "--output", tmp_path / "x.csv")
    assert exc.value.code == 2


def test_run_rejects_out_of_range_exponents(tmp_path):
    with pytest.raises(SystemExit):
        invoke("run", "--start-exp", 5, "--end-exp", 12, "--output", tmp_path / "x.csv")
    with pytest.raises(SystemExit):
        invoke("run", "--start-exp", 10, "--end-exp", 64, "--output", tmp_path / "x.csv")
    with pytest.raises(SystemExit):
        invoke("run", "--start-exp", 10, "--end-exp", 12, "--workers", 0,
               "--output", tmp_path / "x.csv")


def test_worker_count_gives_identical_bytes(tmp_path):
    outputs = []
    for w in (1, 2, 8):
        csv_path = tmp_path / f"cp{w}.csv"
        rc = invoke(
            "run", "--start-exp", 10, "--end-exp", 16, "--workers", w,
            "--state", tmp_path / f"s{w}.json", "--output", csv_path,
        )
        assert rc == 0
        outputs.append(csv_path.read_bytes())
    assert outputs[0] == outputs[1] == outputs[2]


def test_resume_extends_bit_identically(tmp_path):
    direct_csv = tmp_path / "direct.csv"
    invoke("run", "--start-exp", 10, "--end-exp", 14,
           "--state", tmp_path / "d.json", "--output", direct_csv)

    split_csv = tmp_path / "split.csv"
    state_path = tmp_path / "s.json"
    invoke("run", "--start-exp", 10, "--end-exp", 12,
           "--state", state_path, "--output", split_csv)
    rc = invoke("resume", "--state", state_path, "--end-exp", 14, "--output", split_csv)
    assert rc == 0
    assert split_csv.read_bytes() == direct_csv.read_bytes()


def test_resume_with_mismatched_segment_size_is_refused(tmp_path, capsys):
    state_path = tmp_path / "s.json"
    invoke("run", "--start-exp", 10, "--end-exp", 11,
           "--state", state_path, "--output", tmp_path / "cp.csv")
    rc = invoke("resume", "--state", state_path, "--segment-size", 4096,
                "--end-exp", 12, "--output", tmp_path / "cp.csv")
    assert rc == 1
    assert "refusing" in capsys.readouterr().err


def test_resume_rejects_tampered_state(tmp_path, capsys):
    state_path = tmp_path / "s.json"
    invoke("run", "--start-exp", 10, "--end-exp", 11,
           "--state", state_path, "--output", tmp_path / "cp.csv")
    doc = json.loads(state_path.read_text())
    doc["payload"]["next_lo"] += 2
    state_path.write_text(json.dumps(doc))
    rc = invoke("resume", "--state", state_path, "--end-exp", 12,
                "--output", tmp_path / "cp.csv")
    assert rc == 1
    assert "checksum" in capsys.readouterr().err


def test_resume_complete_schedule_reports_and_rewrites(tmp_path, capsys):
    state_path = tmp_path / "s.json"
    csv_path = tmp_path / "cp.csv"
    invoke("run", "--start-exp", 10, "--end-exp", 11,
           "--state", state_path, "--output", csv_path)
    before = csv_path.read_bytes()
    rc = invoke("resume", "--state", state_path, "--output", csv_path)
    assert rc == 0
    assert "nothing to resume" in capsys.readouterr().out
    assert csv_path.read_bytes() == before


def test_resume_cannot_discard_emitted_checkpoints(tmp_path):
    state_path = tmp_path / "s.json"
    invoke("run", "--start-exp", 10, "--end-exp", 13,
           "--state", state_path, "--output", tmp_path / "cp.csv")
    with pytest.raises(SystemExit):
        invoke("resume", "--state", state_path, "--end-exp", 12,
               "--output", tmp_path / "cp.csv")


def test_default_state_dir_env(tmp_path, monkeypatch):
    monkeypatch.setenv("TWINSUM_STATE_DIR", str(tmp_path))
    invoke("run", "--start-exp", 10, "--end-exp", 10, "--output", tmp_path / "cp.csv")
    assert (tmp_path / "twinsum-state.json").exists()


def test_c2_json(tmp_path, capsys):
    rc = invoke("c2", "--prime-limit", "1e5")
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["prime_limit"] == 100_000
    assert 1.0 < payload["value"] < 2.0
    assert 0 < payload["tail_bound"] < 1e-3


def test_c2_output_file(tmp_path):
    out = tmp_path / "c2.json"
    rc = invoke("c2", "--prime-limit", 1000, "--output", out)
    assert rc == 0
    assert json.loads(out.read_text())["prime_limit"] == 1000


def test_c2_rejects_bad_limit():
    with pytest.raises(SystemExit):
        invoke("c2", "--prime-limit", 2)
    with pytest.raises(SystemExit):
        invoke("c2", "--prime-limit", "1.5e2x")


def test_brun_json(capsys):
    rc = invoke("brun", "--max", 13)
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["partial"] == pytest.approx(float(15676) / 15015, rel=1e-12)
    assert payload["extrapolated"] > payload["partial"]


def test_brun_with_computed_constant(capsys):
    rc = invoke("brun", "--max", 1000, "--prime-limit", "1e5")
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["tail_c2"] == pytest.approx(0.6601618158468696, abs=1e-6)


def test_fit_full_window(capsys):
    rc = invoke("fit", "--input", PUBLISHED_MEANS_CSV)
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert abs(payload["intercept"] - 1.3200385787619) < 1e-6
    assert payload["n_points"] == 19
    assert payload["window"] is None


def test_fit_windowed(capsys):
    rc = invoke("fit", "--input", PUBLISHED_MEANS_CSV, "--window", "32:40")
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert abs(payload["intercept"] - 1.3203501777) < 1e-6
    assert payload["window"] == [32, 40]


def test_fit_bad_window_exits_with_usage_error():
    with pytest.raises(SystemExit) as exc:
        invoke("fit", "--input", PUBLISHED_MEANS_CSV, "--window", "45:50")
    assert exc.value.code == 2
    with pytest.raises(SystemExit):
        invoke("fit", "--input", PUBLISHED_MEANS_CSV, "--window", "oops")


def test_fit_missing_input_fails_cleanly(tmp_path, capsys):
    rc = invoke("fit", "--input", tmp_path / "absent.csv")
    assert rc == 1
    assert "error" in capsys.readouterr().err


def test_plot_table(capsys):
    rc = invoke("plot", "--input", PUBLISHED_MEANS_CSV, "--window", "32:40")
    assert rc == 0
    out = capsys.readouterr().out
    lines = out.splitlines()
    assert lines[0].startswith("# intercept = 1.32035")
    assert len([l for l in lines if "\t" in l and not l.startswith("#")]) == 20  # header + 19


def test_plot_no_fit(capsys):
    rc = invoke("plot", "--input", PUBLISHED_MEANS_CSV, "--no-fit")
    assert rc == 0
    lines = capsys.readouterr().out.splitlines()
    assert lines[0] == "inv_n\tmean"
    assert len(lines) == 20


def test_run_csv_is_fittable_end_to_end(tmp_path, capsys):
    csv_path = tmp_path / "cp.csv"
    invoke("run", "--start-exp", 10, "--end-exp", 16,
           "--state", tmp_path / "s.json", "--output", csv_path)
    capsys.readouterr()
    rc = invoke("fit", "--input", csv_path, "--window", "12:16")
    assert rc == 0
    payload = json.loads(capsys.readouterr().out)
    assert payload["n_points"] == 5
    cps = read_checkpoint_csv(str(csv_path))
    assert len(cps) == 7


def test_bench_smoke(capsys):
    rc = invoke("bench", "--start-exp", 10, "--end-exp", 13)
    assert rc == 0
    out = capsys.readouterr().out
    assert "pure" in out


def test_module_entry_point_version():
    proc = subprocess.run(
        [sys.executable, "-m", "twinsum", "--version"],
        capture_output=True,
        text=True,
    )
    assert proc.returncode == 0
    assert "twinsum" in proc.stdout
