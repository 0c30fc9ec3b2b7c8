"""Closed-form least-squares fitting of checkpoint means against 1/N.

The intercept of the fitted line is the N -> infinity extrapolation of the
mean; a window restricted to large N discards the early transient.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, NamedTuple, Sequence

from .accumulate import Checkpoint


class FitError(ValueError):
    """Too few points or a degenerate regressor."""


class FitPoint(NamedTuple):
    x: float
    y: float


@dataclass(frozen=True)
class FitResult:
    intercept: float
    slope: float
    residual_rms: float
    n_points: int


def linear_fit(points: Iterable[tuple[float, float]]) -> FitResult:
    """Ordinary least squares y = intercept + slope*x, centered for stability."""
    pts = [FitPoint(float(x), float(y)) for x, y in points]
    if len(pts) < 2:
        raise FitError(f"need at least 2 points, got {len(pts)}")
    if not all(math.isfinite(p.x) and math.isfinite(p.y) for p in pts):
        raise FitError("non-finite fit input")
    n = len(pts)
    x_bar = math.fsum(p.x for p in pts) / n
    y_bar = math.fsum(p.y for p in pts) / n
    sxx = math.fsum((p.x - x_bar) ** 2 for p in pts)
    if sxx == 0.0:
        raise FitError("all x values equal; line is undetermined")
    sxy = math.fsum((p.x - x_bar) * (p.y - y_bar) for p in pts)
    slope = sxy / sxx
    intercept = y_bar - slope * x_bar
    rss = math.fsum((p.y - (intercept + slope * p.x)) ** 2 for p in pts)
    return FitResult(
        intercept=intercept,
        slope=slope,
        residual_rms=math.sqrt(rss / n),
        n_points=n,
    )


def checkpoint_points(checkpoints: Iterable[Checkpoint]) -> list[FitPoint]:
    """Checkpoints as (1/N, mean) fit points, ascending in N."""
    cps = sorted(checkpoints, key=lambda c: c.n)
    return [FitPoint(1.0 / c.n, c.mean) for c in cps]


def windowed_fit(
    checkpoints: Sequence[Checkpoint],
    k_min: int,
    k_max: int,
) -> FitResult:
    """Fit only the checkpoints with k_min <= log2(N) <= k_max."""
    if k_max < k_min:
        raise FitError(f"window out of order: [{k_min}, {k_max}]")
    selected = [c for c in checkpoints if k_min <= math.log2(c.n) <= k_max]
    if len(selected) < 2:
        raise FitError(
            f"window [{k_min}, {k_max}] selects {len(selected)} checkpoint(s); need >= 2"
        )
    return linear_fit(checkpoint_points(selected))


def emit_plot_data(
    checkpoints: Sequence[Checkpoint],
    fit: FitResult | None = None,
) -> list[tuple[float, ...]]:
    """Rows (1/N, mean[, fitted]) for a log-x plot of the checkpoint means."""
    if not checkpoints:
        raise ValueError("no checkpoints to plot")
    rows = []
    for point in checkpoint_points(checkpoints):
        if fit is None:
            rows.append((point.x, point.y))
        else:
            rows.append((point.x, point.y, fit.intercept + fit.slope * point.x))
    return rows


def plot_table_text(
    checkpoints: Sequence[Checkpoint],
    fit: FitResult | None = None,
) -> str:
    """Tab-separated plot table with the intercept as a comment annotation."""
    lines = []
    if fit is not None:
        lines.append(f"# intercept = {fit.intercept!r}")
        lines.append(f"# slope = {fit.slope!r}")
        lines.append("inv_n\tmean\tfit")
    else:
        lines.append("inv_n\tmean")
    for row in emit_plot_data(checkpoints, fit):
        lines.append("\t".join(f"{v:.12e}" for v in row))
    return "\n".join(lines) + "\n"


def fit_summary(fit: FitResult, window: tuple[int, int] | None = None) -> dict:
    """JSON-ready summary of a fit."""
    return {
        "intercept": fit.intercept,
        "slope": fit.slope,
        "residual_rms": fit.residual_rms,
        "n_points": fit.n_points,
        "window": list(window) if window is not None else None,
    }
