"""Kernel backend selection: compiled Cython core with a pure-Python fallback.

Both backends expose the same two hot-loop functions (``sieve_odd_flags``,
``log_weighted_sum``) and are bit-for-bit interchangeable; the compiled one
is just much faster. Set TWINSUM_PURE=1 to force the fallback.
"""

from __future__ import annotations

import os
from types import ModuleType

from . import _pykernel


def _try_compiled() -> ModuleType | None:
    try:
        from . import _kernel  # noqa: PLC0415

        return _kernel
    except ImportError:
        return None


if os.environ.get("TWINSUM_PURE"):
    _default = _pykernel
    BACKEND = "pure"
else:
    _compiled = _try_compiled()
    _default = _compiled if _compiled is not None else _pykernel
    BACKEND = "compiled" if _compiled is not None else "pure"


def available_backends() -> list[str]:
    """Names of the importable kernel backends."""
    names = ["pure"]
    if _try_compiled() is not None:
        names.insert(0, "compiled")
    return names


def get_kernel(name: str | None = None) -> ModuleType:
    """Return a kernel module by name, or the default selected at import."""
    if name is None:
        return _default
    if name == "pure":
        return _pykernel
    if name == "compiled":
        compiled = _try_compiled()
        if compiled is None:
            raise ValueError("compiled kernel is not available; rebuild with Cython")
        return compiled
    raise ValueError(f"unknown backend {name!r}; expected 'compiled' or 'pure'")
