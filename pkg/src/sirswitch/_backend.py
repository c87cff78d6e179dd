"""Kernel backend selection.

SIRSWITCH_BACKEND=numba (default) wraps the kernels in _kernels.py with
numba.njit; SIRSWITCH_BACKEND=python runs them as-is. Both sets stay
importable in one process (get_kernels) so tests and benchmarks can compare
them directly. The kernels avoid fastmath and transcendentals (stay_sweep's
exp aside), so the two backends agree bit for bit on the polynomial kernels.
"""

from __future__ import annotations

import os
import warnings
from types import SimpleNamespace

from . import _kernels as _py

KERNEL_NAMES = ("rk4_span", "integrate_schedule", "flow_marks", "expand_cloud", "stay_sweep")

_python_ns = SimpleNamespace(
    name="python", **{name: getattr(_py, name) for name in KERNEL_NAMES}
)
_numba_ns: SimpleNamespace | None = None


def _build_numba() -> SimpleNamespace:
    global _numba_ns
    if _numba_ns is None:
        import numba

        wrapped = {
            name: numba.njit(cache=True, nogil=True)(getattr(_py, name))
            for name in KERNEL_NAMES
        }
        _numba_ns = SimpleNamespace(name="numba", **wrapped)
    return _numba_ns


def get_kernels(backend: str) -> SimpleNamespace:
    """Kernel namespace for an explicit backend ('numba' or 'python')."""
    if backend == "python":
        return _python_ns
    if backend == "numba":
        return _build_numba()
    raise ValueError(f"unknown backend {backend!r}, expected 'numba' or 'python'")


def _select_default() -> SimpleNamespace:
    requested = os.environ.get("SIRSWITCH_BACKEND", "numba").strip().lower()
    if requested not in ("numba", "python"):
        raise RuntimeError(
            f"SIRSWITCH_BACKEND={requested!r} is not valid; use 'numba' or 'python'"
        )
    if requested == "python":
        return _python_ns
    try:
        return _build_numba()
    except ImportError:
        warnings.warn(
            "numba is unavailable; falling back to the pure Python kernels "
            "(set SIRSWITCH_BACKEND=python to silence this warning)",
            RuntimeWarning,
            stacklevel=2,
        )
        return _python_ns


kernels = _select_default()


def active_backend() -> str:
    return kernels.name
