"""Backend selection for the sweep hot loop.

The compiled Cython kernel is used when the extension built; otherwise the
NumPy fallback takes over.  ``GRASSMANNLAB_KERNEL=numpy`` forces the
fallback, ``GRASSMANNLAB_KERNEL=compiled`` demands the extension and fails
loudly if it is missing.  Both paths compute the identical windowed
max-times correlation; ``benchmarks/bench_delta.py`` compares them.
"""

from __future__ import annotations

import os

import numpy as np

from . import _sweep_numpy

try:
    from . import _sweepkern
except ImportError:  # extension not built
    _sweepkern = None

_FORCED = os.environ.get("GRASSMANNLAB_KERNEL", "").strip().lower()
if _FORCED == "compiled" and _sweepkern is None:
    raise ImportError("GRASSMANNLAB_KERNEL=compiled but the extension is not available")
if _FORCED not in ("", "compiled", "numpy"):
    raise ValueError(f"unknown GRASSMANNLAB_KERNEL value {_FORCED!r}")

BACKEND = "compiled" if (_sweepkern is not None and _FORCED != "numpy") else "numpy"

_TABLES: dict[int, tuple[int, np.ndarray, np.ndarray, np.ndarray]] = {}


def _tables(n: int):
    tab = _TABLES.get(n)
    if tab is None:
        half = n // 4
        ct = np.cos(2.0 * np.pi * np.arange(half + 1) / n)
        ct[0] = 1.0
        ct_rev = ct[1:][::-1].copy()
        kernel_full = np.concatenate([ct_rev, ct])
        tab = (half, ct, ct_rev, kernel_full)
        _TABLES[n] = tab
    return tab


def _extend(values: np.ndarray, half: int) -> np.ndarray:
    return np.concatenate([values[-half:], values, values[:half]])


def _delta_compiled(values: np.ndarray) -> np.ndarray:
    half, ct, ct_rev, _ = _tables(values.shape[0])
    out = np.empty_like(values)
    _sweepkern.max_correlate(_extend(values, half), ct, ct_rev, out)
    return out


def _delta_numpy(values: np.ndarray) -> np.ndarray:
    half, _, _, kernel_full = _tables(values.shape[0])
    out = np.empty_like(values)
    _sweep_numpy.max_correlate(_extend(values, half), kernel_full, out)
    return out


def delta_max_correlate(values: np.ndarray) -> np.ndarray:
    """One sweep step of a nonnegative radial profile (selected backend)."""
    if BACKEND == "compiled":
        return _delta_compiled(values)
    return _delta_numpy(values)
