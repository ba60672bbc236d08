"""Hot stepping kernels: repeated application of a precomputed step matrix.

Long-horizon runs apply one dense complex matrix to a state vector up to a
few million times, which is the dominant cost of a simulation.  The loop is
compiled with numba when available; set the environment variable
``CAVGATE_NO_NUMBA=1`` to force the pure-numpy fallback (the benchmark in
``benchmarks/bench_propagation.py`` compares the two paths).
"""

from __future__ import annotations

import os

import numpy as np

__all__ = ["NUMBA_AVAILABLE", "NO_NUMBA_ENV", "numba_enabled", "apply_steps"]

NO_NUMBA_ENV = "CAVGATE_NO_NUMBA"


def _apply_steps_impl(step, psi0, counts):
    """Apply ``step`` repeatedly, recording the state after each burst.

    ``counts[i]`` is the number of applications between record i-1 and
    record i (counts of zero repeat the previous state).
    """
    n_rec = counts.shape[0]
    out = np.empty((n_rec, psi0.shape[0]), dtype=np.complex128)
    cur = psi0.copy()
    for i in range(n_rec):
        for _ in range(counts[i]):
            cur = step @ cur
        out[i] = cur
    return out


_apply_steps_numpy = _apply_steps_impl

try:
    from numba import njit

    _apply_steps_numba = njit(cache=True)(_apply_steps_impl)
    NUMBA_AVAILABLE = True
except ImportError:  # pragma: no cover - numba is a declared dependency
    _apply_steps_numba = _apply_steps_impl
    NUMBA_AVAILABLE = False


def numba_enabled() -> bool:
    """True when the compiled path is active (numba importable, env not set)."""
    flag = os.environ.get(NO_NUMBA_ENV, "").strip().lower()
    return NUMBA_AVAILABLE and flag not in ("1", "true", "yes", "on")


def apply_steps(step: np.ndarray, psi0: np.ndarray, counts: np.ndarray) -> np.ndarray:
    """Dispatch to the compiled or fallback stepping loop."""
    step = np.ascontiguousarray(step, dtype=np.complex128)
    psi0 = np.ascontiguousarray(psi0, dtype=np.complex128)
    counts = np.ascontiguousarray(counts, dtype=np.int64)
    if numba_enabled():
        return _apply_steps_numba(step, psi0, counts)
    return _apply_steps_numpy(step, psi0, counts)
