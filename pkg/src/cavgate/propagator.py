"""Propagation of states under a time-independent non-Hermitian generator.

The generator never changes during a run, so instead of generic ODE
stepping a single one-step transfer matrix exp(G*dt) is computed once and
applied repeatedly.  For the slow six-level gates this avoids roughly three
orders of magnitude of matrix work compared to explicit stepping at the
fastest system time scale.

The matrix exponential is evaluated by scaling and squaring with a
diagonal Pade core whose degree and scaling are chosen from the requested
truncation tolerance (achievable accuracy floors at roundoff level).  A
plan validates its one-step matrix against a second evaluation at tighter
tolerance and finer scaling before any stepping happens.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from . import _kernels
from .hilbert import ConditionalGenerator, StateVector

__all__ = [
    "DEFAULT_EPS",
    "DEFAULT_OUTPUTS",
    "expm",
    "PropagatorPlan",
    "plan",
    "propagate",
    "no_photon_probability",
    "output_times",
]

DEFAULT_EPS = 1e-9
DEFAULT_OUTPUTS = 500

# maximum total step count a plan may request before giving up on refinement
_MAX_TOTAL_STEPS = 2 ** 22

# diagonal Pade coefficients, indexed by degree
_PADE_COEFFS = {
    3: (120.0, 60.0, 12.0, 1.0),
    5: (30240.0, 15120.0, 3360.0, 420.0, 30.0, 1.0),
    7: (17297280.0, 8648640.0, 1995840.0, 277200.0, 25200.0, 1512.0, 56.0, 1.0),
    9: (17643225600.0, 8821612800.0, 2075673600.0, 302702400.0, 30270240.0,
        2162160.0, 110880.0, 3960.0, 90.0, 1.0),
    13: (64764752532480000.0, 32382376266240000.0, 7771770303897600.0,
         1187353796428800.0, 129060195264000.0, 10559470521600.0,
         670442572800.0, 33522128640.0, 1323241920.0, 40840800.0,
         960960.0, 16380.0, 182.0, 1.0),
}

# truncation constant 8 (m!)^2 / ((2m)! (2m+1)!): for a scaled norm
# theta <= 1/2 the degree-m approximant has relative truncation error
# below _TRUNC_CONST[m] * theta**(2m+1)
_TRUNC_CONST = {
    m: 8.0 * math.factorial(m) ** 2
    / (math.factorial(2 * m) * math.factorial(2 * m + 1))
    for m in _PADE_COEFFS
}


def _theta_max(m: int, tol: float) -> float:
    return min(0.5, (tol / _TRUNC_CONST[m]) ** (1.0 / (2 * m + 1)))


def _pade_uv(a: np.ndarray, m: int) -> tuple:
    """U (odd part) and V (even part) of the degree-m Pade approximant."""
    b = _PADE_COEFFS[m]
    n = a.shape[0]
    ident = np.eye(n, dtype=np.complex128)
    a2 = a @ a
    if m == 13:
        a4 = a2 @ a2
        a6 = a2 @ a4
        u = a @ (a6 @ (b[13] * a6 + b[11] * a4 + b[9] * a2)
                 + b[7] * a6 + b[5] * a4 + b[3] * a2 + b[1] * ident)
        v = (a6 @ (b[12] * a6 + b[10] * a4 + b[8] * a2)
             + b[6] * a6 + b[4] * a4 + b[2] * a2 + b[0] * ident)
        return u, v
    pows = [ident, a2]
    for _ in range((m - 1) // 2 - 1):
        pows.append(pows[-1] @ a2)
    u = b[1] * ident
    v = b[0] * ident
    for k, p in enumerate(pows[1:], start=1):
        u = u + b[2 * k + 1] * p
        v = v + b[2 * k] * p
    return a @ u, v


def expm(a: np.ndarray, tol: float = 1e-12, extra_squarings: int = 0) -> np.ndarray:
    """Matrix exponential by scaling and squaring with a Pade core.

    Uses the smallest degree whose series-truncation bound meets ``tol``
    without scaling, else degree 13 with the fewest halvings that do.
    ``extra_squarings`` forces additional halvings and is used to build
    independent reference evaluations of the same exponential.
    """
    a = np.asarray(a, dtype=np.complex128)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise ValueError(f"expected a square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise ValueError("matrix contains non-finite entries")
    if not (tol > 0.0):
        raise ValueError("tol must be positive")
    norm = float(np.linalg.norm(a, 1))
    if norm == 0.0:
        return np.eye(a.shape[0], dtype=np.complex128)

    # smallest degree that needs no scaling, else degree 13 with the fewest
    # halvings (minimizing squarings limits roundoff amplification)
    m, s = 13, 0
    for deg in sorted(_PADE_COEFFS):
        if norm <= _theta_max(deg, tol):
            m = deg
            break
    else:
        s = max(0, math.ceil(math.log2(norm / _theta_max(13, tol))))
    s += int(extra_squarings)

    scaled = a / (2.0 ** s) if s else a
    u, v = _pade_uv(scaled, m)
    f = np.linalg.solve(v - u, v + u)
    for _ in range(s):
        f = f @ f
    return f


@dataclass(frozen=True)
class PropagatorPlan:
    """Validated stepping schedule for one generator.

    Immutable and shareable; independent propagate calls may run
    concurrently on the same plan.
    """

    generator: ConditionalGenerator
    t_total: float
    n_outputs: int
    n_sub: int
    dt: float
    step_matrix: np.ndarray
    eps: float

    @property
    def total_steps(self) -> int:
        return self.n_outputs * self.n_sub


def plan(generator: ConditionalGenerator, t_total: float,
         n_outputs: int = DEFAULT_OUTPUTS, eps: float = DEFAULT_EPS,
         min_substeps: int = 1) -> PropagatorPlan:
    """Choose a step size and precompute the one-step transfer matrix.

    The step is dt = t_total / (n_outputs * m).  The sub-step count m
    (starting from ``min_substeps``) is doubled until the one-step matrix
    agrees with a reference evaluation at tolerance eps/100 and one extra
    halving to within eps in relative Frobenius norm.
    """
    g = generator.matrix
    if not np.all(np.isfinite(g)):
        raise ValueError("generator contains non-finite entries")
    if not (t_total > 0.0) or not math.isfinite(t_total):
        raise ValueError(f"t_total must be positive and finite, got {t_total!r}")
    if n_outputs < 1:
        raise ValueError("n_outputs must be >= 1")
    if min_substeps < 1:
        raise ValueError("min_substeps must be >= 1")

    m = int(min_substeps)
    while True:
        dt = t_total / (n_outputs * m)
        step = expm(g * dt, tol=eps / 10.0)
        ref = expm(g * dt, tol=eps / 100.0, extra_squarings=1)
        err = np.linalg.norm(step - ref) / np.linalg.norm(ref)
        if err <= eps:
            return PropagatorPlan(
                generator=generator, t_total=float(t_total),
                n_outputs=int(n_outputs), n_sub=m, dt=dt,
                step_matrix=step, eps=float(eps),
            )
        if n_outputs * m * 2 > _MAX_TOTAL_STEPS:
            raise ArithmeticError(
                f"one-step accuracy {err:.3e} > eps={eps:.3e} not reachable "
                f"within {_MAX_TOTAL_STEPS} total steps"
            )
        m *= 2


def _grid_steps(p: PropagatorPlan, t_grid) -> np.ndarray:
    """Map output times to cumulative step counts on the plan grid."""
    ts = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if ts.ndim != 1 or ts.size == 0:
        raise ValueError("t_grid must be a non-empty 1-d sequence of times")
    if np.any(np.diff(ts) < 0.0):
        raise ValueError("t_grid must be non-decreasing")
    if ts[0] < -1e-12 or ts[-1] > p.t_total * (1.0 + 1e-12):
        raise ValueError(
            f"t_grid must lie within [0, t_total={p.t_total!r}], "
            f"got range [{ts[0]!r}, {ts[-1]!r}]"
        )
    ks = np.rint(ts / p.dt).astype(np.int64)
    misfit = np.abs(ts - ks * p.dt)
    bad = misfit > 1e-6 * max(p.dt, 1e-300)
    if np.any(bad):
        t_bad = ts[bad][0]
        raise ValueError(
            f"time {t_bad!r} is not a multiple of the plan step dt={p.dt!r}; "
            "use output_times(plan) or pass min_substeps to refine the grid"
        )
    return ks


def propagate(p: PropagatorPlan, state0: StateVector, t_grid) -> list:
    """Conditioned (unnormalized) states at the requested grid times.

    Squared norms of the returned states are the no-photon probabilities.
    Grid times must be multiples of the plan step, in increasing order,
    within [0, t_total].
    """
    if state0.basis != p.generator.basis:
        raise ValueError("state basis does not match the generator basis")
    ks = _grid_steps(p, t_grid)
    counts = np.diff(np.concatenate(([0], ks)))
    traj = _kernels.apply_steps(p.step_matrix, state0.amplitudes, counts)
    return [StateVector(state0.basis, traj[i]) for i in range(len(ks))]


def no_photon_probability(p: PropagatorPlan, state0: StateVector, t: float) -> float:
    """Probability that no photon was emitted up to time t."""
    return propagate(p, state0, [t])[0].squared_norm()


def output_times(p: PropagatorPlan) -> np.ndarray:
    """The n_outputs + 1 evenly spaced times from 0 to t_total."""
    return np.arange(p.n_outputs + 1) * (p.n_sub * p.dt)
