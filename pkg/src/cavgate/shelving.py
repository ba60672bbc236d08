"""Three-level electron-shelving model with a macroscopic dark period.

A metastable state A is weakly driven to B (Rabi frequency omega_w) while
B is strongly driven to a rapidly decaying state C (omega_s, decay
gamma_s).  Without the strong drive the atom moves to B within pi/omega_w;
with it, the A population is shelved and survives for roughly
T_dark = omega_s^2 / (omega_w^2 gamma_s), which is the same interplay of a
weak drive with a strongly monitored complement that powers the cavity
gate schemes.  Both drives are taken resonant.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hilbert import Basis, ConditionalGenerator, build_basis
from .regime import (
    DEFAULT_THRESHOLD,
    RegimeReport,
    RegimeWarning,
    ratio_check,
)

__all__ = [
    "ShelvingParams",
    "build_generator_shelving",
    "dark_time",
    "survival_probability",
    "fit_dark_time",
    "validate_regime_shelving",
]


@dataclass(frozen=True)
class ShelvingParams:
    """Weak drive, strong drive and upper-level decay rate, in units of g."""

    omega_w: float
    omega_s: float
    gamma_s: float

    def __post_init__(self):
        for name in ("omega_w", "omega_s", "gamma_s"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be a finite non-negative rate, got {v!r}")
            object.__setattr__(self, name, v)


def build_generator_shelving(params: ShelvingParams, basis: Basis | None = None) -> ConditionalGenerator:
    """3x3 no-emission generator G = -i H over the states A, B, C."""
    if basis is None:
        basis = build_basis("shelving", 0)
    basis.require_scheme("shelving")
    h = np.array(
        [
            [0.0, params.omega_w / 2.0, 0.0],
            [params.omega_w / 2.0, 0.0, params.omega_s / 2.0],
            [0.0, params.omega_s / 2.0, -0.5j * params.gamma_s],
        ],
        dtype=np.complex128,
    )
    return ConditionalGenerator(basis, -1j * h)


def dark_time(params: ShelvingParams) -> float:
    """Order-of-magnitude estimate of the mean time to the first emission.

    T_dark = omega_s^2 / (omega_w^2 gamma_s).
    """
    if params.omega_w <= 0.0 or params.gamma_s <= 0.0:
        raise ValueError("dark time requires omega_w > 0 and gamma_s > 0")
    return params.omega_s ** 2 / (params.omega_w ** 2 * params.gamma_s)


def survival_probability(params: ShelvingParams, t_grid) -> np.ndarray:
    """No-emission probability of the initial state A at each grid time.

    Emits a RegimeWarning when the dark-period conditions
    omega_w << omega_s^2/gamma_s and omega_w << gamma_s are not met.
    """
    report = validate_regime_shelving(params)
    if not report.all_pass:
        warnings.warn(
            "shelving parameters are outside the dark-period regime; "
            "survival need not be a single exponential",
            RegimeWarning,
            stacklevel=2,
        )
    ts = np.atleast_1d(np.asarray(t_grid, dtype=float))
    if np.any(ts < 0.0):
        raise ValueError("t_grid times must be >= 0")
    from .propagator import expm

    g = build_generator_shelving(params).matrix
    psi0 = np.array([1.0, 0.0, 0.0], dtype=np.complex128)
    out = np.empty(ts.shape, dtype=float)
    for i, t in enumerate(ts):
        v = expm(g * t) @ psi0
        out[i] = float(np.vdot(v, v).real)
    return out


def fit_dark_time(params: ShelvingParams, n_points: int = 200) -> float:
    """Dark time from a single-exponential fit of the survival decay.

    The fit window is [T_dark/10, 2 T_dark] around the analytic estimate;
    the returned value is -1/slope of a least-squares line through
    log P0(t).
    """
    td = dark_time(params)
    ts = np.linspace(td / 10.0, 2.0 * td, n_points)
    p0 = survival_probability(params, ts)
    if np.any(p0 <= 0.0):
        raise ArithmeticError("survival vanished inside the fit window")
    design = np.column_stack([ts, np.ones_like(ts)])
    slope, _ = np.linalg.lstsq(design, np.log(p0), rcond=None)[0]
    if slope >= 0.0:
        raise ArithmeticError("survival did not decay over the fit window")
    return float(-1.0 / slope)


def validate_regime_shelving(params: ShelvingParams,
                             threshold: float = DEFAULT_THRESHOLD) -> RegimeReport:
    """Advisory report on omega_w << omega_s^2/gamma_s and omega_w << gamma_s."""
    checks = []
    if params.gamma_s <= 0.0 or params.omega_s <= 0.0:
        checks.append(ratio_check(
            "omega_w_much_less_than_omega_s2_over_gamma_s",
            params.omega_w, 0.0, threshold, hard_denominator=True,
            note="omega_s and gamma_s must be positive"))
    else:
        checks.append(ratio_check(
            "omega_w_much_less_than_omega_s2_over_gamma_s",
            params.omega_w * params.gamma_s, params.omega_s ** 2, threshold))
    checks.append(ratio_check(
        "omega_w_much_less_than_gamma_s",
        params.omega_w, params.gamma_s, threshold, hard_denominator=True))
    return RegimeReport(scheme="shelving", checks=tuple(checks))
