"""Conditional dynamics of two six-level atoms with Raman-coupled transitions.

Each transition of the three-level gate is replaced by a two-photon Raman
route through a far-detuned excited state e_j (detuning delta_j, decay
gamma_j): three strong fields omega_jj dress the j-e_j transitions of both
atoms, one weak field omega21 addresses the 2-e1 transition of atom 1,
another weak field omega20 the 2-e0 transition of atom 2, and the cavity
couples to 1-e2 with strength g.  Because the excited states are barely
populated, spontaneous emission is strongly suppressed while the reduced
dynamics reproduces the three-level gate with effective couplings

    omega_j_eff = -omega_2j * omega_jj / (2 delta_j),
    g_eff       = -g * omega_22 / (2 delta_2),

plus four light-shift terms.  Both the full 36-configuration generator and
the reduced (adiabatically eliminated) generator are provided; the reduced
one reuses the three-level machinery and serves as a cross-check.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    Basis,
    ConditionalGenerator,
    RAMAN_LEVELS,
    fock_lowering,
    ket_bra,
    lambda_symmetrization_matrix,
)
from .lambda_gate import _hamiltonian_matrix as _three_level_hamiltonian
from .regime import (
    DEFAULT_THRESHOLD,
    RegimeReport,
    equality_check,
    ratio_check,
)

__all__ = [
    "RamanParams",
    "EffectiveLambdaView",
    "build_generator_raman",
    "effective_lambda_view",
    "build_generator_effective",
    "raman_pulse_duration",
    "validate_regime_raman",
]

_LEV = {name: i for i, name in enumerate(RAMAN_LEVELS)}
_I6 = np.eye(6, dtype=np.complex128)


def _triple(value, name: str) -> tuple:
    """Broadcast a scalar to a 3-tuple of floats and validate."""
    if np.isscalar(value):
        value = (value, value, value)
    out = tuple(float(v) for v in value)
    if len(out) != 3:
        raise ValueError(f"{name} must be a scalar or a 3-tuple, got {value!r}")
    for v in out:
        if not math.isfinite(v):
            raise ValueError(f"{name} entries must be finite, got {out!r}")
    return out


@dataclass(frozen=True)
class RamanParams:
    """Rates of the six-level scheme, in units of g.

    ``delta``, ``omega_diag`` and ``gamma`` hold one entry per excited state
    (j = 0, 1, 2); scalars broadcast to all three.  Detunings must be
    positive, everything else non-negative.
    """

    g: float = 1.0
    kappa: float = 1e-3
    delta: tuple = (1000.0, 1000.0, 1000.0)
    omega_diag: tuple = (2.0, 2.0, 2.0)
    omega20: float = 0.05
    omega21: float = 0.05
    gamma: tuple = (0.0, 0.0, 0.0)

    def __post_init__(self):
        object.__setattr__(self, "delta", _triple(self.delta, "delta"))
        object.__setattr__(self, "omega_diag", _triple(self.omega_diag, "omega_diag"))
        object.__setattr__(self, "gamma", _triple(self.gamma, "gamma"))
        for name in ("g", "kappa", "omega20", "omega21"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be a finite non-negative rate, got {v!r}")
            object.__setattr__(self, name, v)
        if any(d <= 0.0 for d in self.delta):
            raise ValueError(f"detunings must be positive, got {self.delta!r}")
        if any(v < 0.0 for v in self.omega_diag) or any(v < 0.0 for v in self.gamma):
            raise ValueError("omega_diag and gamma entries must be non-negative")


@dataclass(frozen=True)
class EffectiveLambdaView:
    """Signed effective couplings and light-shift magnitudes of the reduction.

    The shifts enter the reduced Hamiltonian with a minus sign:
    ``cavity_shift`` multiplies (atoms in level 1) x (photon number),
    ``ground_shift[j]`` lowers level j of each atom, and the two
    ``weak_shift_*`` terms lower level 2 of one specific atom.
    """

    omega0_eff: float
    omega1_eff: float
    g_eff: float
    cavity_shift: float
    ground_shift: tuple
    weak_shift_atom1: float
    weak_shift_atom2: float


def effective_lambda_view(params: RamanParams) -> EffectiveLambdaView:
    """All effective rates of the adiabatic elimination, signs preserved."""
    d0, d1, d2 = params.delta
    o00, o11, o22 = params.omega_diag
    return EffectiveLambdaView(
        omega0_eff=-params.omega20 * o00 / (2.0 * d0),
        omega1_eff=-params.omega21 * o11 / (2.0 * d1),
        g_eff=-params.g * o22 / (2.0 * d2),
        cavity_shift=params.g ** 2 / d2,
        ground_shift=(o00 ** 2 / (4.0 * d0), o11 ** 2 / (4.0 * d1), o22 ** 2 / (4.0 * d2)),
        weak_shift_atom1=params.omega21 ** 2 / (4.0 * d1),
        weak_shift_atom2=params.omega20 ** 2 / (4.0 * d0),
    )


def _atom1(op: np.ndarray) -> np.ndarray:
    return np.kron(op, _I6)


def _atom2(op: np.ndarray) -> np.ndarray:
    return np.kron(_I6, op)


def build_generator_raman(params: RamanParams, basis: Basis) -> ConditionalGenerator:
    """Generator G = -i H of the full six-level no-emission dynamics.

    H carries the 1-e2 cavity coupling of each atom, the two weak drives,
    the three strong drives on both atoms, the detuning of each excited
    state, the cavity damping and the excited-state decay.
    """
    basis.require_scheme("raman")
    n_max = basis.n_max
    nf = n_max + 1
    b = fock_lowering(n_max)

    at = np.zeros((36, 36), dtype=np.complex128)
    weak = (params.omega21 / 2.0) * _atom1(ket_bra(6, _LEV["2"], _LEV["e1"]))
    weak += (params.omega20 / 2.0) * _atom2(ket_bra(6, _LEV["2"], _LEV["e0"]))
    at += weak + weak.conj().T
    for j in range(3):
        drive = ket_bra(6, _LEV[str(j)], _LEV[f"e{j}"])
        strong = (params.omega_diag[j] / 2.0) * (_atom1(drive) + _atom2(drive))
        at += strong + strong.conj().T
        proj = ket_bra(6, _LEV[f"e{j}"], _LEV[f"e{j}"])
        at += (params.delta[j] - 0.5j * params.gamma[j]) * (_atom1(proj) + _atom2(proj))

    h = np.kron(np.eye(nf, dtype=np.complex128), at)
    for emb in (_atom1, _atom2):
        t = 1j * params.g * np.kron(b, emb(ket_bra(6, _LEV["e2"], _LEV["1"])))
        h += t + t.conj().T
    h += -0.5j * params.kappa * np.kron(b.conj().T @ b, np.eye(36, dtype=np.complex128))
    return ConditionalGenerator(basis, -1j * h)


def _shift_hamiltonian(view: EffectiveLambdaView, n_max: int) -> np.ndarray:
    """Light-shift terms of the reduced model, in the symmetrized basis."""
    i3 = np.eye(3, dtype=np.complex128)
    a1 = lambda op: np.kron(op, i3)
    a2 = lambda op: np.kron(i3, op)
    sh = np.zeros((9, 9), dtype=np.complex128)
    for j in range(3):
        pj = ket_bra(3, j, j)
        sh += -view.ground_shift[j] * (a1(pj) + a2(pj))
    p2 = ket_bra(3, 2, 2)
    sh += -view.weak_shift_atom1 * a1(p2)
    sh += -view.weak_shift_atom2 * a2(p2)

    nf = n_max + 1
    b = fock_lowering(n_max)
    p1 = ket_bra(3, 1, 1)
    h = np.kron(np.eye(nf, dtype=np.complex128), sh)
    h += -view.cavity_shift * np.kron(b.conj().T @ b, a1(p1) + a2(p1))

    w = np.kron(np.eye(nf, dtype=np.complex128), lambda_symmetrization_matrix())
    return w.conj().T @ h @ w


def build_generator_effective(params: RamanParams, basis: Basis,
                              include_shifts: bool = True) -> ConditionalGenerator:
    """Reduced generator after eliminating the excited states.

    Lives on a three-level (lambda-scheme) basis: the gate terms are the
    three-level ones at (g_eff, omega_eff, gamma = 0), plus the four
    light-shift terms unless ``include_shifts`` is false.  The two weak
    effective Rabi frequencies must be equal, since the reduced model is
    only used for the balanced gate drive.
    """
    basis.require_scheme("lambda")
    view = effective_lambda_view(params)
    if not math.isclose(view.omega0_eff, view.omega1_eff, rel_tol=1e-12, abs_tol=0.0):
        raise ValueError(
            f"effective weak Rabi frequencies differ "
            f"({view.omega0_eff!r} vs {view.omega1_eff!r}); "
            "the reduced generator assumes a balanced drive"
        )
    h = _three_level_hamiltonian(view.g_eff, view.omega0_eff, params.kappa, 0.0, basis)
    if include_shifts:
        h = h + _shift_hamiltonian(view, basis.n_max)
    return ConditionalGenerator(basis, -1j * h)


def raman_pulse_duration(params: RamanParams) -> float:
    """Weak-field pulse length T = 2 pi / |omega0_eff|."""
    if params.omega20 <= 0.0 or params.omega_diag[0] <= 0.0:
        raise ValueError("pulse duration requires omega20 > 0 and omega_diag[0] > 0")
    return 2.0 * math.pi / abs(effective_lambda_view(params).omega0_eff)


def validate_regime_raman(params: RamanParams,
                          threshold: float = DEFAULT_THRESHOLD) -> RegimeReport:
    """Advisory report on the conditions behind the adiabatic reduction.

    Checks, in order: equal effective weak Rabi frequencies (a violation
    when broken, since the pulse length is built on it), the weak drive
    against g_eff^2/kappa and kappa, each weak field against its strong
    partner, g against omega_22, equality of the omega_jj^2/delta_j shifts
    (warning when broken) and the separation of the detunings from every
    other rate.
    """
    view = effective_lambda_view(params)
    o00, o11, o22 = params.omega_diag
    d0, d1, d2 = params.delta
    checks = [
        equality_check("omega0_eff_equals_omega1_eff",
                       view.omega0_eff, view.omega1_eff, hard=True),
    ]
    if params.kappa <= 0.0:
        checks.append(ratio_check(
            "omega_eff_much_less_than_geff2_over_kappa",
            abs(view.omega0_eff), 0.0, threshold, hard_denominator=True,
            note="kappa must be positive"))
    else:
        checks.append(ratio_check(
            "omega_eff_much_less_than_geff2_over_kappa",
            abs(view.omega0_eff) * params.kappa, view.g_eff ** 2, threshold,
            hard_denominator=True))
    checks += [
        ratio_check("omega_eff_much_less_than_kappa",
                    abs(view.omega0_eff), params.kappa, threshold,
                    hard_denominator=True),
        ratio_check("omega20_much_less_than_omega00", params.omega20, o00, threshold),
        ratio_check("omega21_much_less_than_omega11", params.omega21, o11, threshold),
        ratio_check("g_much_less_than_omega22", params.g, o22, threshold),
        equality_check("equal_ground_shifts",
                       o00 ** 2 / d0, o11 ** 2 / d1,
                       note="omega_00^2/delta_0 != omega_11^2/delta_1"),
        equality_check("equal_ground_shifts_2",
                       o11 ** 2 / d1, o22 ** 2 / d2,
                       note="omega_11^2/delta_1 != omega_22^2/delta_2"),
        ratio_check("delta_much_greater_than_other_rates",
                    max(params.g, params.kappa, o00, o11, o22,
                        params.omega20, params.omega21, *params.gamma),
                    min(params.delta), threshold),
    ]
    return RegimeReport(scheme="raman", checks=tuple(checks))
