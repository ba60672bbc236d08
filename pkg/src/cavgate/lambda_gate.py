"""Conditional dynamics of two driven three-level atoms in a lossy cavity.

One laser drives the 1-2 transition of atom 1 and another the 0-2
transition of atom 2, both with Rabi frequency omega0; the 1-2 transition
of each atom couples to the cavity mode with strength g.  Under the
no-emission condition the state evolves with the non-Hermitian generator
built here.  A pulse of duration 2*pi/omega0 then realizes a CNOT between
the two atoms (control = atom 1), mediated by the cavity-decoupled
antisymmetric bus state while the cavity stays empty.

The module also carries the closed five-amplitude model of the
decoherence-free dynamics (valid deep in the weak-driving regime) and the
first-order expressions for the gate matrix and the no-emission
probability, which serve as analytic cross-checks for the full numerics.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .hilbert import (
    Basis,
    ConditionalGenerator,
    Operator,
    fock_lowering,
    ket_bra,
    lambda_symmetrization_matrix,
)
from .regime import (
    DEFAULT_THRESHOLD,
    LEVEL_VIOLATION,
    RegimeCheck,
    RegimeReport,
    RegimeWarning,
    ratio_check,
)

__all__ = [
    "LambdaParams",
    "EffectiveRates",
    "build_generator_lambda",
    "cavity_coupling",
    "laser_coupling",
    "pulse_duration",
    "effective_rates",
    "effective_dfs_evolution",
    "first_order_gate_matrix",
    "first_order_success_probability",
    "validate_regime_lambda",
]


@dataclass(frozen=True)
class LambdaParams:
    """Physical rates of the three-level scheme, in units of g.

    omega0 is the Rabi frequency of both lasers; the reduced Rabi frequency
    omega0/sqrt(2) is what enters the effective dynamics.
    """

    omega0: float
    kappa: float = 1.0
    gamma: float = 0.0
    g: float = 1.0

    def __post_init__(self):
        for name in ("omega0", "kappa", "gamma", "g"):
            v = float(getattr(self, name))
            if not math.isfinite(v) or v < 0.0:
                raise ValueError(f"{name} must be a finite non-negative rate, got {v!r}")
            object.__setattr__(self, name, v)

    @property
    def omega(self) -> float:
        """Reduced Rabi frequency omega0 / sqrt(2)."""
        return self.omega0 / math.sqrt(2.0)


@dataclass(frozen=True)
class EffectiveRates:
    """Damping constants of the reduced decoherence-free dynamics.

    k1 is the cavity-leakage rate scale of the driven qubit amplitudes,
    k1 = omega^2 kappa / (16 g^2); k2 adds the direct loss channels of the
    bus amplitude, k2 = k1 + omega^2/(2 kappa) + gamma/2.  Always k2 >= k1.
    """

    k1: float
    k2: float


# single-atom operators on the 0/1/2 level space
_T21 = ket_bra(3, 2, 1)   # |2><1|
_T02 = ket_bra(3, 0, 2)   # |0><2|
_T12 = ket_bra(3, 1, 2)   # |1><2|
_P22 = ket_bra(3, 2, 2)
_I3 = np.eye(3, dtype=np.complex128)


def _atom1(op: np.ndarray) -> np.ndarray:
    return np.kron(op, _I3)


def _atom2(op: np.ndarray) -> np.ndarray:
    return np.kron(_I3, op)


def _to_symmetrized(h_product: np.ndarray, n_sectors: int) -> np.ndarray:
    w = np.kron(np.eye(n_sectors, dtype=np.complex128), lambda_symmetrization_matrix())
    return w.conj().T @ h_product @ w


def _cavity_term_product(g: float, n_max: int) -> np.ndarray:
    # i g sum_i (|2>_i<1| b - h.c.)
    b = fock_lowering(n_max)
    h = np.zeros(((n_max + 1) * 9,) * 2, dtype=np.complex128)
    for emb in (_atom1, _atom2):
        t = 1j * g * np.kron(b, emb(_T21))
        h += t + t.conj().T
    return h


def _laser_term_product(omega0: float, n_max: int) -> np.ndarray:
    # (omega0/2)(|0>_2<2| + |1>_1<2| + h.c.)
    lower = (omega0 / 2.0) * (_atom2(_T02) + _atom1(_T12))
    at = lower + lower.conj().T
    return np.kron(np.eye(n_max + 1, dtype=np.complex128), at)


def _hamiltonian_matrix(g: float, omega0: float, kappa: float, gamma: float,
                        basis: Basis) -> np.ndarray:
    """Conditional Hamiltonian in the symmetrized basis.

    Accepts signed g and omega0 so reduced models with negative effective
    couplings can reuse the same structure.
    """
    basis.require_scheme("lambda")
    n_max = basis.n_max
    nf = n_max + 1
    h = _cavity_term_product(g, n_max)
    h += _laser_term_product(omega0, n_max)
    b = fock_lowering(n_max)
    h += -0.5j * kappa * np.kron(b.conj().T @ b, np.eye(9, dtype=np.complex128))
    h += -0.5j * gamma * np.kron(np.eye(nf, dtype=np.complex128), _atom1(_P22) + _atom2(_P22))
    return _to_symmetrized(h, nf)


def build_generator_lambda(params: LambdaParams, basis: Basis) -> ConditionalGenerator:
    """Generator G = -i H of the no-emission dynamics.

    H carries the atom-cavity coupling, the two laser drives, the cavity
    damping -(i/2) kappa b'b and the atomic decay -(i/2) gamma per atom in
    level 2.  The decay part makes i(H - H') positive semidefinite, so the
    evolved squared norm (the no-photon probability) never increases.
    """
    h = _hamiltonian_matrix(params.g, params.omega0, params.kappa, params.gamma, basis)
    return ConditionalGenerator(basis, -1j * h)


def cavity_coupling(basis: Basis, g: float = 1.0) -> Operator:
    """Atom-cavity interaction operator alone (annihilates the DFS)."""
    basis.require_scheme("lambda")
    return Operator(basis, _to_symmetrized(_cavity_term_product(g, basis.n_max), basis.n_max + 1))


def laser_coupling(basis: Basis, omega0: float) -> Operator:
    """Laser drive operator alone."""
    basis.require_scheme("lambda")
    return Operator(basis, _to_symmetrized(_laser_term_product(omega0, basis.n_max), basis.n_max + 1))


def pulse_duration(params: LambdaParams) -> float:
    """Gate pulse length T = 2 pi / omega0."""
    if params.omega0 <= 0.0:
        raise ValueError("pulse duration is undefined for omega0 = 0")
    return 2.0 * math.pi / params.omega0


def effective_rates(params: LambdaParams) -> EffectiveRates:
    """Damping constants k1, k2 of the reduced dynamics."""
    if params.kappa <= 0.0 or params.g <= 0.0:
        raise ValueError(
            "effective rates require kappa > 0 and g > 0 (regime violation: "
            "the dissipative gate mechanism needs a leaky cavity)"
        )
    om2 = params.omega ** 2
    k1 = om2 * params.kappa / (16.0 * params.g ** 2)
    k2 = k1 + om2 / (2.0 * params.kappa) + params.gamma / 2.0
    return EffectiveRates(k1=k1, k2=k2)


def _dfs_block_matrix(omega: float, rates: EffectiveRates) -> np.ndarray:
    """Coefficient matrix of the coupled (c_10, c_11, c_a) amplitudes."""
    k1, k2 = rates.k1, rates.k2
    return -0.5 * np.array(
        [
            [10.0 * k1, 2.0 * k1, 1j * omega],
            [2.0 * k1, 2.0 * k1, -1j * omega],
            [1j * omega, -1j * omega, 2.0 * k2],
        ],
        dtype=np.complex128,
    )


def effective_dfs_evolution(initial, params: LambdaParams, t: float,
                            rates: EffectiveRates | None = None) -> np.ndarray:
    """Evolve the five decoherence-free amplitudes for a time t.

    ``initial`` holds (c_00, c_01, c_10, c_11, c_a).  c_01 is conserved,
    c_00 decays as exp(-4 k1 t), and the remaining three amplitudes follow
    the closed linear system solved here by exact matrix exponentiation.
    Pass explicit ``rates`` to study the model away from its physical
    damping constants (EffectiveRates(0, 0) gives the ideal pulse: an
    exact exchange of the driven pair after t = 2 pi / omega0).
    """
    from .propagator import expm

    if t < 0.0:
        raise ValueError("t must be >= 0")
    v = np.asarray(initial, dtype=np.complex128)
    if v.shape != (5,):
        raise ValueError(f"expected 5 decoherence-free amplitudes, got shape {v.shape}")
    if rates is None:
        rates = effective_rates(params)
    out = v.copy()
    out[0] = v[0] * np.exp(-4.0 * rates.k1 * t)
    out[2:5] = expm(_dfs_block_matrix(params.omega, rates) * t) @ v[2:5]
    return out


def first_order_gate_matrix(params: LambdaParams) -> np.ndarray:
    """Gate matrix on the qubit subspace, to first order in k1*T and k2*T.

    Equals the ideal CNOT minus three small corrections proportional to
    (6k1 - k2)T/4, (10k1 + k2)T/4 and 4k1*T; the 01 column is exact.
    Rows/columns are ordered 00, 01, 10, 11.
    """
    rates = effective_rates(params)
    t = pulse_duration(params)
    k1, k2 = rates.k1, rates.k2
    u = np.array(
        [[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]],
        dtype=np.complex128,
    )
    u[2, 2] -= 0.25 * (6.0 * k1 - k2) * t
    u[3, 3] -= 0.25 * (6.0 * k1 - k2) * t
    u[2, 3] -= 0.25 * (10.0 * k1 + k2) * t
    u[3, 2] -= 0.25 * (10.0 * k1 + k2) * t
    u[0, 0] -= 4.0 * k1 * t
    return u


def first_order_success_probability(psi, params: LambdaParams) -> float:
    """No-emission probability of a full pulse, to first order in k_i*T.

    ``psi`` is a unit-norm amplitude vector over (00, 01, 10, 11).  Outside
    the weak-driving regime the first-order expression can leave [0, 1];
    the returned value is then clamped and a RegimeWarning is emitted.
    """
    v = np.asarray(psi, dtype=np.complex128)
    if v.shape != (4,):
        raise ValueError(f"expected a qubit state over {('00', '01', '10', '11')}, got shape {v.shape}")
    if abs(np.vdot(v, v).real - 1.0) > 1e-9:
        raise ValueError("qubit state must be unit norm")
    rates = effective_rates(params)
    t = pulse_duration(params)
    k1, k2 = rates.k1, rates.k2
    c00, _, c10, c11 = v
    p = 1.0
    p -= 0.5 * (10.0 * k1 + k2) * t * (abs(c10) ** 2 + abs(c11) ** 2)
    p -= 0.5 * (6.0 * k1 - k2) * t * (2.0 * (c10 * np.conj(c11)).real)
    p -= 8.0 * k1 * t * abs(c00) ** 2
    if p < 0.0 or p > 1.0:
        warnings.warn(
            f"first-order success probability {p:.4g} clamped to [0, 1]; "
            "parameters are outside the weak-driving regime",
            RegimeWarning,
            stacklevel=2,
        )
        p = min(1.0, max(0.0, p))
    return float(p)


def validate_regime_lambda(params: LambdaParams,
                           threshold: float = DEFAULT_THRESHOLD) -> RegimeReport:
    """Advisory report on gamma << omega << g^2/kappa and omega << kappa."""
    om = params.omega
    checks = [ratio_check("gamma_much_less_than_omega", params.gamma, om, threshold)]
    if params.kappa <= 0.0 or params.g <= 0.0:
        checks.append(RegimeCheck(
            "omega_much_less_than_g2_over_kappa", math.inf, threshold,
            LEVEL_VIOLATION, "kappa and g must be positive"))
    else:
        checks.append(ratio_check(
            "omega_much_less_than_g2_over_kappa",
            om * params.kappa, params.g ** 2, threshold))
    checks.append(ratio_check("omega_much_less_than_kappa", om, params.kappa,
                              threshold, hard_denominator=True))
    return RegimeReport(scheme="lambda", checks=tuple(checks))
