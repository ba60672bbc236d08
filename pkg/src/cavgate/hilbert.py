"""Truncated Hilbert spaces for atom-cavity systems.

Three level schemes are supported:

``lambda``
    Two three-level atoms (ground states 0, 1 and excited state 2) sharing
    one cavity mode.  The two-atom configurations are kept in a partially
    symmetrized form: the combinations of one atom in 1 and the other in 2
    are replaced by the antisymmetric/symmetric pair ``a`` and ``s``, because
    only ``s`` couples to the cavity while ``a`` is the entangled bus state.
``raman``
    Two six-level atoms (ground states 0, 1, 2 plus excited states e0, e1,
    e2) sharing one cavity mode; plain product configurations, no
    symmetrization.
``shelving``
    A single three-level atom with states A, B, C and no cavity mode.

Units: hbar = 1 and every rate is expressed in units of the atom-cavity
coupling g, so g = 1 unless stated otherwise.  Basis ordering is photon-
number major with a fixed configuration order inside each photon sector,
so serialized states are portable.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field

import numpy as np

__all__ = [
    "LAMBDA_CONFIGS",
    "LAMBDA_PRODUCT_CONFIGS",
    "RAMAN_LEVELS",
    "RAMAN_CONFIGS",
    "SHELVING_CONFIGS",
    "QUBIT_CONFIGS",
    "DFS_LABELS",
    "SCHEMES",
    "SchemeMismatchError",
    "Basis",
    "StateVector",
    "Operator",
    "ConditionalGenerator",
    "build_basis",
    "basis_state",
    "dfs_projector",
    "qubit_indices",
    "lambda_symmetrization_matrix",
    "fock_lowering",
    "ket_bra",
]

#: Partially symmetrized two-atom configurations of the lambda scheme, in
#: storage order.  "a" and "s" are (|12> -+ |21>)/sqrt(2).
LAMBDA_CONFIGS = ("00", "01", "10", "11", "02", "20", "a", "s", "22")

#: Plain product configurations (atom 1 major) used internally to assemble
#: lambda-scheme operators before rotating into the symmetrized basis.
LAMBDA_PRODUCT_CONFIGS = ("00", "01", "02", "10", "11", "12", "20", "21", "22")

#: Single-atom levels of the six-level (Raman) scheme.
RAMAN_LEVELS = ("0", "1", "2", "e0", "e1", "e2")

#: All 36 two-atom product configurations, atom 1 major.
RAMAN_CONFIGS = tuple(x1 + x2 for x1 in RAMAN_LEVELS for x2 in RAMAN_LEVELS)

#: States of the three-level shelving model: metastable A, intermediate B,
#: rapidly decaying C.
SHELVING_CONFIGS = ("A", "B", "C")

#: Computational-basis configurations (control atom first).
QUBIT_CONFIGS = ("00", "01", "10", "11")

#: Labels spanning the decoherence-free subspace of the lambda scheme.
DFS_LABELS = ((0, "00"), (0, "01"), (0, "10"), (0, "11"), (0, "a"))

SCHEMES = ("lambda", "raman", "shelving")

_CONFIGS = {
    "lambda": LAMBDA_CONFIGS,
    "raman": RAMAN_CONFIGS,
    "shelving": SHELVING_CONFIGS,
}


class SchemeMismatchError(ValueError):
    """An operation received a basis built for a different level scheme."""


def _normalize_config(scheme: str, config) -> str:
    """Canonicalize a configuration label; tuples are accepted for raman."""
    if isinstance(config, tuple):
        if scheme != "raman" or len(config) != 2:
            raise ValueError(f"tuple configurations are only valid for the raman scheme, got {config!r}")
        config = "".join(str(x) for x in config)
    return str(config)


@dataclass(frozen=True)
class Basis:
    """Ordered, truncated basis of (photon number, atomic configuration) labels.

    Immutable after construction; safe to share across concurrent tasks.
    """

    scheme: str
    n_max: int
    labels: tuple
    _index: dict = field(repr=False, compare=False)

    @property
    def dim(self) -> int:
        return len(self.labels)

    def index(self, n: int, config) -> int:
        """Integer index of the label (n, config); raises on unknown labels."""
        key = (int(n), _normalize_config(self.scheme, config))
        try:
            return self._index[key]
        except KeyError:
            raise ValueError(
                f"label (n={key[0]}, config={key[1]!r}) is not in the "
                f"{self.scheme} basis with n_max={self.n_max}"
            ) from None

    def label(self, i: int) -> tuple:
        """(n, config) label stored at index i."""
        return self.labels[i]

    @property
    def configs(self) -> tuple:
        """Configuration order inside each photon sector."""
        return _CONFIGS[self.scheme]

    def require_scheme(self, scheme: str) -> None:
        if self.scheme != scheme:
            raise SchemeMismatchError(f"expected a {scheme!r} basis, got {self.scheme!r}")


def build_basis(scheme: str, n_max: int) -> Basis:
    """Construct the deterministic basis for a level scheme.

    Dimensions: (n_max+1)*9 for lambda, (n_max+1)*36 for raman, and always 3
    for shelving (no cavity mode, so the photon cutoff is irrelevant there).

    Parameters
    ----------
    scheme : {"lambda", "raman", "shelving"}
    n_max : int
        Photon-number cutoff, >= 0.
    """
    if scheme not in SCHEMES:
        raise ValueError(f"unknown scheme {scheme!r}; expected one of {SCHEMES}")
    n_max = int(n_max)
    if n_max < 0:
        raise ValueError(f"n_max must be >= 0, got {n_max}")
    configs = _CONFIGS[scheme]
    sectors = 1 if scheme == "shelving" else n_max + 1
    labels = tuple((n, c) for n in range(sectors) for c in configs)
    index = {lab: i for i, lab in enumerate(labels)}
    return Basis(scheme=scheme, n_max=n_max, labels=labels, _index=index)


@dataclass
class StateVector:
    """Complex amplitudes over a basis.

    States evolved under a conditional (no-emission) generator are kept
    unnormalized: the squared norm is the no-photon probability.
    """

    basis: Basis
    amplitudes: np.ndarray

    def __post_init__(self):
        amps = np.asarray(self.amplitudes, dtype=np.complex128)
        if amps.shape != (self.basis.dim,):
            raise ValueError(
                f"amplitude array has shape {amps.shape}, expected ({self.basis.dim},)"
            )
        self.amplitudes = amps

    def squared_norm(self) -> float:
        return float(np.real(np.vdot(self.amplitudes, self.amplitudes)))

    def amplitude(self, n: int, config) -> complex:
        return complex(self.amplitudes[self.basis.index(n, config)])

    def overlap(self, other: "StateVector") -> complex:
        """<self|other>; bases must match."""
        if self.basis != other.basis:
            raise ValueError("cannot take the overlap of states over different bases")
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def copy(self) -> "StateVector":
        return StateVector(self.basis, self.amplitudes.copy())

    def to_csv(self) -> str:
        """Serialize as CSV rows ``n,config,re,im`` (one row per label)."""
        buf = io.StringIO()
        buf.write("n,config,re,im\n")
        for (n, c), amp in zip(self.basis.labels, self.amplitudes):
            buf.write(f"{n},{c},{float(amp.real)!r},{float(amp.imag)!r}\n")
        return buf.getvalue()

    @classmethod
    def from_csv(cls, basis: Basis, text: str) -> "StateVector":
        """Parse the output of :meth:`to_csv` over the given basis."""
        amps = np.zeros(basis.dim, dtype=np.complex128)
        lines = [ln for ln in text.strip().splitlines() if ln.strip()]
        for ln in lines[1:]:
            n, config, re, im = ln.split(",")
            amps[basis.index(int(n), config)] = float(re) + 1j * float(im)
        return cls(basis, amps)


@dataclass(frozen=True)
class Operator:
    """Dense square operator over a basis."""

    basis: Basis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"operator shape {m.shape} does not match basis dimension {self.basis.dim}")
        object.__setattr__(self, "matrix", m)

    def apply(self, state: StateVector) -> StateVector:
        if state.basis != self.basis:
            raise ValueError("operator and state are defined over different bases")
        return StateVector(self.basis, self.matrix @ state.amplitudes)


@dataclass(frozen=True)
class ConditionalGenerator:
    """Generator G of conditional no-emission dynamics, d(psi)/dt = G psi.

    G = -i H with H the (non-Hermitian) conditional Hamiltonian, so the
    squared norm of the evolved state decays monotonically.
    """

    basis: Basis
    matrix: np.ndarray

    def __post_init__(self):
        m = np.asarray(self.matrix, dtype=np.complex128)
        if m.shape != (self.basis.dim, self.basis.dim):
            raise ValueError(f"generator shape {m.shape} does not match basis dimension {self.basis.dim}")
        object.__setattr__(self, "matrix", m)

    @property
    def hamiltonian(self) -> np.ndarray:
        """The conditional Hamiltonian H = i G."""
        return 1j * self.matrix


def basis_state(basis: Basis, n: int, config) -> StateVector:
    """Unit vector with amplitude 1 at the label (n, config)."""
    amps = np.zeros(basis.dim, dtype=np.complex128)
    amps[basis.index(n, config)] = 1.0
    return StateVector(basis, amps)


def qubit_indices(basis: Basis) -> tuple:
    """Indices of the four zero-photon computational configurations.

    Order follows ``QUBIT_CONFIGS`` (control atom first); valid for the
    lambda and raman schemes.
    """
    if basis.scheme not in ("lambda", "raman"):
        raise SchemeMismatchError(f"no qubit subspace in the {basis.scheme!r} scheme")
    return tuple(basis.index(0, c) for c in QUBIT_CONFIGS)


def dfs_projector(basis: Basis) -> Operator:
    """Orthogonal projector onto the five-dimensional decoherence-free subspace.

    The subspace is spanned by the zero-photon qubit configurations together
    with the zero-photon antisymmetric bus state ``a``.  The projector is
    idempotent and Hermitian with trace 5.
    """
    basis.require_scheme("lambda")
    p = np.zeros((basis.dim, basis.dim), dtype=np.complex128)
    for n, c in DFS_LABELS:
        i = basis.index(n, c)
        p[i, i] = 1.0
    return Operator(basis, p)


def lambda_symmetrization_matrix() -> np.ndarray:
    """Unitary mapping symmetrized lambda coordinates to product coordinates.

    Columns are the ``LAMBDA_CONFIGS`` vectors expressed over
    ``LAMBDA_PRODUCT_CONFIGS``; use ``W.conj().T @ H_prod @ W`` to rotate an
    operator from the product basis into the stored basis.
    """
    w = np.zeros((9, 9), dtype=np.complex128)
    pidx = {c: i for i, c in enumerate(LAMBDA_PRODUCT_CONFIGS)}
    r = 1.0 / np.sqrt(2.0)
    columns = {
        "00": {"00": 1.0},
        "01": {"01": 1.0},
        "10": {"10": 1.0},
        "11": {"11": 1.0},
        "02": {"02": 1.0},
        "20": {"20": 1.0},
        "a": {"12": r, "21": -r},
        "s": {"12": r, "21": r},
        "22": {"22": 1.0},
    }
    for j, name in enumerate(LAMBDA_CONFIGS):
        for prod, val in columns[name].items():
            w[pidx[prod], j] = val
    return w


def fock_lowering(n_max: int) -> np.ndarray:
    """Photon annihilation operator on the truncated Fock space."""
    if n_max < 0:
        raise ValueError("n_max must be >= 0")
    return np.diag(np.sqrt(np.arange(1, n_max + 1)), 1).astype(np.complex128)


def ket_bra(dim: int, i: int, j: int) -> np.ndarray:
    """|i><j| on a dim-dimensional space."""
    m = np.zeros((dim, dim), dtype=np.complex128)
    m[i, j] = 1.0
    return m
