"""Statevector substrate: pure qubit registers, two-qubit gates, reduced spectra and entropies.

Qubit 0 is the system and the most significant bit of the amplitude index.
Basis state bit 0 is spin up (sigma^z = +1), bit 1 is spin down.
"""

import logging
from dataclasses import InitVar, dataclass, field
from typing import Iterable, Iterator, Tuple

import numpy as np

from .exceptions import (
    EmptySubsetError,
    InvalidStateError,
    InvalidSubsetError,
    NegativeEigenvalueError,
    NonUnitaryInputError,
    NotNormalizedError,
    OverlappingSubsetsError,
    QubitIndexError,
    SubsetTooLargeError,
    TooManyQubitsError,
    WrongDimensionError,
)
from .models import InformationPoint

logger = logging.getLogger(__name__)

MIN_QUBITS = 2
MAX_QUBITS = 26
MAX_DENSITY_QUBITS = 12

NORM_TOL = 1e-12
UNITARY_TOL = 1e-8
CLIP_TOL = 1e-10
SUM_TOL = 1e-9
HERMITIAN_TOL = 1e-10


@dataclass(frozen=True)
class QubitSubset:
    """Sorted set of distinct qubit labels."""
    indices: Tuple[int, ...]

    def __post_init__(self):
        idx = tuple(int(i) for i in self.indices)
        if len(set(idx)) != len(idx):
            raise InvalidSubsetError(f"Duplicate qubit labels in {list(idx)}")
        if any(i < 0 for i in idx):
            raise InvalidSubsetError(f"Negative qubit label in {list(idx)}")
        object.__setattr__(self, "indices", tuple(sorted(idx)))

    @classmethod
    def of(cls, indices: Iterable[int]) -> "QubitSubset":
        return cls(tuple(indices))

    def __len__(self) -> int:
        return len(self.indices)

    def __iter__(self) -> Iterator[int]:
        return iter(self.indices)

    def __contains__(self, item) -> bool:
        return item in self.indices

    def union(self, other: "QubitSubset") -> "QubitSubset":
        return QubitSubset(tuple(set(self.indices) | set(other.indices)))

    def shared(self, other: "QubitSubset") -> Tuple[int, ...]:
        return tuple(sorted(set(self.indices) & set(other.indices)))

    def complement(self, num_qubits: int) -> "QubitSubset":
        return QubitSubset(tuple(i for i in range(num_qubits) if i not in self.indices))

    def check_range(self, num_qubits: int) -> None:
        for i in self.indices:
            if i >= num_qubits:
                raise QubitIndexError(i, num_qubits)


SYSTEM = QubitSubset((0,))


@dataclass(frozen=True, eq=False)
class PureState:
    """Global wavefunction of the system qubit and N ancillas."""
    num_qubits: int
    amplitudes: np.ndarray
    validate: InitVar[bool] = True

    def __post_init__(self, validate: bool):
        amps = np.asarray(self.amplitudes, dtype=np.complex128).reshape(-1)
        object.__setattr__(self, "amplitudes", amps)
        if self.num_qubits > MAX_QUBITS:
            raise TooManyQubitsError(self.num_qubits, MAX_QUBITS)
        if self.num_qubits < MIN_QUBITS:
            raise InvalidStateError(
                f"A register needs at least {MIN_QUBITS} qubits, got {self.num_qubits}"
            )
        if amps.size != 2 ** self.num_qubits:
            raise InvalidStateError(
                f"Expected {2 ** self.num_qubits} amplitudes for {self.num_qubits} qubits, "
                f"got {amps.size}"
            )
        if validate:
            norm = float(np.linalg.norm(amps))
            if abs(norm - 1.0) > NORM_TOL:
                raise InvalidStateError(f"State norm {norm:.15f} differs from 1")

    @classmethod
    def from_amplitudes(cls, amplitudes) -> "PureState":
        amps = np.asarray(amplitudes, dtype=np.complex128).reshape(-1)
        num_qubits = int(round(np.log2(amps.size))) if amps.size else 0
        return cls(num_qubits, amps)

    @property
    def n_ancillas(self) -> int:
        return self.num_qubits - 1

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def tensor(self) -> np.ndarray:
        """Amplitudes as a rank-n tensor with one axis of length 2 per qubit."""
        return self.amplitudes.reshape([2] * self.num_qubits)


@dataclass(frozen=True, eq=False)
class Spectrum:
    """Eigenvalues of a density operator in descending order."""
    eigenvalues: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.eigenvalues, dtype=np.float64).reshape(-1)
        if values.size and values.min() < -CLIP_TOL:
            raise NegativeEigenvalueError(float(values.min()))
        if values.size and values.max() > 1.0 + SUM_TOL:
            raise InvalidStateError(f"Eigenvalue {values.max():.12f} exceeds 1")
        values = np.clip(values, 0.0, 1.0)
        object.__setattr__(self, "eigenvalues", np.sort(values)[::-1].copy())

    def __len__(self) -> int:
        return self.eigenvalues.size

    @property
    def total(self) -> float:
        return float(self.eigenvalues.sum())


@dataclass(frozen=True, eq=False)
class DensityMatrix:
    """Reduced density operator of a qubit subset."""
    dim: int
    entries: np.ndarray = field(repr=False)

    def __post_init__(self):
        rho = np.asarray(self.entries, dtype=np.complex128)
        if rho.shape != (self.dim, self.dim) or self.dim & (self.dim - 1):
            raise InvalidStateError(
                f"Density matrix of shape {rho.shape} does not match dimension {self.dim}"
            )
        if np.max(np.abs(rho - rho.conj().T)) > HERMITIAN_TOL:
            raise InvalidStateError("Density matrix is not Hermitian")
        trace = np.trace(rho).real
        if abs(trace - 1.0) > HERMITIAN_TOL:
            raise InvalidStateError(f"Density matrix trace {trace:.12f} differs from 1")
        lowest = float(np.linalg.eigvalsh(rho).min())
        if lowest < -CLIP_TOL:
            raise NegativeEigenvalueError(lowest)
        object.__setattr__(self, "entries", rho)

    def spectrum(self) -> Spectrum:
        return Spectrum(np.linalg.eigvalsh(self.entries))


def _check_qubit(index: int, num_qubits: int) -> None:
    if not 0 <= index < num_qubits:
        raise QubitIndexError(index, num_qubits)


def unitarity_deviation(u: np.ndarray) -> float:
    """Largest entry of |U^dagger U - 1|."""
    u = np.asarray(u, dtype=np.complex128)
    return float(np.max(np.abs(u.conj().T @ u - np.eye(u.shape[0]))))


def apply_two_qubit_unitary(state: PureState, u, qa: int, qb: int) -> PureState:
    """Apply a 4x4 unitary to qubits (qa, qb) in the |qa qb> ordering.

    Args:
        state: Register to act on
        u: 4x4 unitary in the {uu, ud, du, dd} basis of (qa, qb)
        qa: Qubit taking the high bit of the gate basis
        qb: Qubit taking the low bit

    Returns:
        New PureState; the input is left untouched
    """
    n = state.num_qubits
    _check_qubit(qa, n)
    _check_qubit(qb, n)
    if qa == qb:
        raise QubitIndexError(qb, n, "A two-qubit gate needs two distinct qubits")
    u = np.asarray(u, dtype=np.complex128)
    if u.shape != (4, 4):
        raise WrongDimensionError(4, u.shape[0])
    deviation = unitarity_deviation(u)
    if deviation > UNITARY_TOL:
        raise NonUnitaryInputError(deviation, UNITARY_TOL)

    psi = np.moveaxis(state.tensor(), (qa, qb), (0, 1))
    shape = psi.shape
    psi = (u @ psi.reshape(4, -1)).reshape(shape)
    psi = np.moveaxis(psi, (0, 1), (qa, qb))
    return PureState(n, psi.reshape(-1), validate=False)


def _bipartition_matrix(state: PureState, keep: QubitSubset) -> np.ndarray:
    """Amplitudes reshaped to (2^|keep|, 2^(n-|keep|)) with `keep` as the row index."""
    n = state.num_qubits
    rest = [i for i in range(n) if i not in keep]
    psi = np.transpose(state.tensor(), list(keep.indices) + rest)
    return psi.reshape(2 ** len(keep), -1)


def _check_subset(state: PureState, subset: QubitSubset, role: str = "subset") -> None:
    if len(subset) == 0:
        raise EmptySubsetError(role)
    subset.check_range(state.num_qubits)


def reduced_spectrum(state: PureState, keep: QubitSubset) -> Spectrum:
    """Nonzero spectrum of the reduced state of `keep` from the smaller Gram matrix.

    Args:
        state: Global pure state
        keep: Qubits whose reduced state is wanted
    """
    _check_subset(state, keep, "kept subset")
    if len(keep) == state.num_qubits:
        return Spectrum(np.array([1.0]))
    a = _bipartition_matrix(state, keep)
    rows, cols = a.shape
    gram = a @ a.conj().T if rows <= cols else a.conj().T @ a
    return Spectrum(np.linalg.eigvalsh(gram))


def von_neumann_entropy(spec: Spectrum) -> float:
    """Entropy in bits, with 0 log 0 = 0."""
    total = spec.total
    if abs(total - 1.0) > SUM_TOL:
        raise NotNormalizedError(total, SUM_TOL)
    values = spec.eigenvalues[spec.eigenvalues > 0.0]
    entropy = float(-np.sum(values * np.log2(values)))
    # also folds -0.0 into 0.0
    return entropy if entropy > 0.0 else 0.0


def entropy(state: PureState, keep: QubitSubset) -> float:
    return von_neumann_entropy(reduced_spectrum(state, keep))


def _check_disjoint(state: PureState, a: QubitSubset, b: QubitSubset) -> None:
    _check_subset(state, a, "first subset")
    _check_subset(state, b, "second subset")
    shared = a.shared(b)
    if shared:
        raise OverlappingSubsetsError(shared)


def mutual_information(state: PureState, a: QubitSubset, b: QubitSubset) -> float:
    """S(a) + S(b) - S(a u b) in bits."""
    _check_disjoint(state, a, b)
    return entropy(state, a) + entropy(state, b) - entropy(state, a.union(b))


def subset_information(state: PureState, fraction: QubitSubset) -> InformationPoint:
    """Entropies of the system (qubit 0), an ancilla fraction and their union."""
    _check_disjoint(state, SYSTEM, fraction)
    return InformationPoint(
        system_entropy=entropy(state, SYSTEM),
        fraction_entropy=entropy(state, fraction),
        joint_entropy=entropy(state, SYSTEM.union(fraction)),
    )


def reduced_density(state: PureState, keep: QubitSubset) -> DensityMatrix:
    """Partial trace over the complement of `keep`."""
    _check_subset(state, keep, "kept subset")
    if len(keep) > MAX_DENSITY_QUBITS:
        raise SubsetTooLargeError(len(keep), MAX_DENSITY_QUBITS)
    a = _bipartition_matrix(state, keep)
    rho = a @ a.conj().T
    return DensityMatrix(rho.shape[0], rho)


def offdiagonal_coherence(rho: DensityMatrix) -> float:
    """|rho_{1,2}| of a single-qubit density matrix."""
    if rho.dim != 2:
        raise WrongDimensionError(2, rho.dim)
    return float(abs(rho.entries[0, 1]))


def state_fidelity(a: PureState, b: PureState) -> float:
    """|<a|b>|^2, insensitive to global phase."""
    if a.num_qubits != b.num_qubits:
        raise InvalidStateError(
            f"Cannot compare {a.num_qubits}-qubit and {b.num_qubits}-qubit states"
        )
    return float(abs(np.vdot(a.amplitudes, b.amplitudes)) ** 2)


def states_equal(a: PureState, b: PureState, tol: float = 1e-10) -> bool:
    """Equality up to global phase."""
    if a.num_qubits != b.num_qubits:
        return False
    return abs(state_fidelity(a, b) - 1.0) <= tol


def total_magnetization(state: PureState) -> float:
    """Sum of <sigma^z> over every qubit."""
    probs = np.abs(state.tensor()) ** 2
    n = state.num_qubits
    total = 0.0
    for q in range(n):
        marginal = probs.sum(axis=tuple(i for i in range(n) if i != q))
        total += float(marginal[0] - marginal[1])
    return total
