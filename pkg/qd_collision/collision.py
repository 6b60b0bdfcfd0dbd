"""Collision unitaries, initial states and collision schedules.

A collision between the system (qubit 0) and ancilla k applies
U = exp(-i H t) with H = sum_j J_j sigma^j (x) sigma^j. There is no free
evolution between collisions.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Callable, Optional, Sequence, Tuple

import numpy as np

from .exceptions import (
    InvalidCountsError,
    InvalidCouplingError,
    InvalidStateError,
    TooManyAncillasError,
)
from .qcore import MAX_QUBITS, NORM_TOL, PureState, apply_two_qubit_unitary

logger = logging.getLogger(__name__)

MAX_ANCILLAS = MAX_QUBITS - 1

_PAULI_X = np.array([[0, 1], [1, 0]], dtype=np.complex128)
_PAULI_Y = np.array([[0, -1j], [1j, 0]], dtype=np.complex128)
_PAULI_Z = np.array([[1, 0], [0, -1]], dtype=np.complex128)

_SQRT2_INV = 1 / math.sqrt(2)


class Interaction(str, Enum):
    Z = "z"
    XX = "xx"


@dataclass(frozen=True)
class CouplingPreset:
    """Coupling strength J and collision duration t."""
    name: str
    j: float
    t: float


WEAK = CouplingPreset("weak", j=1.0, t=0.025)
STRONG = CouplingPreset("strong", j=1.0, t=1.0)
PRESETS = {WEAK.name: WEAK, STRONG.name: STRONG}


@dataclass(frozen=True)
class CouplingSpec:
    """Coupling strengths (units of hbar*omega = 1) and duration of one collision."""
    jx: float
    jy: float
    jz: float
    t: float

    def __post_init__(self):
        values = (self.jx, self.jy, self.jz, self.t)
        if not all(math.isfinite(v) for v in values):
            raise InvalidCouplingError(f"Coupling values must be finite, got {values}")
        if self.t < 0:
            raise InvalidCouplingError(f"Collision duration must be non-negative, got t={self.t}")

    @classmethod
    def z(cls, j: float, t: float) -> "CouplingSpec":
        """Pure dephasing J sigma^z (x) sigma^z."""
        return cls(0.0, 0.0, j, t)

    @classmethod
    def xx(cls, j: float, t: float) -> "CouplingSpec":
        """Exchange J (sigma^x (x) sigma^x + sigma^y (x) sigma^y)."""
        return cls(j, j, 0.0, t)

    @classmethod
    def from_preset(cls, interaction, preset) -> "CouplingSpec":
        interaction = Interaction(interaction)
        if isinstance(preset, str):
            if preset not in PRESETS:
                raise InvalidCouplingError(
                    f"Unknown preset '{preset}'", f"Available presets: {', '.join(PRESETS)}"
                )
            preset = PRESETS[preset]
        if interaction is Interaction.Z:
            return cls.z(preset.j, preset.t)
        return cls.xx(preset.j, preset.t)

    @property
    def is_dephasing(self) -> bool:
        return self.jx == 0 and self.jy == 0

    @property
    def dephasing_angle(self) -> float:
        """J_z t accumulated per collision."""
        return self.jz * self.t


@dataclass(frozen=True)
class InitialSystemState:
    """alpha |up> + beta |down>."""
    alpha: complex
    beta: complex

    def __post_init__(self):
        norm = abs(self.alpha) ** 2 + abs(self.beta) ** 2
        if abs(norm - 1.0) > NORM_TOL:
            raise InvalidStateError(f"|alpha|^2 + |beta|^2 = {norm:.15f}, expected 1")

    @classmethod
    def up(cls) -> "InitialSystemState":
        return cls(1.0 + 0j, 0j)

    @classmethod
    def plus(cls) -> "InitialSystemState":
        return cls(_SQRT2_INV + 0j, _SQRT2_INV + 0j)

    @classmethod
    def haar_random(cls, rng: np.random.Generator) -> "InitialSystemState":
        """Two independent standard complex Gaussians, normalized."""
        z = rng.standard_normal(2) + 1j * rng.standard_normal(2)
        z = z / np.linalg.norm(z)
        return cls(complex(z[0]), complex(z[1]))

    @property
    def populations(self) -> Tuple[float, float]:
        p = abs(self.alpha) ** 2
        return p, 1.0 - p

    def vector(self) -> np.ndarray:
        return np.array([self.alpha, self.beta], dtype=np.complex128)


class ScheduleKind(str, Enum):
    ROUND_ROBIN = "round_robin"
    RANDOM_UNIFORM = "random_uniform"
    BIASED = "biased"


@dataclass(frozen=True)
class CollisionSchedule:
    """Ordered ancilla labels (1..N) the system collides with."""
    sequence: Tuple[int, ...]
    n_ancillas: int
    kind: ScheduleKind
    seed: Optional[int] = None

    def __post_init__(self):
        object.__setattr__(self, "sequence", tuple(int(k) for k in self.sequence))
        if self.n_ancillas < 1:
            raise InvalidCountsError(f"A schedule needs at least one ancilla, got {self.n_ancillas}")
        bad = [k for k in self.sequence if not 1 <= k <= self.n_ancillas]
        if bad:
            raise InvalidCountsError(
                f"Schedule references ancillas outside [1, {self.n_ancillas}]",
                f"Offending labels: {sorted(set(bad))}",
            )

    def __len__(self) -> int:
        return len(self.sequence)

    def counts_per_ancilla(self) -> np.ndarray:
        """Collision count of each ancilla; entry k-1 belongs to ancilla k."""
        if not self.sequence:
            return np.zeros(self.n_ancillas, dtype=np.int64)
        return np.bincount(np.asarray(self.sequence) - 1, minlength=self.n_ancillas)

    def with_sequence(self, sequence: Sequence[int]) -> "CollisionSchedule":
        """Same register and tag, different collision order."""
        return CollisionSchedule(tuple(sequence), self.n_ancillas, self.kind, self.seed)


def interaction_hamiltonian(c: CouplingSpec) -> np.ndarray:
    """sum_j J_j sigma^j (x) sigma^j in the {uu, ud, du, dd} basis."""
    return (
        c.jx * np.kron(_PAULI_X, _PAULI_X)
        + c.jy * np.kron(_PAULI_Y, _PAULI_Y)
        + c.jz * np.kron(_PAULI_Z, _PAULI_Z)
    )


def bell_energies(c: CouplingSpec) -> Tuple[float, float, float, float]:
    """Eigenvalues of H on (Phi+, Phi-, Psi+, Psi-)."""
    return (
        c.jx - c.jy + c.jz,
        -c.jx + c.jy + c.jz,
        c.jx + c.jy - c.jz,
        -c.jx - c.jy - c.jz,
    )


def collision_unitary(c: CouplingSpec) -> np.ndarray:
    """exp(-i H t) assembled from the four Bell-basis phases."""
    e_phi_p, e_phi_m, e_psi_p, e_psi_m = (
        np.exp(-1j * e * c.t) for e in bell_energies(c)
    )
    u = np.zeros((4, 4), dtype=np.complex128)
    # Phi+- span {uu, dd}, Psi+- span {ud, du}
    u[0, 0] = u[3, 3] = (e_phi_p + e_phi_m) / 2
    u[0, 3] = u[3, 0] = (e_phi_p - e_phi_m) / 2
    u[1, 1] = u[2, 2] = (e_psi_p + e_psi_m) / 2
    u[1, 2] = u[2, 1] = (e_psi_p - e_psi_m) / 2
    return u


def build_initial_state(sys: InitialSystemState, n_ancillas: int) -> PureState:
    """|phi>_S (x) |+>^N."""
    if n_ancillas > MAX_ANCILLAS:
        raise TooManyAncillasError(n_ancillas, MAX_ANCILLAS)
    if n_ancillas < 1:
        raise InvalidCountsError(f"At least one ancilla is required, got {n_ancillas}")
    env = np.full(2 ** n_ancillas, 2.0 ** (-n_ancillas / 2), dtype=np.complex128)
    return PureState(n_ancillas + 1, np.kron(sys.vector(), env))


def make_schedule(
    kind,
    n_ancillas: int,
    *,
    collisions_per_ancilla: Optional[int] = None,
    total: Optional[int] = None,
    counts: Optional[Sequence[int]] = None,
    seed: Optional[int] = None,
    rng: Optional[np.random.Generator] = None,
) -> CollisionSchedule:
    """Build a round-robin, i.i.d. uniform random or biased collision schedule.

    Random schedules draw from ``rng`` when given, else from a PCG64 generator
    seeded with ``seed``; the same seed always yields the same sequence.
    """
    kind = ScheduleKind(kind)
    if n_ancillas < 1:
        raise InvalidCountsError(f"At least one ancilla is required, got {n_ancillas}")

    if kind is ScheduleKind.ROUND_ROBIN:
        if collisions_per_ancilla is None or collisions_per_ancilla < 0:
            raise InvalidCountsError(
                f"round_robin needs collisions_per_ancilla >= 0, got {collisions_per_ancilla}"
            )
        sequence = tuple(range(1, n_ancillas + 1)) * collisions_per_ancilla

    elif kind is ScheduleKind.RANDOM_UNIFORM:
        if total is None or total < 0:
            raise InvalidCountsError(f"random_uniform needs total >= 0, got {total}")
        generator = rng if rng is not None else np.random.default_rng(seed)
        sequence = tuple(int(k) for k in generator.integers(1, n_ancillas + 1, size=total))

    else:
        if counts is None or len(counts) == 0:
            raise InvalidCountsError("biased schedule needs a non-empty counts vector")
        if len(counts) != n_ancillas:
            raise InvalidCountsError(
                f"counts has {len(counts)} entries for {n_ancillas} ancillas"
            )
        if any(int(c) < 0 for c in counts):
            raise InvalidCountsError(f"Collision counts must be non-negative, got {list(counts)}")
        sequence = tuple(k for k, c in enumerate(counts, start=1) for _ in range(int(c)))

    logger.debug(f"Built {kind.value} schedule: {len(sequence)} collisions over {n_ancillas} ancillas")
    return CollisionSchedule(sequence, n_ancillas, kind, seed)


def run_schedule(
    state: PureState,
    sched: CollisionSchedule,
    u,
    observer: Optional[Callable[[int, int, PureState], None]] = None,
) -> PureState:
    """Apply the collision unitary between the system and each scheduled ancilla in order.

    ``observer(step, ancilla, state)`` is called after every collision.
    """
    if sched.n_ancillas > state.n_ancillas:
        raise InvalidCountsError(
            f"Schedule addresses {sched.n_ancillas} ancillas, state has {state.n_ancillas}"
        )
    for step, k in enumerate(sched.sequence, start=1):
        state = apply_two_qubit_unitary(state, u, 0, k)
        if observer is not None:
            observer(step, k, state)
    return state


def dephase(state: PureState, angles: Sequence[float]) -> PureState:
    """One Z collision of cumulative angle g_k = J_z t with every ancilla k.

    Z collisions commute, so this produces the same state as any schedule
    whose collisions add up to the given angles.
    """
    if len(angles) != state.n_ancillas:
        raise InvalidCountsError(
            f"Got {len(angles)} angles for {state.n_ancillas} ancillas"
        )
    for k, g in enumerate(angles, start=1):
        u = collision_unitary(CouplingSpec.z(float(g), 1.0))
        state = apply_two_qubit_unitary(state, u, 0, k)
    return state
