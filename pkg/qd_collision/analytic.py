"""Closed-form dephasing model.

After any sequence of Z collisions the global state is

    alpha |up>_S (x)_k |Phi+_k>  +  beta |down>_S (x)_k |Phi-_k>

with <Phi-_k|Phi+_k> = cos(2 g_k), g_k the cumulative J_z t of ancilla k.
Every reduced state of interest then has rank at most two, and its spectrum
depends only on the populations (p, q) and the product of branch overlaps
over the relevant ancillas. Cost is O(N) per evaluation, so N = 1000 is cheap.
"""

import logging
import math
from dataclasses import dataclass
from enum import Enum
from typing import Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .collision import CollisionSchedule, CouplingSpec, InitialSystemState
from .exceptions import (
    EmptySubsetError,
    InvalidCouplingError,
    InvalidParameterError,
    InvalidSubsetError,
    InvalidWeightsError,
    OverlapOutOfRangeError,
)
from .models import SERIES_COLUMNS, InformationPoint
from .qcore import QubitSubset, Spectrum, von_neumann_entropy

logger = logging.getLogger(__name__)

WEIGHT_TOL = 1e-9
OVERLAP_TOL = 1e-12


@dataclass(frozen=True, eq=False)
class CumulativeCouplings:
    """Per-ancilla accumulated dephasing angle g_k in radians; entry k-1 is ancilla k."""
    g: np.ndarray

    def __post_init__(self):
        g = np.asarray(self.g, dtype=np.float64).reshape(-1)
        if g.size < 1:
            raise InvalidParameterError("Cumulative couplings need at least one ancilla")
        if not np.all(np.isfinite(g)):
            raise InvalidParameterError(f"Cumulative couplings must be finite, got {g}")
        object.__setattr__(self, "g", g)

    @classmethod
    def uniform(cls, n_env: int, g: float) -> "CumulativeCouplings":
        return cls(np.full(n_env, float(g)))

    @classmethod
    def from_counts(cls, counts: Sequence[int], jz_t: float) -> "CumulativeCouplings":
        return cls(np.asarray(counts, dtype=np.float64) * jz_t)

    @classmethod
    def from_schedule(
        cls, schedule: CollisionSchedule, coupling: CouplingSpec
    ) -> "CumulativeCouplings":
        if not coupling.is_dephasing:
            raise InvalidCouplingError(
                "Closed forms exist only for the dephasing interaction",
                f"Got jx={coupling.jx}, jy={coupling.jy}",
            )
        return cls.from_counts(schedule.counts_per_ancilla(), coupling.dephasing_angle)

    @property
    def n_env(self) -> int:
        return self.g.size

    def branch_overlaps(self) -> np.ndarray:
        """cos(2 g_k) for every ancilla."""
        return np.cos(2.0 * self.g)


@dataclass(frozen=True)
class SystemWeights:
    """Populations p = |alpha|^2 and q = |beta|^2 of the initial system state."""
    p: float
    q: float

    def __post_init__(self):
        if (
            not (math.isfinite(self.p) and math.isfinite(self.q))
            or self.p < -WEIGHT_TOL
            or self.q < -WEIGHT_TOL
            or abs(self.p + self.q - 1.0) > WEIGHT_TOL
        ):
            raise InvalidWeightsError(self.p, self.q)

    @classmethod
    def balanced(cls) -> "SystemWeights":
        return cls(0.5, 0.5)

    @classmethod
    def from_state(cls, state: InitialSystemState) -> "SystemWeights":
        p, q = state.populations
        return cls(p, q)


class OverlapRole(str, Enum):
    SYSTEM = "system"
    FRACTION = "fraction"
    JOINT = "joint"


def two_level_spectrum(p: float, q: float, c: float) -> Spectrum:
    """Spectrum of [[p, sqrt(pq) c], [sqrt(pq) c, q]]."""
    SystemWeights(p, q)
    if not math.isfinite(c) or abs(c) > 1.0 + OVERLAP_TOL:
        raise OverlapOutOfRangeError(c)
    c = min(abs(c), 1.0)
    radius = math.sqrt((p - q) ** 2 + 4.0 * p * q * c * c)
    radius = min(radius, 1.0)
    return Spectrum(np.array([(1.0 + radius) / 2.0, (1.0 - radius) / 2.0]))


def _check_fraction(gs: CumulativeCouplings, subset: QubitSubset) -> None:
    outside = [k for k in subset if not 1 <= k <= gs.n_env]
    if outside:
        raise InvalidSubsetError(
            f"Ancilla labels must lie in [1, {gs.n_env}]",
            f"Offending labels: {outside}",
        )


def fraction_overlap(
    gs: CumulativeCouplings, subset: Optional[QubitSubset], role
) -> float:
    """Product of cos(2 g_k) over the ancillas that distinguish the two branches.

    system: all ancillas; fraction: the subset; joint: the ancillas outside it.
    """
    role = OverlapRole(role)
    overlaps = gs.branch_overlaps()
    if role is OverlapRole.SYSTEM:
        return float(np.prod(overlaps))
    if subset is None:
        raise InvalidSubsetError(f"The {role.value} overlap needs an ancilla subset")
    _check_fraction(gs, subset)
    mask = np.zeros(gs.n_env, dtype=bool)
    mask[np.asarray([k - 1 for k in subset], dtype=np.intp)] = True
    if role is OverlapRole.JOINT:
        mask = ~mask
    return float(np.prod(overlaps[mask]))


def information_point(
    gs: CumulativeCouplings, subset: QubitSubset, w: Optional[SystemWeights] = None
) -> InformationPoint:
    """Entropies of S, E_f and S E_f from the three rank-2 spectra.

    Args:
        gs: Cumulative dephasing angle of every ancilla
        subset: Environment fraction, labels 1..N
        w: System populations (default: balanced)

    Returns:
        InformationPoint; its normalized value is None when S_S < 1e-12
    """
    if len(subset) == 0:
        raise EmptySubsetError("environment fraction")
    w = w or SystemWeights.balanced()
    return InformationPoint(
        system_entropy=von_neumann_entropy(
            two_level_spectrum(w.p, w.q, fraction_overlap(gs, subset, OverlapRole.SYSTEM))
        ),
        fraction_entropy=von_neumann_entropy(
            two_level_spectrum(w.p, w.q, fraction_overlap(gs, subset, OverlapRole.FRACTION))
        ),
        joint_entropy=von_neumann_entropy(
            two_level_spectrum(w.p, w.q, fraction_overlap(gs, subset, OverlapRole.JOINT))
        ),
    )


def dephasing_mutual_information(
    gs: CumulativeCouplings, subset: QubitSubset, w: Optional[SystemWeights] = None
) -> Tuple[float, float, float]:
    """(I, S_S, I/S_S) in bits; raises UndefinedNormalizationError when S_S < 1e-12."""
    point = information_point(gs, subset, w)
    return point.mutual_information, point.system_entropy, point.require_normalized()


def system_coherence(gs: CumulativeCouplings, w: Optional[SystemWeights] = None) -> float:
    """|rho_S^{1,2}| = sqrt(pq) prod_k |cos 2 g_k|."""
    w = w or SystemWeights.balanced()
    return math.sqrt(max(w.p * w.q, 0.0)) * float(np.prod(np.abs(gs.branch_overlaps())))


def ancilla_coherence(g_k: float, w: Optional[SystemWeights] = None) -> float:
    """|rho_{E_k}^{1,2}| = |p e^{-2ig} + q e^{2ig}| / 2."""
    w = w or SystemWeights.balanced()
    two_g = 2.0 * g_k
    return 0.5 * math.sqrt(math.cos(two_g) ** 2 + ((w.p - w.q) * math.sin(two_g)) ** 2)


def single_ancilla_mi_series(
    n_env: int,
    jz_t_per_collision: float,
    n_max: int,
    w: Optional[SystemWeights] = None,
) -> pd.DataFrame:
    """MI with one ancilla, system entropy and both coherences after n uniform rounds.

    Row n = 0 is the initial product state.

    Args:
        n_env: Number of ancillas (at least 2)
        jz_t_per_collision: Dephasing angle of one collision
        n_max: Last round
        w: System populations (default: balanced)
    """
    if n_env < 2:
        raise InvalidParameterError(f"The series needs N >= 2, got {n_env}")
    if n_max < 1:
        raise InvalidParameterError(f"n_max must be at least 1, got {n_max}")
    w = w or SystemWeights.balanced()
    single = QubitSubset((1,))
    rows = []
    for n in range(n_max + 1):
        gs = CumulativeCouplings.uniform(n_env, n * jz_t_per_collision)
        point = information_point(gs, single, w)
        rows.append(
            {
                "n": n,
                "I_bits": point.mutual_information,
                "S_S_bits": point.system_entropy,
                "system_coherence": system_coherence(gs, w),
                "ancilla_coherence": ancilla_coherence(float(gs.g[0]), w),
            }
        )
    logger.debug(f"Series for N={n_env}: {n_max + 1} points at J_z t={jz_t_per_collision}")
    return pd.DataFrame(rows, columns=SERIES_COLUMNS)
