"""Core result models for the collision model simulator."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, List, Optional, Tuple

import pandas as pd

from .exceptions import UndefinedNormalizationError

# Ī is undefined below this system entropy (bits)
UNDEFINED_ENTROPY_THRESHOLD = 1e-12

FRACTION_COLUMNS = ["r", "f", "I_bits", "I_bar", "I_bar_std", "n_samples", "n_excluded"]
SERIES_COLUMNS = ["n", "I_bits", "S_S_bits", "system_coherence", "ancilla_coherence"]


@dataclass(frozen=True)
class InformationPoint:
    """Entropies and mutual information between the system and one environment fraction."""
    system_entropy: float
    fraction_entropy: float
    joint_entropy: float

    @property
    def mutual_information(self) -> float:
        return self.system_entropy + self.fraction_entropy - self.joint_entropy

    @property
    def normalized(self) -> Optional[float]:
        """MI per unit system entropy, or None when the system has not decohered."""
        if self.system_entropy < UNDEFINED_ENTROPY_THRESHOLD:
            return None
        return self.mutual_information / self.system_entropy

    @property
    def defined(self) -> bool:
        return self.normalized is not None

    def require_normalized(self) -> float:
        """Return Ī, raising UndefinedNormalizationError when it is undefined."""
        value = self.normalized
        if value is None:
            raise UndefinedNormalizationError(self.system_entropy, self.mutual_information)
        return value

    def as_row(self) -> Dict[str, Optional[float]]:
        return {
            "S_S": self.system_entropy,
            "S_Ef": self.fraction_entropy,
            "S_SEf": self.joint_entropy,
            "I": self.mutual_information,
            "I_bar": self.normalized,
        }


class AveragingMode(str, Enum):
    EXACT_ALL_SUBSETS = "exact"
    SAMPLED = "sampled"
    SINGLE_SUBSET = "single"


@dataclass(frozen=True)
class Averaging:
    """How environment fractions of each size r are chosen and averaged."""
    mode: AveragingMode
    samples: Optional[int] = None
    seed: Optional[int] = None
    subsets: Optional[Tuple[Tuple[int, ...], ...]] = None

    @classmethod
    def exact(cls) -> "Averaging":
        return cls(AveragingMode.EXACT_ALL_SUBSETS)

    @classmethod
    def sampled(cls, samples: int, seed: Optional[int] = None) -> "Averaging":
        return cls(AveragingMode.SAMPLED, samples=samples, seed=seed)

    @classmethod
    def single(cls, subsets) -> "Averaging":
        """One explicit fraction per size r."""
        return cls(
            AveragingMode.SINGLE_SUBSET,
            subsets=tuple(tuple(sorted(s)) for s in subsets),
        )

    @classmethod
    def prefixes(cls, n_env: int) -> "Averaging":
        """Contiguous fractions {E_1..E_r} for r = 1..N."""
        return cls.single(tuple(range(1, r + 1)) for r in range(1, n_env + 1))

    def describe(self) -> str:
        if self.mode is AveragingMode.SAMPLED:
            return f"sampled({self.samples}, seed={self.seed})"
        if self.mode is AveragingMode.SINGLE_SUBSET:
            return "single_subset"
        return "exact_all_subsets"


@dataclass(frozen=True)
class FractionPoint:
    """Averaged information content of the fractions of one size r."""
    r: int
    f: float
    mutual_information: float
    normalized: Optional[float]
    normalized_std: Optional[float]
    n_samples: int
    n_excluded: int = 0

    @property
    def defined(self) -> bool:
        return self.normalized is not None


@dataclass
class FractionCurve:
    """Ī as a function of the environment fraction f = r/N."""
    n_env: int
    points: List[FractionPoint]
    averaging: Averaging
    label: str = ""

    def __post_init__(self):
        rs = [p.r for p in self.points]
        if any(b <= a for a, b in zip(rs, rs[1:])):
            raise ValueError("Fraction sizes must be strictly increasing")
        if any(r < 1 or r > self.n_env for r in rs):
            raise ValueError(f"Fraction sizes must lie in [1, {self.n_env}]")

    def point(self, r: int) -> FractionPoint:
        for p in self.points:
            if p.r == r:
                return p
        raise KeyError(r)

    def normalized(self, r: int) -> Optional[float]:
        return self.point(r).normalized

    @property
    def total_excluded(self) -> int:
        return sum(p.n_excluded for p in self.points)

    def to_dataframe(self) -> pd.DataFrame:
        """Tabular form used by the CSV writers."""
        rows = [
            {
                "r": p.r,
                "f": p.f,
                "I_bits": p.mutual_information,
                "I_bar": p.normalized,
                "I_bar_std": p.normalized_std,
                "n_samples": p.n_samples,
                "n_excluded": p.n_excluded,
            }
            for p in self.points
        ]
        return pd.DataFrame(rows, columns=FRACTION_COLUMNS)


@dataclass
class RunManifest:
    """Record of one simulate invocation."""
    config: Dict[str, Any]
    seeds: List[int]
    version: str
    wall_time: float
    outputs: List[str] = field(default_factory=list)
    exclusions: Dict[str, int] = field(default_factory=dict)
    angles: Dict[str, Any] = field(default_factory=dict)
    averaging: Dict[str, str] = field(default_factory=dict)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "version": self.version,
            "config": self.config,
            "seeds": self.seeds,
            "wall_time_s": self.wall_time,
            "outputs": self.outputs,
            "exclusions": self.exclusions,
            "angles": self.angles,
            "averaging": self.averaging,
        }
