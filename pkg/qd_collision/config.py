"""
Configuration settings for collision model experiments
"""

import json
import os
from dataclasses import asdict, dataclass, field, replace
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Union

from .collision import MAX_ANCILLAS, PRESETS, CouplingSpec, Interaction, ScheduleKind
from .exceptions import CapExceededError, ConfigError, TooManySubsetsError
from .models import Averaging, AveragingMode

EXPERIMENTS = ("fig1", "fig2", "fig3a", "fig3b", "custom")
SYSTEM_STATES = ("plus", "haar", "fixed")
MAX_EXACT_SUBSET_ENV = 12

THREADS_ENV_VAR = "DARWIN_THREADS"

# JSON kinds accepted per key
_INT, _FLOAT, _STR, _BOOL = "int", "float", "str", "bool"
_INT_LIST, _STR_LIST, _AMPLITUDE = "int_list", "str_list", "amplitude"


@dataclass
class ExperimentConfig:
    """Flat experiment description; one JSON key per field"""
    experiment: str = "custom"
    n_env: List[int] = field(default_factory=lambda: [6])
    interactions: List[str] = field(default_factory=lambda: ["z"])
    presets: List[str] = field(default_factory=lambda: ["weak"])
    # explicit coupling, overrides interactions/presets when t is set
    jx: float = 0.0
    jy: float = 0.0
    jz: float = 0.0
    t: Optional[float] = None
    schedule: str = ScheduleKind.RANDOM_UNIFORM.value
    collisions: int = 250
    collisions_per_ancilla: Optional[int] = None
    counts: Optional[List[int]] = None
    runs: int = 1
    seed: int = 0
    system_state: str = "haar"
    alpha: Any = None
    beta: Any = None
    averaging: str = AveragingMode.EXACT_ALL_SUBSETS.value
    samples: int = 20
    n_max: int = 62
    jz_t: float = 0.025
    n_set: List[int] = field(default_factory=lambda: [5, 15, 31, 55])
    special_n: int = 31
    other_n: int = 60
    verify: bool = False
    out: str = "results"

    @classmethod
    def from_dict(cls, data: Mapping[str, Any], source: Optional[str] = None) -> "ExperimentConfig":
        """Overlay ``data`` on the defaults of its experiment."""
        if not isinstance(data, Mapping):
            raise ConfigError("config", "top level must be a JSON object", source)
        experiment = data.get("experiment", "custom")
        if experiment not in EXPERIMENTS:
            raise ConfigError(
                "experiment", f"'{experiment}' is not one of {', '.join(EXPERIMENTS)}", source
            )
        values = {}
        for key, raw in data.items():
            if key not in _FIELD_KINDS:
                raise ConfigError(key, "unknown key", source)
            values[key] = _coerce(key, raw, source)
        config = replace(DEFAULT_CONFIGS[experiment], **values)
        config.validate(source)
        return config

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    def validate(self, source: Optional[str] = None) -> None:
        """Raise ConfigError for bad values and CapExceededError for cap violations."""
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"'{self.experiment}' is not a known experiment", source)
        if not self.n_env or any(n < 1 for n in self.n_env):
            raise ConfigError("n_env", "every environment size must be at least 1", source)
        for name in self.interactions:
            if name not in {i.value for i in Interaction}:
                raise ConfigError("interactions", f"unknown interaction '{name}'", source)
        for name in self.presets:
            if name not in PRESETS:
                raise ConfigError("presets", f"unknown preset '{name}'", source)
        if self.schedule not in {k.value for k in ScheduleKind}:
            raise ConfigError("schedule", f"unknown schedule kind '{self.schedule}'", source)
        if self.averaging not in {m.value for m in AveragingMode}:
            raise ConfigError("averaging", f"unknown averaging '{self.averaging}'", source)
        if self.system_state not in SYSTEM_STATES:
            raise ConfigError("system_state", f"unknown system state '{self.system_state}'", source)
        if self.runs < 1:
            raise ConfigError("runs", "at least one run is required", source)
        if self.collisions < 0:
            raise ConfigError("collisions", "must be non-negative", source)
        if self.samples < 1:
            raise ConfigError("samples", "must be at least 1", source)
        if self.n_max < 1:
            raise ConfigError("n_max", "must be at least 1", source)
        if self.t is not None and self.t < 0:
            raise ConfigError("t", "collision duration must be non-negative", source)
        if self.system_state == "fixed":
            self.initial_amplitudes(source)
        if self.experiment in ("fig2", "fig3a", "fig3b") and self.system_state == "haar":
            raise ConfigError(
                "system_state", "closed-form experiments need a plus or fixed system state", source
            )

        if self.experiment in ("fig1", "custom"):
            if self.schedule == ScheduleKind.BIASED.value:
                if len(self.n_env) != 1:
                    raise ConfigError("n_env", "biased schedules take a single N", source)
                if not self.counts or len(self.counts) != self.n_env[0]:
                    raise ConfigError("counts", "biased schedules need one count per ancilla", source)
                if any(c < 0 for c in self.counts):
                    raise ConfigError("counts", "collision counts must be non-negative", source)
            if self.schedule == ScheduleKind.ROUND_ROBIN.value and (
                self.collisions_per_ancilla is None or self.collisions_per_ancilla < 0
            ):
                raise ConfigError(
                    "collisions_per_ancilla", "round_robin needs a non-negative count", source
                )
            for n in self.n_env:
                if n > MAX_ANCILLAS:
                    raise CapExceededError(
                        "n_env", n, MAX_ANCILLAS, "statevector experiments are capped"
                    )
                exact = self.averaging == AveragingMode.EXACT_ALL_SUBSETS.value
                if exact and n > MAX_EXACT_SUBSET_ENV:
                    raise TooManySubsetsError(n, MAX_EXACT_SUBSET_ENV)
        if self.experiment in ("fig3a", "fig3b") and len(self.n_env) != 1:
            raise ConfigError("n_env", f"{self.experiment} takes a single N", source)
        # fig3b averages over every fraction of its single N
        if self.experiment == "fig3b" and self.n_env[0] > MAX_EXACT_SUBSET_ENV:
            raise TooManySubsetsError(self.n_env[0], MAX_EXACT_SUBSET_ENV)

    def couplings(self) -> Dict[str, CouplingSpec]:
        """Label -> coupling for every interaction/preset pair, or the explicit one."""
        if self.t is not None:
            return {"custom": CouplingSpec(self.jx, self.jy, self.jz, self.t)}
        return {
            f"{interaction}_{preset}": CouplingSpec.from_preset(interaction, preset)
            for interaction in self.interactions
            for preset in self.presets
        }

    def averaging_policy(self, n_env: int) -> Averaging:
        mode = AveragingMode(self.averaging)
        if mode is AveragingMode.SAMPLED:
            return Averaging.sampled(self.samples, self.seed)
        if mode is AveragingMode.SINGLE_SUBSET:
            return Averaging.prefixes(n_env)
        return Averaging.exact()

    def initial_amplitudes(self, source: Optional[str] = None):
        """(alpha, beta) of a fixed system state."""
        if self.alpha is None or self.beta is None:
            raise ConfigError("alpha", "a fixed system state needs alpha and beta", source)
        alpha, beta = _to_complex("alpha", self.alpha, source), _to_complex("beta", self.beta, source)
        if abs(abs(alpha) ** 2 + abs(beta) ** 2 - 1.0) > 1e-12:
            raise ConfigError("alpha", "|alpha|^2 + |beta|^2 must equal 1", source)
        return alpha, beta


_FIELD_KINDS = {
    "experiment": _STR,
    "n_env": _INT_LIST,
    "interactions": _STR_LIST,
    "presets": _STR_LIST,
    "jx": _FLOAT,
    "jy": _FLOAT,
    "jz": _FLOAT,
    "t": _FLOAT,
    "schedule": _STR,
    "collisions": _INT,
    "collisions_per_ancilla": _INT,
    "counts": _INT_LIST,
    "runs": _INT,
    "seed": _INT,
    "system_state": _STR,
    "alpha": _AMPLITUDE,
    "beta": _AMPLITUDE,
    "averaging": _STR,
    "samples": _INT,
    "n_max": _INT,
    "jz_t": _FLOAT,
    "n_set": _INT_LIST,
    "special_n": _INT,
    "other_n": _INT,
    "verify": _BOOL,
    "out": _STR,
}


def _is_int(value) -> bool:
    return isinstance(value, int) and not isinstance(value, bool)


def _is_number(value) -> bool:
    return isinstance(value, (int, float)) and not isinstance(value, bool)


def _coerce(key: str, raw: Any, source: Optional[str]):
    kind = _FIELD_KINDS[key]
    if raw is None and key in ("t", "collisions_per_ancilla", "counts", "alpha", "beta"):
        return None
    if kind == _INT and _is_int(raw):
        return raw
    if kind == _FLOAT and _is_number(raw):
        return float(raw)
    if kind == _STR and isinstance(raw, str):
        return raw
    if kind == _BOOL and isinstance(raw, bool):
        return raw
    if kind == _INT_LIST:
        if _is_int(raw):
            return [raw]
        if isinstance(raw, list) and all(_is_int(v) for v in raw):
            return list(raw)
    if kind == _STR_LIST:
        if isinstance(raw, str):
            return [raw]
        if isinstance(raw, list) and all(isinstance(v, str) for v in raw):
            return list(raw)
    if kind == _AMPLITUDE:
        _to_complex(key, raw, source)
        return raw
    raise ConfigError(key, f"expected {kind.replace('_', ' ')}, got {raw!r}", source)


def _to_complex(key: str, raw: Any, source: Optional[str]) -> complex:
    """A real number or a [real, imag] pair."""
    if _is_number(raw):
        return complex(raw)
    if isinstance(raw, list) and len(raw) == 2 and all(_is_number(v) for v in raw):
        return complex(raw[0], raw[1])
    raise ConfigError(key, f"expected a number or [real, imag] pair, got {raw!r}", source)


DEFAULT_CONFIG = ExperimentConfig()

# Random schedules over the full interaction/coupling grid
DEFAULT_FIG1_CONFIG = ExperimentConfig(
    experiment="fig1",
    n_env=[6, 7, 8, 9],
    interactions=["z", "xx"],
    presets=["weak", "strong"],
    collisions=250,
    runs=50,
    seed=0,
    system_state="haar",
)

DEFAULT_FIG2_CONFIG = ExperimentConfig(
    experiment="fig2",
    n_env=[6, 10, 100, 1000],
    n_max=62,
    jz_t=0.025,
    system_state="plus",
)

DEFAULT_FIG3A_CONFIG = ExperimentConfig(
    experiment="fig3a",
    n_env=[100],
    n_set=[5, 15, 31, 55],
    jz_t=0.025,
    system_state="plus",
)

DEFAULT_FIG3B_CONFIG = ExperimentConfig(
    experiment="fig3b",
    n_env=[6],
    special_n=31,
    other_n=60,
    jz_t=0.025,
    system_state="plus",
)

DEFAULT_CONFIGS = {
    "custom": DEFAULT_CONFIG,
    "fig1": DEFAULT_FIG1_CONFIG,
    "fig2": DEFAULT_FIG2_CONFIG,
    "fig3a": DEFAULT_FIG3A_CONFIG,
    "fig3b": DEFAULT_FIG3B_CONFIG,
}


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    """Read a JSON config file, or the config echo of a run manifest."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ConfigError("config", f"cannot read file: {e}", str(path))
    try:
        data = json.loads(text)
    except json.JSONDecodeError as e:
        raise ConfigError("config", f"invalid JSON at line {e.lineno}: {e.msg}", str(path))
    if isinstance(data, dict) and "config" in data and "outputs" in data:
        data = data["config"]
    return ExperimentConfig.from_dict(data, str(path))


def resolve_thread_count(environ: Optional[Mapping[str, str]] = None) -> int:
    """Worker cap from DARWIN_THREADS; 0 or unset means one per CPU."""
    environ = os.environ if environ is None else environ
    raw = environ.get(THREADS_ENV_VAR, "0").strip() or "0"
    try:
        threads = int(raw)
    except ValueError:
        raise ConfigError(THREADS_ENV_VAR, f"expected an integer, got {raw!r}")
    if threads < 0:
        raise ConfigError(THREADS_ENV_VAR, f"must be non-negative, got {threads}")
    return threads or (os.cpu_count() or 1)
