"""Named experiments: Ī versus environment fraction, time series, biased couplings.

Ī is computed per subset and per run, then averaged (ratio first). Samples
whose system entropy is below the undefined threshold are left out of the Ī
average and counted in ``n_excluded``; they still enter the MI average.
"""

import itertools
import logging
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from typing import Callable, Dict, List, Optional, Sequence, Tuple

import numpy as np
import pandas as pd

from .analytic import (
    CumulativeCouplings,
    SystemWeights,
    information_point,
    single_ancilla_mi_series,
)
from .collision import (
    CouplingSpec,
    InitialSystemState,
    ScheduleKind,
    build_initial_state,
    collision_unitary,
    dephase,
    make_schedule,
    run_schedule,
)
from .config import MAX_EXACT_SUBSET_ENV, ExperimentConfig
from .exceptions import (
    InvalidParameterError,
    OracleMismatchError,
    TooManySubsetsError,
    UndefinedPointsError,
)
from .models import Averaging, AveragingMode, FractionCurve, FractionPoint, InformationPoint
from .qcore import (
    SYSTEM,
    PureState,
    QubitSubset,
    offdiagonal_coherence,
    reduced_density,
    subset_information,
)

logger = logging.getLogger(__name__)

ORACLE_TOL = 1e-9

SubsetsByFraction = Dict[int, List[QubitSubset]]
SamplesByFraction = Dict[int, List[InformationPoint]]


@dataclass(frozen=True)
class ScheduleSpec:
    """Schedule parameters shared by every run of an ensemble."""
    kind: ScheduleKind = ScheduleKind.RANDOM_UNIFORM
    total: Optional[int] = 250
    collisions_per_ancilla: Optional[int] = None
    counts: Optional[Tuple[int, ...]] = None

    def build(self, n_env: int, rng: np.random.Generator):
        return make_schedule(
            self.kind,
            n_env,
            collisions_per_ancilla=self.collisions_per_ancilla,
            total=self.total,
            counts=self.counts,
            rng=rng,
        )


@dataclass(frozen=True)
class SystemStatePolicy:
    """plus, fixed(alpha, beta) or haar (drawn from the run's generator)."""
    kind: str = "haar"
    alpha: complex = 1.0
    beta: complex = 0.0

    @classmethod
    def fixed(cls, alpha: complex, beta: complex) -> "SystemStatePolicy":
        return cls("fixed", alpha, beta)

    def draw(self, rng: np.random.Generator) -> InitialSystemState:
        if self.kind == "haar":
            return InitialSystemState.haar_random(rng)
        if self.kind == "plus":
            return InitialSystemState.plus()
        return InitialSystemState(complex(self.alpha), complex(self.beta))


@dataclass
class Fig3bResult:
    per_position: Dict[int, FractionCurve]
    averaged: FractionCurve


def fraction_subsets(n_env: int, averaging: Averaging) -> SubsetsByFraction:
    """Ancilla subsets (labels 1..N) to evaluate for every fraction size r."""
    ancillas = range(1, n_env + 1)
    subsets: SubsetsByFraction = {}

    if averaging.mode is AveragingMode.EXACT_ALL_SUBSETS:
        if n_env > MAX_EXACT_SUBSET_ENV:
            raise TooManySubsetsError(n_env, MAX_EXACT_SUBSET_ENV)
        for r in range(1, n_env + 1):
            subsets[r] = [QubitSubset(c) for c in itertools.combinations(ancillas, r)]

    elif averaging.mode is AveragingMode.SAMPLED:
        if not averaging.samples or averaging.samples < 1:
            raise InvalidParameterError("Sampled averaging needs at least one sample per size")
        for r in range(1, n_env + 1):
            if math.comb(n_env, r) <= averaging.samples:
                subsets[r] = [QubitSubset(c) for c in itertools.combinations(ancillas, r)]
                continue
            seed = None if averaging.seed is None else [averaging.seed, r]
            rng = np.random.default_rng(seed)
            subsets[r] = [
                QubitSubset(tuple(rng.choice(n_env, size=r, replace=False) + 1))
                for _ in range(averaging.samples)
            ]

    else:
        for subset in averaging.subsets or ():
            if not subset or max(subset) > n_env or min(subset) < 1:
                raise InvalidParameterError(
                    f"Subset {list(subset)} is not a fraction of a {n_env}-ancilla environment"
                )
            subsets.setdefault(len(subset), []).append(QubitSubset(subset))
        subsets = dict(sorted(subsets.items()))

    return subsets


def _aggregate(
    n_env: int, samples: SamplesByFraction, averaging: Averaging, label: str
) -> FractionCurve:
    points = []
    for r, group in samples.items():
        normalized = [p.normalized for p in group if p.defined]
        excluded = len(group) - len(normalized)
        points.append(
            FractionPoint(
                r=r,
                f=r / n_env,
                mutual_information=float(np.mean([p.mutual_information for p in group])),
                normalized=float(np.mean(normalized)) if normalized else None,
                normalized_std=float(np.std(normalized)) if normalized else None,
                n_samples=len(group),
                n_excluded=excluded,
            )
        )
    curve = FractionCurve(n_env, points, averaging, label)
    if curve.total_excluded:
        logger.warning(f"{label or 'curve'}: {curve.total_excluded} undefined samples excluded")
    return curve


def _evaluate(
    subsets: SubsetsByFraction, evaluate: Callable[[QubitSubset], InformationPoint]
) -> SamplesByFraction:
    return {r: [evaluate(s) for s in group] for r, group in subsets.items()}


def mi_vs_fraction(
    state: PureState, averaging: Optional[Averaging] = None, label: str = ""
) -> FractionCurve:
    """Ī(f) of a statevector, averaging over fractions as the policy says."""
    averaging = averaging or Averaging.exact()
    subsets = fraction_subsets(state.n_ancillas, averaging)
    samples = _evaluate(subsets, lambda s: subset_information(state, s))
    return _aggregate(state.n_ancillas, samples, averaging, label)


def analytic_fraction_curve(
    gs: CumulativeCouplings,
    w: Optional[SystemWeights] = None,
    averaging: Optional[Averaging] = None,
    label: str = "",
) -> FractionCurve:
    """Closed-form counterpart of mi_vs_fraction for a dephased environment."""
    averaging = averaging or Averaging.prefixes(gs.n_env)
    subsets = fraction_subsets(gs.n_env, averaging)
    samples = _evaluate(subsets, lambda s: information_point(gs, s, w))
    return _aggregate(gs.n_env, samples, averaging, label)


def _ordered_map(fn, items: Sequence, threads: int) -> list:
    """map() over a thread pool; results come back in input order."""
    if threads <= 1 or len(items) <= 1:
        return [fn(item) for item in items]
    with ThreadPoolExecutor(max_workers=min(threads, len(items))) as pool:
        return list(pool.map(fn, items))


def ensemble_fraction_curve(
    n_env: int,
    coupling: CouplingSpec,
    schedule: ScheduleSpec,
    runs: int,
    seed: Optional[int],
    system_state: SystemStatePolicy,
    averaging: Optional[Averaging] = None,
    threads: int = 1,
    label: str = "",
) -> FractionCurve:
    """Pool per-subset samples of ``runs`` independent statevector runs into one curve.

    Run i draws its system state and schedule from child i of
    SeedSequence(seed), so the result does not depend on thread scheduling.

    Args:
        n_env: Number of ancillas
        coupling: Coupling used for every collision
        schedule: How each run builds its collision schedule
        runs: Independent runs to pool
        seed: Master seed; None draws fresh entropy
        system_state: Initial system state policy
        averaging: Fraction averaging policy (default: exact)
        threads: Worker threads for the runs
        label: Curve label used in logs and file names
    """
    if runs < 1:
        raise InvalidParameterError(f"At least one run is required, got {runs}")
    averaging = averaging or Averaging.exact()
    subsets = fraction_subsets(n_env, averaging)
    u = collision_unitary(coupling)
    children = np.random.SeedSequence(seed).spawn(runs)

    def one_run(child: np.random.SeedSequence) -> SamplesByFraction:
        rng = np.random.default_rng(child)
        system = system_state.draw(rng)
        sched = schedule.build(n_env, rng)
        state = run_schedule(build_initial_state(system, n_env), sched, u)
        return _evaluate(subsets, lambda s: subset_information(state, s))

    logger.info(f"{label or 'ensemble'}: {runs} runs, N={n_env}, {len(subsets)} fraction sizes")
    pooled: SamplesByFraction = {r: [] for r in subsets}
    for run_samples in _ordered_map(one_run, children, threads):
        for r, group in run_samples.items():
            pooled[r].extend(group)
    return _aggregate(n_env, pooled, averaging, label)


def system_state_policy(cfg: ExperimentConfig) -> SystemStatePolicy:
    if cfg.system_state == "fixed":
        alpha, beta = cfg.initial_amplitudes()
        return SystemStatePolicy.fixed(alpha, beta)
    return SystemStatePolicy(cfg.system_state)


def schedule_spec(cfg: ExperimentConfig) -> ScheduleSpec:
    counts = tuple(cfg.counts) if cfg.counts else None
    return ScheduleSpec(
        kind=ScheduleKind(cfg.schedule),
        total=cfg.collisions,
        collisions_per_ancilla=cfg.collisions_per_ancilla,
        counts=counts,
    )


def _ensemble_grid(cfg: ExperimentConfig, threads: int) -> Dict[str, FractionCurve]:
    curves = {}
    policy = system_state_policy(cfg)
    spec = schedule_spec(cfg)
    for n_env in cfg.n_env:
        for name, coupling in cfg.couplings().items():
            label = f"N{n_env}_{name}"
            curves[label] = ensemble_fraction_curve(
                n_env,
                coupling,
                spec,
                cfg.runs,
                cfg.seed,
                policy,
                cfg.averaging_policy(n_env),
                threads,
                label,
            )
    return curves


def fig1_experiment(cfg: ExperimentConfig, threads: int = 1) -> Dict[str, FractionCurve]:
    """Random-schedule Ī(f) curves over N x interaction x coupling strength.

    Keys look like ``N6_z_weak``.
    """
    return _ensemble_grid(cfg, threads)


def _weights_state(w: SystemWeights) -> InitialSystemState:
    return InitialSystemState(complex(math.sqrt(w.p)), complex(math.sqrt(max(w.q, 0.0))))


def _statevector_series(n_env: int, jz_t: float, n_max: int, w: SystemWeights) -> pd.DataFrame:
    initial = build_initial_state(_weights_state(w), n_env)
    first = QubitSubset((1,))
    rows = []
    for n in range(n_max + 1):
        state = dephase(initial, [n * jz_t] * n_env)
        point = subset_information(state, first)
        rows.append(
            {
                "n": n,
                "I_bits": point.mutual_information,
                "S_S_bits": point.system_entropy,
                "system_coherence": offdiagonal_coherence(reduced_density(state, SYSTEM)),
                "ancilla_coherence": offdiagonal_coherence(reduced_density(state, first)),
            }
        )
    return pd.DataFrame(rows, columns=list(rows[0]))


def fig2_experiment(
    n_list: Sequence[int] = (6, 10, 100, 1000),
    n_max: int = 62,
    jz_t: float = 0.025,
    w: Optional[SystemWeights] = None,
    verify: bool = False,
    verify_limit: int = 8,
) -> Dict[int, pd.DataFrame]:
    """Single-ancilla MI, system entropy and coherences versus collisions per ancilla.

    With ``verify`` the closed-form series of every N <= verify_limit is
    recomputed from the statevector and must agree within 1e-9.

    Args:
        n_list: Environment sizes
        n_max: Last collision count per ancilla
        jz_t: Dephasing angle J_z t of one collision
        w: System populations (default: balanced)
        verify: Cross-check small environments against the statevector
        verify_limit: Largest N that is cross-checked

    Returns:
        Series table per N, one row per n = 0..n_max
    """
    w = w or SystemWeights.balanced()
    series = {}
    for n_env in n_list:
        series[n_env] = single_ancilla_mi_series(n_env, jz_t, n_max, w)
        if verify and n_env <= verify_limit:
            brute = _statevector_series(n_env, jz_t, n_max, w)
            for column in brute.columns[1:]:
                deviation = float(np.max(np.abs(brute[column] - series[n_env][column])))
                logger.debug(f"N={n_env} {column}: statevector deviation {deviation:.2e}")
                if deviation > ORACLE_TOL:
                    raise OracleMismatchError(f"{column} at N={n_env}", deviation, ORACLE_TOL)
    return series


def fig3a_experiment(
    n_env: int = 100,
    n_set: Sequence[int] = (5, 15, 31, 55),
    jz_t: float = 0.025,
    w: Optional[SystemWeights] = None,
) -> Dict[int, FractionCurve]:
    """Ī(f) after n uniform collisions per ancilla, one curve per n.

    Uniform couplings make all same-size fractions equivalent, so one
    contiguous fraction per size is evaluated.
    """
    return {
        n: analytic_fraction_curve(
            CumulativeCouplings.uniform(n_env, n * jz_t),
            w,
            Averaging.prefixes(n_env),
            label=f"n{n}",
        )
        for n in n_set
    }


def biased_counts(n_env: int, position: int, special_n: int, other_n: int) -> List[int]:
    """``other_n`` collisions for every ancilla except ``special_n`` at ``position``."""
    if not 1 <= position <= n_env:
        raise InvalidParameterError(f"Position {position} outside [1, {n_env}]")
    counts = [other_n] * n_env
    counts[position - 1] = special_n
    return counts


def fig3b_experiment(
    n_env: int = 6,
    special_n: int = 31,
    other_n: int = 60,
    jz_t: float = 0.025,
    w: Optional[SystemWeights] = None,
    method: str = "analytic",
) -> Fig3bResult:
    """Biased coupling: one ancilla gets ``special_n`` collisions, the rest ``other_n``.

    One contiguous-prefix curve per position of the special ancilla, plus the
    curve averaged over every fraction of each size.

    Args:
        n_env: Number of ancillas
        special_n: Collisions of the special ancilla
        other_n: Collisions of every other ancilla
        jz_t: Dephasing angle J_z t of one collision
        w: System populations (default: balanced)
        method: "analytic" for closed forms, "statevector" for brute force
    """
    if method not in ("analytic", "statevector"):
        raise InvalidParameterError(f"Unknown method '{method}'")
    w = w or SystemWeights.balanced()
    coupling = CouplingSpec.z(jz_t, 1.0)

    def curve(counts: List[int], averaging: Averaging, label: str) -> FractionCurve:
        if method == "analytic":
            return analytic_fraction_curve(
                CumulativeCouplings.from_counts(counts, jz_t), w, averaging, label
            )
        sched = make_schedule(ScheduleKind.BIASED, n_env, counts=counts)
        state = run_schedule(
            build_initial_state(_weights_state(w), n_env), sched, collision_unitary(coupling)
        )
        return mi_vs_fraction(state, averaging, label)

    per_position = {
        position: curve(
            biased_counts(n_env, position, special_n, other_n),
            Averaging.prefixes(n_env),
            f"special_at_{position}",
        )
        for position in range(1, n_env + 1)
    }
    averaged = curve(
        biased_counts(n_env, 1, special_n, other_n), Averaging.exact(), "averaged"
    )
    return Fig3bResult(per_position, averaged)


def custom_experiment(cfg: ExperimentConfig, threads: int = 1) -> Dict[str, FractionCurve]:
    """Ensemble curves for an explicit coupling, schedule and state policy, one per N."""
    return _ensemble_grid(cfg, threads)


def plateau_metric(curve: FractionCurve, delta: float) -> float:
    """Share of interior fractions (1 <= r <= N-1) with |Ī - 1| <= delta."""
    if not 0 < delta < 1:
        raise InvalidParameterError(f"delta must lie in (0, 1), got {delta}")
    interior = [p for p in curve.points if 1 <= p.r <= curve.n_env - 1]
    if not interior:
        raise InvalidParameterError("The curve has no interior fractions")
    undefined = [p.r for p in interior if not p.defined]
    if undefined:
        raise UndefinedPointsError(undefined)
    hits = sum(1 for p in interior if abs(p.normalized - 1.0) <= delta)
    return hits / len(interior)


def chord_deviation(curve: FractionCurve) -> float:
    """Largest vertical distance between Ī(f) and the chord joining its end points."""
    points = [p for p in curve.points if p.defined]
    if len(points) < 2:
        raise InvalidParameterError("A chord needs at least two defined points")
    first, last = points[0], points[-1]
    slope = (last.normalized - first.normalized) / (last.f - first.f)
    return max(abs(p.normalized - (first.normalized + slope * (p.f - first.f))) for p in points)


def interior_spread(curve: FractionCurve) -> float:
    """max - min of Ī over the interior fractions."""
    values = [p.normalized for p in curve.points if 1 <= p.r <= curve.n_env - 1 and p.defined]
    if not values:
        raise InvalidParameterError("The curve has no defined interior fractions")
    return max(values) - min(values)


def compare_curves(expected: FractionCurve, actual: FractionCurve, tol: float = ORACLE_TOL) -> float:
    """Largest |ΔĪ| between two curves over the same fractions; raises beyond ``tol``."""
    deviation = 0.0
    for a, b in zip(expected.points, actual.points):
        if a.r != b.r or a.defined != b.defined:
            raise OracleMismatchError(f"{expected.label} fraction r={a.r}", float("inf"), tol)
        if a.defined:
            deviation = max(deviation, abs(a.normalized - b.normalized))
    if len(expected.points) != len(actual.points) or deviation > tol:
        raise OracleMismatchError(expected.label or "curve", deviation, tol)
    return deviation


def analytic_weights(cfg: ExperimentConfig) -> SystemWeights:
    if cfg.system_state == "fixed":
        return SystemWeights.from_state(InitialSystemState(*cfg.initial_amplitudes()))
    return SystemWeights.balanced()
