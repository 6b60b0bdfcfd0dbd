"""Command-line interface for the collision model simulator."""

import sys
import time
from pathlib import Path
from typing import Dict, List, Optional, Tuple

import click
import numpy as np
import pandas as pd
from rich import box
from rich.console import Console
from rich.table import Table

from . import __version__
from .analytic import CumulativeCouplings, SystemWeights, information_point
from .collision import PRESETS, Interaction, ScheduleKind
from .config import EXPERIMENTS, SYSTEM_STATES, ExperimentConfig, load_config, resolve_thread_count
from .exceptions import (
    CapExceededError,
    CollisionModelError,
    ConfigError,
    UndefinedNormalizationError,
)
from .experiments import (
    analytic_weights,
    compare_curves,
    custom_experiment,
    fig1_experiment,
    fig2_experiment,
    fig3a_experiment,
    fig3b_experiment,
)
from .logger import RunLogger
from .models import AveragingMode, RunManifest
from .qcore import QubitSubset
from .writers import format_csv, write_csv_atomic, write_json_atomic

console = Console()

EXIT_FAILURE = 1
EXIT_CONFIG = 2
EXIT_CAP = 3

MANIFEST_NAME = "manifest.json"

Tables = Dict[str, pd.DataFrame]


def exit_code_for(error: Exception) -> int:
    """2 for config errors, 3 for cap violations, 1 otherwise."""
    if isinstance(error, ConfigError):
        return EXIT_CONFIG
    if isinstance(error, CapExceededError):
        return EXIT_CAP
    return EXIT_FAILURE


def _fail(error: Exception, code: Optional[int] = None) -> None:
    click.echo(f"❌ {type(error).__name__}: {error}", err=True)
    sys.exit(code if code is not None else exit_code_for(error))


@click.group()
@click.version_option(version=__version__, prog_name="qd-collision")
def cli():
    """
    Collisional quantum Darwinism simulator.

    Runs repeated-interaction (collision) models of a qubit and an N-qubit
    environment and reports how much of the system's information each
    environment fraction holds.

    Examples:

        # Biased coupling study with the closed form
        qd-collision simulate --experiment fig3b --out results/

        # Random Z collisions, 50 Haar-random runs
        qd-collision simulate --experiment fig1 --N 6 --coupling z --preset weak --runs 50 --seed 7

        # One closed-form point
        qd-collision analytic --N 6 --g 0.775 --r 1
    """


def _overrides(**options) -> Dict[str, object]:
    """Config keys for every flag actually given on the command line."""
    return {
        key: list(value) if isinstance(value, tuple) else value
        for key, value in options.items()
        if value is not None and value != () and value is not False
    }


def build_config(config_path: Optional[Path], experiment: Optional[str], overrides: Dict) -> ExperimentConfig:
    """Config file (or experiment defaults) with command-line flags laid over it."""
    if config_path is not None:
        base = load_config(config_path).to_dict()
        source = str(config_path)
    else:
        base = {}
        source = None
    if experiment is not None:
        if config_path is not None and experiment != base.get("experiment"):
            # switching experiment drops the file's values in favour of the new defaults
            base = {}
        base["experiment"] = experiment
    base.update(overrides)
    return ExperimentConfig.from_dict(base, source)


def _fraction_tables(prefix: str, curves) -> Tuple[Tables, Dict[str, int], Dict[str, str]]:
    tables, exclusions, averaging = {}, {}, {}
    for key, curve in curves.items():
        name = f"{prefix}_{curve.label or key}.csv"
        tables[name] = curve.to_dataframe()
        exclusions[name] = curve.total_excluded
        averaging[name] = curve.averaging.describe()
    return tables, exclusions, averaging


def run_experiment(cfg: ExperimentConfig, threads: int, run_logger: Optional[RunLogger] = None):
    """Compute every result table of ``cfg`` before anything is written.

    Returns (file name -> table, file name -> excluded samples,
    file name -> averaging policy, angle table).
    """
    def note(label: str, detail: str = "") -> None:
        if run_logger is not None:
            run_logger.log_experiment(label, detail)

    if cfg.experiment in ("fig1", "custom"):
        runner = fig1_experiment if cfg.experiment == "fig1" else custom_experiment
        note(cfg.experiment, f"{cfg.runs} runs, N={cfg.n_env}, averaging={cfg.averaging}")
        tables, exclusions, averaging = _fraction_tables(cfg.experiment, runner(cfg, threads))
        angles = {
            label: {"jx": c.jx, "jy": c.jy, "jz": c.jz, "t": c.t, "g_per_collision": c.dephasing_angle}
            for label, c in cfg.couplings().items()
        }
        return tables, exclusions, averaging, angles

    w = analytic_weights(cfg)

    if cfg.experiment == "fig2":
        note("fig2", f"N={cfg.n_env}, n_max={cfg.n_max}, verify={cfg.verify}")
        series = fig2_experiment(cfg.n_env, cfg.n_max, cfg.jz_t, w, verify=cfg.verify)
        tables = {f"fig2_N{n}.csv": df for n, df in series.items()}
        n_values = list(range(cfg.n_max + 1))
        angles = {"jz_t": cfg.jz_t, "n": n_values, "g": [n * cfg.jz_t for n in n_values]}
        return tables, {name: 0 for name in tables}, {}, angles

    n_env = cfg.n_env[0]

    if cfg.experiment == "fig3a":
        note("fig3a", f"N={n_env}, n={cfg.n_set}")
        curves = fig3a_experiment(n_env, cfg.n_set, cfg.jz_t, w)
        tables, exclusions, averaging = _fraction_tables("fig3a", curves)
        angles = {"jz_t": cfg.jz_t, "n": list(cfg.n_set), "g": [n * cfg.jz_t for n in cfg.n_set]}
        return tables, exclusions, averaging, angles

    note("fig3b", f"N={n_env}, special_n={cfg.special_n}, other_n={cfg.other_n}")
    result = fig3b_experiment(n_env, cfg.special_n, cfg.other_n, cfg.jz_t, w)
    if cfg.verify:
        brute = fig3b_experiment(n_env, cfg.special_n, cfg.other_n, cfg.jz_t, w, method="statevector")
        for position, curve in result.per_position.items():
            compare_curves(curve, brute.per_position[position])
        deviation = compare_curves(result.averaged, brute.averaged)
        note("fig3b verify", f"statevector agrees, max deviation {deviation:.2e}")
    curves = {f"special_at_{p}": c for p, c in result.per_position.items()}
    curves["averaged"] = result.averaged
    tables, exclusions, averaging = _fraction_tables("fig3b", curves)
    angles = {
        "jz_t": cfg.jz_t,
        "n": {"special": cfg.special_n, "other": cfg.other_n},
        "g": {"special": cfg.special_n * cfg.jz_t, "other": cfg.other_n * cfg.jz_t},
    }
    return tables, exclusions, averaging, angles


@cli.command()
@click.option(
    "--config",
    "config_path",
    type=click.Path(exists=True, dir_okay=False, path_type=Path),
    help="JSON config file, or a manifest.json from an earlier run",
)
@click.option("--experiment", type=click.Choice(EXPERIMENTS), help="Experiment to run")
@click.option("--N", "n_env", type=int, multiple=True, help="Environment size (repeatable)")
@click.option(
    "--coupling",
    "interactions",
    type=click.Choice([i.value for i in Interaction]),
    multiple=True,
    help="Interaction type (repeatable)",
)
@click.option("--preset", "presets", type=click.Choice(sorted(PRESETS)), multiple=True, help="Coupling strength preset (repeatable)")
@click.option("--jx", type=float, help="Explicit coupling J_x (with --t)")
@click.option("--jy", type=float, help="Explicit coupling J_y (with --t)")
@click.option("--jz", type=float, help="Explicit coupling J_z (with --t)")
@click.option("--t", type=float, help="Collision duration; enables the explicit coupling")
@click.option("--schedule", type=click.Choice([k.value for k in ScheduleKind]), help="Collision schedule kind")
@click.option("--collisions", type=int, help="Total collisions of a random schedule")
@click.option("--collisions-per-ancilla", type=int, help="Rounds of a round-robin schedule")
@click.option("--runs", type=int, help="Independent runs to average")
@click.option("--seed", type=int, help="Master seed")
@click.option("--system-state", type=click.Choice(SYSTEM_STATES), help="Initial system state policy")
@click.option("--averaging", type=click.Choice([m.value for m in AveragingMode]), help="Fraction averaging policy")
@click.option("--samples", type=int, help="Subsets per size for sampled averaging")
@click.option("--verify", is_flag=True, default=False, help="Cross-check closed forms against the statevector")
@click.option("--out", type=str, help="Output directory")
@click.option("--log-level", default="INFO", type=click.Choice(["DEBUG", "INFO", "WARNING", "ERROR"]), help="Run log level")
def simulate(config_path, experiment, log_level, **options):
    """Run an experiment and write one CSV per curve plus manifest.json."""
    try:
        cfg = build_config(config_path, experiment, _overrides(**options))
        threads = resolve_thread_count()
    except CollisionModelError as e:
        _fail(e)

    out_dir = Path(cfg.out)
    run_logger = RunLogger(out_dir, log_level)
    run_logger.log_run_start(cfg.experiment, threads, cfg.seed)
    started = time.perf_counter()
    try:
        with console.status(f"Running {cfg.experiment}..."):
            tables, exclusions, averaging, angles = run_experiment(cfg, threads, run_logger)

        outputs: List[str] = []
        for name, df in tables.items():
            write_csv_atomic(df, out_dir / name)
            run_logger.log_output(name, len(df))
            run_logger.log_exclusions(name, exclusions.get(name, 0))
            outputs.append(name)

        wall_time = time.perf_counter() - started
        seeds = [cfg.seed] if cfg.experiment in ("fig1", "custom") else []
        manifest = RunManifest(
            cfg.to_dict(), seeds, __version__, wall_time, outputs, exclusions, angles, averaging
        )
        write_json_atomic(manifest.to_dict(), out_dir / MANIFEST_NAME)
        run_logger.log_run_end(wall_time)
    except CollisionModelError as e:
        run_logger.log_error(str(e))
        run_logger.close()
        _fail(e)
    run_logger.close()

    table = Table(title=f"{cfg.experiment} results", box=box.ROUNDED)
    table.add_column("File", style="cyan", no_wrap=True)
    table.add_column("Rows", justify="right")
    table.add_column("Excluded", justify="right", style="yellow")
    for name in outputs:
        table.add_row(name, str(len(tables[name])), str(exclusions.get(name, 0)))
    console.print(table)
    console.print(f"✅ Wrote {len(outputs)} files and {MANIFEST_NAME} to {out_dir} in {wall_time:.2f}s", style="green")


def resolve_angles(
    n_env: int, g: Tuple[float, ...], n: Optional[int], jz: Optional[float], t: Optional[float]
) -> np.ndarray:
    """Per-ancilla g from --g (one value or N values) or from n collisions of J_z t."""
    if g and n is not None:
        raise ConfigError("g", "give either --g or --n/--jz/--t, not both")
    if g:
        if len(g) not in (1, n_env):
            raise ConfigError("g", f"expected 1 or {n_env} values, got {len(g)}")
        return np.full(n_env, g[0]) if len(g) == 1 else np.asarray(g, dtype=np.float64)
    if n is None or jz is None or t is None:
        raise ConfigError("g", "give --g, or all of --n, --jz and --t")
    if n < 0 or t < 0:
        raise ConfigError("n", "collision count and duration must be non-negative")
    return np.full(n_env, n * jz * t)


def resolve_fraction(n_env: int, r: Optional[int], subset: Optional[str]) -> QubitSubset:
    """--r picks the prefix {1..r}; --subset takes explicit labels like '1,3,5'."""
    if (r is None) == (subset is None):
        raise ConfigError("r", "give exactly one of --r and --subset")
    if r is not None:
        if not 1 <= r <= n_env:
            raise ConfigError("r", f"must lie in [1, {n_env}], got {r}")
        return QubitSubset(tuple(range(1, r + 1)))
    try:
        labels = tuple(int(part) for part in subset.split(",") if part.strip())
    except ValueError:
        raise ConfigError("subset", f"expected comma-separated ancilla labels, got {subset!r}")
    if not labels or any(not 1 <= k <= n_env for k in labels):
        raise ConfigError("subset", f"labels must lie in [1, {n_env}], got {subset!r}")
    return QubitSubset.of(labels)


@cli.command()
@click.option("--N", "n_env", type=int, required=True, help="Environment size")
@click.option("--g", "g", type=float, multiple=True, help="Cumulative angle: once for all ancillas, or N times")
@click.option("--n", "n", type=int, help="Collisions per ancilla (with --jz and --t)")
@click.option("--jz", type=float, help="Coupling J_z")
@click.option("--t", type=float, help="Collision duration")
@click.option("--r", "r", type=int, help="Fraction size; uses ancillas 1..r")
@click.option("--subset", type=str, help="Explicit fraction, e.g. '1,3,5'")
@click.option("--p", "p", default=0.5, type=float, help="Initial population of |up> (default: 0.5)")
@click.option("--format", "output_format", default="table", type=click.Choice(["table", "csv"]), help="Output format")
def analytic(n_env, g, n, jz, t, r, subset, p, output_format):
    """Closed-form entropies and Ī for one dephased environment fraction."""
    try:
        if n_env < 1:
            raise ConfigError("N", f"must be at least 1, got {n_env}")
        gs = CumulativeCouplings(resolve_angles(n_env, g, n, jz, t))
        fraction = resolve_fraction(n_env, r, subset)
        if not 0.0 <= p <= 1.0:
            raise ConfigError("p", f"must lie in [0, 1], got {p}")
        point = information_point(gs, fraction, SystemWeights(p, 1.0 - p))
    except CollisionModelError as e:
        _fail(e)

    row = point.as_row()
    if output_format == "csv":
        click.echo(format_csv(pd.DataFrame([row])), nl=False)
    else:
        table = Table(title=f"N={n_env}, fraction {list(fraction)}", box=box.ROUNDED)
        for name in row:
            table.add_column(name, justify="right")
        table.add_row(*("undefined" if v is None else f"{v:.12g}" for v in row.values()))
        console.print(table)

    if not point.defined:
        _fail(UndefinedNormalizationError(point.system_entropy, point.mutual_information), EXIT_CAP)


@cli.command()
def version():
    """Print the package version."""
    click.echo(f"qd-collision {__version__}")


if __name__ == "__main__":
    cli()
