"""Unit tests for experiment configuration."""

import json
import os

import pytest

from qd_collision.config import (
    DEFAULT_FIG1_CONFIG,
    THREADS_ENV_VAR,
    ExperimentConfig,
    load_config,
    resolve_thread_count,
)
from qd_collision.exceptions import CapExceededError, ConfigError, TooManySubsetsError
from qd_collision.models import AveragingMode


class TestExperimentConfig:
    """Test cases for ExperimentConfig.from_dict and validate."""

    def test_experiment_defaults(self):
        """Keys not given come from the experiment's preset."""
        cfg = ExperimentConfig.from_dict({"experiment": "fig1", "runs": 5})
        assert cfg.runs == 5
        assert cfg.n_env == DEFAULT_FIG1_CONFIG.n_env
        assert cfg.interactions == ["z", "xx"]
        assert cfg.presets == ["weak", "strong"]

    def test_scalar_lists_accepted(self):
        """A single N or interaction may be given without a list."""
        cfg = ExperimentConfig.from_dict({"experiment": "fig1", "n_env": 7, "interactions": "xx"})
        assert cfg.n_env == [7]
        assert cfg.interactions == ["xx"]

    def test_unknown_key(self):
        """Unknown keys are named in the error."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict({"experiment": "fig2", "colisions": 3})
        assert exc_info.value.field == "colisions"
        assert "colisions" in str(exc_info.value)

    def test_wrong_type(self):
        """Type mismatches name the field."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict({"runs": "fifty"})
        assert exc_info.value.field == "runs"

    def test_booleans_are_not_integers(self):
        """true is not a run count."""
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"runs": True})

    def test_unknown_experiment(self):
        """Only the five experiments exist."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict({"experiment": "fig4"})
        assert exc_info.value.field == "experiment"

    def test_non_object_rejected(self):
        """The document must be a JSON object."""
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict([1, 2, 3])

    def test_zero_runs_rejected(self):
        """At least one run."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict({"runs": 0})
        assert exc_info.value.field == "runs"

    def test_unknown_preset(self):
        """Presets are weak or strong."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict({"presets": ["medium"]})
        assert exc_info.value.field == "presets"

    def test_statevector_cap(self):
        """Brute-force experiments are capped at 25 ancillas."""
        with pytest.raises(CapExceededError) as exc_info:
            ExperimentConfig.from_dict({"n_env": [26], "averaging": "sampled"})
        assert exc_info.value.field == "n_env"

    def test_exact_averaging_cap(self):
        """Exact subset averaging is capped at N = 12."""
        with pytest.raises(TooManySubsetsError):
            ExperimentConfig.from_dict({"experiment": "fig1", "n_env": [13]})

    def test_closed_form_needs_known_state(self):
        """fig2 and fig3 reject Haar-random system states."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict({"experiment": "fig2", "system_state": "haar"})
        assert exc_info.value.field == "system_state"

    def test_fixed_state_amplitudes(self):
        """alpha and beta accept numbers or [real, imag] pairs and must be normalized."""
        cfg = ExperimentConfig.from_dict(
            {"system_state": "fixed", "alpha": 0.6, "beta": [0.0, 0.8]}
        )
        alpha, beta = cfg.initial_amplitudes()
        assert alpha == 0.6 and beta == 0.8j
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"system_state": "fixed", "alpha": 1.0, "beta": 1.0})
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict({"system_state": "fixed", "alpha": 1.0})

    def test_biased_schedule_needs_counts(self):
        """A custom biased schedule needs one count per ancilla."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict({"n_env": [3], "schedule": "biased", "counts": [1, 2]})
        assert exc_info.value.field == "counts"

    def test_fig1_round_robin_needs_count(self):
        """Schedule rules apply to fig1 as well as custom."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict(
                {"experiment": "fig1", "n_env": [4], "schedule": "round_robin"}
            )
        assert exc_info.value.field == "collisions_per_ancilla"
        cfg = ExperimentConfig.from_dict(
            {"experiment": "fig1", "n_env": [4], "schedule": "round_robin", "collisions_per_ancilla": 3}
        )
        assert cfg.collisions_per_ancilla == 3

    def test_fig3b_subset_cap(self):
        """fig3b averages over every fraction, so N is capped at 12."""
        with pytest.raises(TooManySubsetsError):
            ExperimentConfig.from_dict({"experiment": "fig3b", "n_env": [13]})
        assert ExperimentConfig.from_dict({"experiment": "fig3b", "n_env": [12]}).n_env == [12]

    def test_single_size_experiments(self):
        """fig3a, fig3b and biased schedules take one N."""
        with pytest.raises(ConfigError) as exc_info:
            ExperimentConfig.from_dict({"experiment": "fig3a", "n_env": [50, 100]})
        assert exc_info.value.field == "n_env"
        with pytest.raises(ConfigError):
            ExperimentConfig.from_dict(
                {"n_env": [3, 4], "schedule": "biased", "counts": [1, 2, 3]}
            )

    def test_couplings_grid(self):
        """One coupling per interaction and preset."""
        cfg = ExperimentConfig.from_dict({"experiment": "fig1", "n_env": [6]})
        couplings = cfg.couplings()
        assert list(couplings) == ["z_weak", "z_strong", "xx_weak", "xx_strong"]
        assert couplings["xx_weak"].jx == 1.0 and couplings["xx_weak"].t == 0.025

    def test_explicit_coupling(self):
        """Setting t switches to the explicit coupling."""
        cfg = ExperimentConfig.from_dict({"jx": 0.5, "jz": 1.0, "t": 0.1})
        assert list(cfg.couplings()) == ["custom"]
        assert cfg.couplings()["custom"].jx == 0.5

    def test_averaging_policy(self):
        """The configured policy maps to an Averaging value."""
        cfg = ExperimentConfig.from_dict({"averaging": "sampled", "samples": 7, "seed": 3})
        policy = cfg.averaging_policy(6)
        assert policy.mode is AveragingMode.SAMPLED
        assert (policy.samples, policy.seed) == (7, 3)
        prefix = ExperimentConfig.from_dict({"averaging": "single"}).averaging_policy(4)
        assert len(prefix.subsets) == 4

    def test_dict_round_trip(self):
        """to_dict feeds back into from_dict unchanged."""
        cfg = ExperimentConfig.from_dict({"experiment": "fig3b", "special_n": 20})
        assert ExperimentConfig.from_dict(cfg.to_dict()) == cfg


class TestLoadConfig:
    """Test cases for load_config."""

    def test_json_file(self, tmp_path):
        """A flat JSON document is read and validated."""
        path = tmp_path / "cfg.json"
        path.write_text(json.dumps({"experiment": "fig3a", "n_set": [5, 31]}))
        cfg = load_config(path)
        assert cfg.experiment == "fig3a"
        assert cfg.n_set == [5, 31]

    def test_manifest_accepted(self, tmp_path):
        """A run manifest contributes its config echo."""
        path = tmp_path / "manifest.json"
        echo = ExperimentConfig.from_dict({"experiment": "fig2", "n_max": 10}).to_dict()
        path.write_text(json.dumps({"config": echo, "outputs": ["fig2_N6.csv"], "seeds": []}))
        assert load_config(path).n_max == 10

    def test_invalid_json(self, tmp_path):
        """Malformed JSON is a ConfigError with the line number."""
        path = tmp_path / "broken.json"
        path.write_text('{"experiment": "fig1",\n  "runs": }')
        with pytest.raises(ConfigError) as exc_info:
            load_config(path)
        assert exc_info.value.field == "config"
        assert "line 2" in str(exc_info.value)

    def test_missing_file(self, tmp_path):
        """Unreadable files are ConfigErrors too."""
        with pytest.raises(ConfigError):
            load_config(tmp_path / "absent.json")


class TestThreadCount:
    """Test cases for resolve_thread_count."""

    def test_explicit_value(self):
        """A positive value is used as is."""
        assert resolve_thread_count({THREADS_ENV_VAR: "3"}) == 3

    def test_auto(self):
        """0 or unset means one worker per CPU."""
        expected = os.cpu_count() or 1
        assert resolve_thread_count({THREADS_ENV_VAR: "0"}) == expected
        assert resolve_thread_count({}) == expected

    @pytest.mark.parametrize("raw", ["many", "-2", "1.5"])
    def test_invalid_values(self, raw):
        """Non-integers and negatives are rejected."""
        with pytest.raises(ConfigError) as exc_info:
            resolve_thread_count({THREADS_ENV_VAR: raw})
        assert exc_info.value.field == THREADS_ENV_VAR
