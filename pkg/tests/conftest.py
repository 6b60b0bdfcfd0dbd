"""Pytest configuration and fixtures for collision model tests."""

import math

import numpy as np
import pytest

from qd_collision.collision import InitialSystemState, build_initial_state, dephase
from qd_collision.config import ExperimentConfig


def dephased_state(n_env: int, g, system: InitialSystemState = None):
    """|+> system dephased by one Z collision of angle g (scalar or per ancilla)."""
    system = system or InitialSystemState.plus()
    angles = [g] * n_env if np.isscalar(g) else list(g)
    return dephase(build_initial_state(system, n_env), angles)


@pytest.fixture
def rng():
    """Seeded generator for reproducible random inputs."""
    return np.random.default_rng(12345)


@pytest.fixture
def quarter_turn_state():
    """Six ancillas dephased at g = pi/4: every ancilla is a perfect record."""
    return dephased_state(6, math.pi / 4)


@pytest.fixture
def product_state():
    """|+> (x) |+>^4 before any collision."""
    return build_initial_state(InitialSystemState.plus(), 4)


@pytest.fixture
def small_fig1_config():
    """A fig1 grid small enough for unit tests."""
    return ExperimentConfig.from_dict(
        {
            "experiment": "fig1",
            "n_env": [4],
            "interactions": ["z"],
            "presets": ["weak"],
            "collisions": 40,
            "runs": 3,
            "seed": 7,
        }
    )


@pytest.fixture
def out_dir(tmp_path):
    """Fresh output directory for CLI runs."""
    return tmp_path / "results"
