"""Unit tests for the closed-form dephasing model."""

import itertools
import math

import numpy as np
import pytest

from qd_collision.analytic import (
    CumulativeCouplings,
    OverlapRole,
    SystemWeights,
    ancilla_coherence,
    dephasing_mutual_information,
    fraction_overlap,
    information_point,
    single_ancilla_mi_series,
    system_coherence,
    two_level_spectrum,
)
from qd_collision.collision import CouplingSpec, InitialSystemState, ScheduleKind, make_schedule
from qd_collision.exceptions import (
    EmptySubsetError,
    InvalidCouplingError,
    InvalidParameterError,
    InvalidSubsetError,
    InvalidWeightsError,
    OverlapOutOfRangeError,
    UndefinedNormalizationError,
)
from qd_collision.models import SERIES_COLUMNS
from qd_collision.qcore import SYSTEM, QubitSubset, offdiagonal_coherence, reduced_density, subset_information

from .conftest import dephased_state

QUARTER_TURN = math.pi / 4


def prefix(r):
    return QubitSubset(tuple(range(1, r + 1)))


def all_fractions(n_env):
    for r in range(1, n_env + 1):
        for c in itertools.combinations(range(1, n_env + 1), r):
            yield QubitSubset(c)


def assert_points_agree(expected, actual, tol=1e-9):
    assert actual.system_entropy == pytest.approx(expected.system_entropy, abs=tol)
    assert actual.mutual_information == pytest.approx(expected.mutual_information, abs=tol)
    assert actual.defined == expected.defined
    if expected.defined:
        assert actual.normalized == pytest.approx(expected.normalized, abs=tol)


class TestTwoLevelSpectrum:
    """Test cases for two_level_spectrum."""

    def test_orthogonal_branches(self):
        """c = 0 with p = q gives a maximally mixed qubit."""
        assert list(two_level_spectrum(0.5, 0.5, 0.0).eigenvalues) == [0.5, 0.5]

    def test_identical_branches(self):
        """c = 1 gives a pure state."""
        np.testing.assert_allclose(two_level_spectrum(0.3, 0.7, 1.0).eigenvalues, [1.0, 0.0], atol=1e-12)

    def test_unbalanced_weights(self):
        """c = 0 leaves the populations as eigenvalues."""
        np.testing.assert_allclose(two_level_spectrum(0.2, 0.8, 0.0).eigenvalues, [0.8, 0.2])

    def test_sign_of_overlap_is_irrelevant(self):
        """Only c^2 enters the spectrum."""
        np.testing.assert_allclose(
            two_level_spectrum(0.5, 0.5, -0.4).eigenvalues,
            two_level_spectrum(0.5, 0.5, 0.4).eigenvalues,
        )

    def test_overlap_out_of_range(self):
        """|c| > 1 raises OverlapOutOfRangeError."""
        with pytest.raises(OverlapOutOfRangeError):
            two_level_spectrum(0.5, 0.5, 1.5)

    def test_invalid_weights(self):
        """Weights must form a distribution."""
        with pytest.raises(InvalidWeightsError):
            two_level_spectrum(0.6, 0.6, 0.0)
        with pytest.raises(InvalidWeightsError):
            SystemWeights(-0.1, 1.1)


class TestCumulativeCouplings:
    """Test cases for CumulativeCouplings."""

    def test_from_counts(self):
        """g_k = n_k J_z t."""
        gs = CumulativeCouplings.from_counts([31, 60], 0.025)
        np.testing.assert_allclose(gs.g, [0.775, 1.5])

    def test_from_schedule(self):
        """Schedule counts times the per-collision angle."""
        sched = make_schedule(ScheduleKind.BIASED, 3, counts=[1, 0, 4])
        gs = CumulativeCouplings.from_schedule(sched, CouplingSpec.z(2.0, 0.5))
        np.testing.assert_allclose(gs.g, [1.0, 0.0, 4.0])

    def test_from_schedule_needs_dephasing(self):
        """Only the Z interaction has a closed form."""
        sched = make_schedule(ScheduleKind.ROUND_ROBIN, 2, collisions_per_ancilla=1)
        with pytest.raises(InvalidCouplingError):
            CumulativeCouplings.from_schedule(sched, CouplingSpec.xx(1.0, 0.1))

    def test_non_finite_rejected(self):
        """Angles must be finite."""
        with pytest.raises(InvalidParameterError):
            CumulativeCouplings(np.array([0.1, np.inf]))

    def test_fraction_labels_checked(self):
        """Fractions may only name ancillas 1..N."""
        gs = CumulativeCouplings.uniform(3, 0.2)
        with pytest.raises(InvalidSubsetError):
            fraction_overlap(gs, QubitSubset((0, 1)), OverlapRole.FRACTION)

    def test_overlap_roles(self):
        """System uses every ancilla, fraction its members, joint the rest."""
        gs = CumulativeCouplings(np.array([0.1, 0.2, 0.3]))
        c = np.cos(2 * gs.g)
        subset = QubitSubset((2,))
        assert fraction_overlap(gs, None, "system") == pytest.approx(np.prod(c))
        assert fraction_overlap(gs, subset, "fraction") == pytest.approx(c[1])
        assert fraction_overlap(gs, subset, "joint") == pytest.approx(c[0] * c[2])


class TestInformationPoint:
    """Test cases for the closed-form mutual information."""

    @pytest.mark.parametrize("n_env", [6, 100])
    def test_quarter_turn_plateau(self, n_env):
        """At g = pi/4 every proper fraction has Ī = 1 and the whole environment 2."""
        gs = CumulativeCouplings.uniform(n_env, QUARTER_TURN)
        for r in range(1, n_env):
            assert information_point(gs, prefix(r)).normalized == pytest.approx(1.0, abs=1e-12)
        assert information_point(gs, prefix(n_env)).normalized == pytest.approx(2.0, abs=1e-12)

    def test_partial_decoherence_value(self):
        """N = 6, g = 0.775, one ancilla: Ī close to 0.9997."""
        gs = CumulativeCouplings.uniform(6, 0.775)
        point = information_point(gs, prefix(1))
        assert point.system_entropy == pytest.approx(1.0, abs=1e-9)
        assert point.normalized == pytest.approx(0.99969, abs=1e-4)

    def test_undefined_without_dephasing(self):
        """g = 0 leaves S_S = 0 and Ī undefined."""
        gs = CumulativeCouplings.uniform(6, 0.0)
        assert information_point(gs, prefix(1)).normalized is None
        with pytest.raises(UndefinedNormalizationError):
            dephasing_mutual_information(gs, prefix(1))

    def test_basis_state_is_undefined(self):
        """A system starting in |up> never decoheres."""
        gs = CumulativeCouplings.uniform(4, 0.5)
        point = information_point(gs, prefix(2), SystemWeights(1.0, 0.0))
        assert point.system_entropy == 0.0
        assert not point.defined

    def test_empty_fraction_rejected(self):
        """A fraction needs at least one ancilla."""
        with pytest.raises(EmptySubsetError):
            information_point(CumulativeCouplings.uniform(3, 0.2), QubitSubset(()))

    def test_tuple_form(self):
        """dephasing_mutual_information returns (I, S_S, Ī)."""
        gs = CumulativeCouplings.uniform(4, 0.6)
        mi, s_s, ratio = dephasing_mutual_information(gs, prefix(2))
        assert ratio == pytest.approx(mi / s_s)

    def test_complement_symmetry(self, rng):
        """Ī(f) + Ī(1 - f) = 2 for every fraction."""
        for _ in range(10):
            n_env = int(rng.integers(3, 12))
            gs = CumulativeCouplings(rng.uniform(0, math.pi, size=n_env))
            for r in range(1, n_env):
                ancillas = rng.permutation(np.arange(1, n_env + 1))
                fraction = QubitSubset(tuple(int(k) for k in ancillas[:r]))
                rest = QubitSubset(tuple(int(k) for k in ancillas[r:]))
                total = information_point(gs, fraction).normalized + information_point(gs, rest).normalized
                assert total == pytest.approx(2.0, abs=1e-9)


class TestStatevectorAgreement:
    """The closed form must match the brute-force statevector."""

    @pytest.mark.parametrize("n_env", range(2, 9))
    def test_uniform_grid(self, n_env):
        """Uniform g on a 0.1 grid over [0, pi], every prefix fraction."""
        for g in np.arange(0.0, math.pi, 0.1):
            gs = CumulativeCouplings.uniform(n_env, g)
            state = dephased_state(n_env, g)
            for r in range(1, n_env + 1):
                assert_points_agree(information_point(gs, prefix(r)), subset_information(state, prefix(r)))

    @pytest.mark.parametrize("n_env", range(2, 9))
    def test_random_angles_all_fractions(self, n_env):
        """Random non-uniform g, every fraction of every size."""
        rng = np.random.default_rng(100 + n_env)
        for _ in range(8):
            g = rng.uniform(0, math.pi, size=n_env)
            gs = CumulativeCouplings(g)
            state = dephased_state(n_env, g)
            for fraction in all_fractions(n_env):
                assert_points_agree(information_point(gs, fraction), subset_information(state, fraction))

    def test_unbalanced_weights(self, rng):
        """General populations agree as well."""
        system = InitialSystemState(math.sqrt(0.3), 1j * math.sqrt(0.7))
        g = rng.uniform(0, math.pi, size=5)
        gs = CumulativeCouplings(g)
        w = SystemWeights.from_state(system)
        state = dephased_state(5, g, system)
        for fraction in all_fractions(5):
            assert_points_agree(information_point(gs, fraction, w), subset_information(state, fraction))

    def test_coherences(self, rng):
        """System and ancilla coherences match the reduced density matrices."""
        system = InitialSystemState(math.sqrt(0.8), math.sqrt(0.2))
        w = SystemWeights.from_state(system)
        g = rng.uniform(0, math.pi, size=4)
        state = dephased_state(4, g, system)
        gs = CumulativeCouplings(g)
        assert system_coherence(gs, w) == pytest.approx(
            offdiagonal_coherence(reduced_density(state, SYSTEM)), abs=1e-12
        )
        for k in range(1, 5):
            assert ancilla_coherence(g[k - 1], w) == pytest.approx(
                offdiagonal_coherence(reduced_density(state, QubitSubset((k,)))), abs=1e-12
            )


class TestCoherenceSymmetry:
    """Test cases for the symmetries of the ancilla coherence."""

    @pytest.mark.parametrize("p", [0.5, 0.8])
    def test_even_and_quarter_periodic(self, p):
        """Even in g and periodic with period pi/2."""
        w = SystemWeights(p, 1.0 - p)
        for g in np.linspace(-math.pi, math.pi, 41):
            value = ancilla_coherence(g, w)
            assert ancilla_coherence(-g, w) == pytest.approx(value, abs=1e-12)
            assert ancilla_coherence(g + math.pi / 2, w) == pytest.approx(value, abs=1e-12)

    def test_balanced_extremes(self):
        """Half at g = 0 and zero at g = pi/4 for equal populations."""
        assert ancilla_coherence(0.0) == pytest.approx(0.5, abs=1e-15)
        assert ancilla_coherence(QUARTER_TURN) == pytest.approx(0.0, abs=1e-12)


class TestSeries:
    """Test cases for single_ancilla_mi_series."""

    def test_columns_and_length(self):
        """Rows n = 0..n_max with the fixed column set."""
        df = single_ancilla_mi_series(6, 0.025, 62)
        assert list(df.columns) == SERIES_COLUMNS
        assert list(df["n"]) == list(range(63))

    def test_initial_row(self):
        """Before any collision: no information, full coherences."""
        row = single_ancilla_mi_series(6, 0.025, 10).iloc[0]
        assert row["I_bits"] == 0.0
        assert row["S_S_bits"] == 0.0
        assert row["system_coherence"] == pytest.approx(0.5)
        assert row["ancilla_coherence"] == pytest.approx(0.5)

    def test_balanced_ancilla_coherence(self):
        """For p = q the ancilla coherence is |cos 2g| / 2."""
        assert ancilla_coherence(0.3) == pytest.approx(0.5 * abs(math.cos(0.6)))

    def test_parameters_checked(self):
        """N >= 2 and n_max >= 1."""
        with pytest.raises(InvalidParameterError):
            single_ancilla_mi_series(1, 0.025, 10)
        with pytest.raises(InvalidParameterError):
            single_ancilla_mi_series(6, 0.025, 0)
