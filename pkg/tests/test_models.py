"""Unit tests for result models."""

import pytest

from qd_collision.exceptions import UndefinedNormalizationError
from qd_collision.models import (
    FRACTION_COLUMNS,
    Averaging,
    AveragingMode,
    FractionCurve,
    FractionPoint,
    InformationPoint,
    RunManifest,
)


def point(r, n_env=4, value=1.0):
    return FractionPoint(r, r / n_env, value, value, 0.0, 1)


class TestInformationPoint:
    """Test cases for InformationPoint."""

    def test_mutual_information(self):
        """I = S_S + S_Ef - S_SEf and Ī = I / S_S."""
        p = InformationPoint(1.0, 0.8, 0.9)
        assert p.mutual_information == pytest.approx(0.9)
        assert p.normalized == pytest.approx(0.9)
        assert p.defined

    def test_undefined_threshold(self):
        """Ī is undefined below S_S = 1e-12."""
        p = InformationPoint(5e-13, 0.0, 0.0)
        assert p.normalized is None
        with pytest.raises(UndefinedNormalizationError):
            p.require_normalized()

    def test_row(self):
        """as_row carries the five printed quantities."""
        row = InformationPoint(1.0, 1.0, 1.0).as_row()
        assert row == {"S_S": 1.0, "S_Ef": 1.0, "S_SEf": 1.0, "I": 1.0, "I_bar": 1.0}


class TestAveraging:
    """Test cases for Averaging."""

    def test_prefixes(self):
        """Prefixes are {1..r} for r = 1..N."""
        averaging = Averaging.prefixes(3)
        assert averaging.mode is AveragingMode.SINGLE_SUBSET
        assert averaging.subsets == ((1,), (1, 2), (1, 2, 3))

    def test_describe(self):
        """Readable labels for manifests and logs."""
        assert Averaging.exact().describe() == "exact_all_subsets"
        assert Averaging.sampled(5, 1).describe() == "sampled(5, seed=1)"


class TestFractionCurve:
    """Test cases for FractionCurve."""

    def test_fraction_sizes_increase(self):
        """r must be strictly increasing."""
        with pytest.raises(ValueError):
            FractionCurve(4, [point(2), point(1)], Averaging.exact())

    def test_fraction_sizes_in_range(self):
        """1 <= r <= N."""
        with pytest.raises(ValueError):
            FractionCurve(4, [point(5)], Averaging.exact())

    def test_lookup_and_table(self):
        """Points are found by r and tabulated with the fixed columns."""
        curve = FractionCurve(4, [point(1, value=0.5), point(2)], Averaging.exact())
        assert curve.normalized(1) == 0.5
        with pytest.raises(KeyError):
            curve.point(3)
        df = curve.to_dataframe()
        assert list(df.columns) == FRACTION_COLUMNS
        assert len(df) == 2

    def test_exclusions_total(self):
        """Excluded samples add up across points."""
        points = [
            FractionPoint(1, 0.5, 0.0, None, None, 2, n_excluded=2),
            FractionPoint(2, 1.0, 0.1, 1.0, 0.0, 1, n_excluded=0),
        ]
        assert FractionCurve(2, points, Averaging.exact()).total_excluded == 2


class TestRunManifest:
    """Test cases for RunManifest."""

    def test_keys(self):
        """The manifest document has a fixed key set."""
        doc = RunManifest({"experiment": "fig2"}, [], "0.1.0", 0.5, ["a.csv"]).to_dict()
        assert set(doc) == {
            "version", "config", "seeds", "wall_time_s", "outputs", "exclusions", "angles", "averaging"
        }
        assert doc["outputs"] == ["a.csv"]
