"""Tests for monthly series construction."""

from __future__ import annotations

import math

import pytest

from slanglag.errors import DegenerateSeriesError, ImputationError
from slanglag.ingest import CoverageTable, DailyCounts
from slanglag.models import ExclusionReason, Provenance, TermRecord
from slanglag.months import MonthRange
from slanglag.series import (
    MonthlySeries,
    activity_series,
    apply_correction,
    impute_missing,
    is_constant,
    monthly_average,
    monthly_totals,
    normalize,
    overlap,
    round_half_up,
    twitter_series,
)
from slanglag.testing import make_series

Q1 = MonthRange.parse("2012-01:2012-03")
FULL = {"2012-01": 31 * 1440, "2012-02": 29 * 1440, "2012-03": 31 * 1440}


def _coverage(observed: dict[str, int] | None = None, missing: dict[str, int] | None = None):
    return CoverageTable(
        observed_minutes={**FULL, **(observed or {})},
        missing_day_counts={m: 0 for m in FULL} | (missing or {}),
    )


class TestMonthlySeries:
    """Tests for MonthlySeries."""

    def test_from_mapping_sorts_months(self) -> None:
        series = MonthlySeries.from_mapping("t", {"2012-02": 2, "2012-01": 1})
        assert series.months == ("2012-01", "2012-02")
        assert series.values == (1.0, 2.0)
        assert series.provenance == (Provenance.OBSERVED, Provenance.OBSERVED)

    def test_gap_rejected(self) -> None:
        with pytest.raises(ValueError, match="contiguous"):
            MonthlySeries.from_mapping("t", {"2012-01": 1, "2012-03": 2})

    def test_restrict_and_rows(self) -> None:
        series = make_series([1, 2, 3], start="2012-01")
        assert series.restrict(["2012-02", "2012-03"]).as_dict() == {"2012-02": 2, "2012-03": 3}
        assert series.rows()[0] == ("t", "2012-01", 1.0, "observed")


class TestTotals:
    """Tests for monthly_totals(), monthly_average() and round_half_up()."""

    def test_monthly_totals_clip_to_window(self) -> None:
        days = {"2012-01-05": 3, "2012-02-01": 1, "2013-01-01": 5}
        assert monthly_totals(days, Q1) == {"2012-01": 3, "2012-02": 1, "2012-03": 0}

    def test_monthly_average(self) -> None:
        daily = DailyCounts({("x", "2012-01-01"): 31, ("x", "2012-02-10"): 58})
        assert monthly_average(daily, "x", Q1) == {"2012-01": 1.0, "2012-02": 2.0, "2012-03": 0.0}

    @pytest.mark.parametrize(("value", "expected"), [(2.5, 3), (0.5, 1), (1.49, 1), (0.0, 0)])
    def test_round_half_up(self, value: float, expected: int) -> None:
        assert round_half_up(value) == expected


class TestCorrection:
    """Tests for apply_correction()."""

    def test_half_observed_month_doubles(self) -> None:
        cov = _coverage(observed={"2012-01": 31 * 720})
        series = apply_correction("x", {"2012-01": 3, "2012-02": 1, "2012-03": 0}, cov)
        assert series.values == (6.0, 1.0, 0.0)
        assert series.provenance[:2] == (Provenance.CORRECTED, Provenance.OBSERVED)

    def test_correction_rounds_half_up(self) -> None:
        cov = _coverage(observed={"2012-01": 29760})
        assert apply_correction("x", {"2012-01": 1}, cov).values == (2.0,)

    def test_unobserved_month_marked_missing(self) -> None:
        cov = _coverage(observed={"2012-02": 0})
        series = apply_correction("x", {"2012-01": 1, "2012-02": 5}, cov)
        assert series.values[1] == 0.0
        assert series.provenance[1] is Provenance.MISSING


class TestImputation:
    """Tests for impute_missing() and twitter_series()."""

    def test_gap_filled_with_neighbour_mean(self) -> None:
        cov = _coverage(observed={"2012-02": 0}, missing={"2012-02": 29})
        days = {"2012-01-01": 31, "2012-03-01": 62}
        series = twitter_series("x", days, cov, Q1)
        assert series.values[0] == 1.0
        assert series.values[2] == 2.0
        assert math.isclose(series.values[1], 46.5 / 29)
        assert series.provenance == (Provenance.OBSERVED, Provenance.IMPUTED, Provenance.OBSERVED)

    def test_partially_observed_month_over_threshold(self) -> None:
        series = make_series([10, 99, 20], start="2012-01")
        cov = _coverage(observed={"2012-02": 1440}, missing={"2012-02": 28})
        assert impute_missing(series, cov).values == (10.0, 15.0, 20.0)

    def test_threshold_is_strict(self) -> None:
        series = make_series([10, 99, 20], start="2012-01")
        cov = _coverage(missing={"2012-02": 14})
        assert impute_missing(series, cov, max_missing_days=14) is series

    def test_edge_copies_single_neighbour(self) -> None:
        series = make_series([0, 4, 8], start="2012-01")
        cov = _coverage(missing={"2012-01": 20})
        assert impute_missing(series, cov).values == (4.0, 4.0, 8.0)

    def test_nothing_to_impute_from(self) -> None:
        series = make_series([1, 2, 3], start="2012-01")
        cov = _coverage(missing={m: 20 for m in FULL})
        with pytest.raises(ImputationError) as info:
            impute_missing(series, cov)
        assert info.value.reason == ExclusionReason.IMPUTATION_IMPOSSIBLE


class TestActivitySeries:
    """Tests for activity_series() and overlap()."""

    def test_span_clipped_and_gaps_zero(self) -> None:
        record = TermRecord(term="x", activity={"2011-12": 5, "2012-01": 2, "2012-03": 4})
        series = activity_series(record, Q1)
        assert series is not None
        assert series.as_dict() == {"2012-01": 2.0, "2012-02": 0.0, "2012-03": 4.0}

    def test_no_activity(self) -> None:
        assert activity_series(TermRecord(term="x"), Q1) is None
        assert activity_series(TermRecord(term="x", activity={"2015-01": 1}), Q1) is None

    def test_overlap(self) -> None:
        a = make_series([1, 2, 3], start="2012-01")
        b = make_series([1, 2, 3], start="2012-02")
        assert overlap(a, b) == ["2012-02", "2012-03"]


class TestNormalize:
    """Tests for normalize()."""

    def test_population_z_scores(self) -> None:
        norm = normalize(make_series([1, 2, 3]))
        assert norm.mean_used == 2.0
        assert math.isclose(norm.std_used, math.sqrt(2 / 3))
        assert math.isclose(norm.values[0], -math.sqrt(1.5))
        assert norm.values[1] == 0.0

    def test_denormalize_inverts(self) -> None:
        series = make_series([4.0, 1.5, 9.0, 2.0])
        restored = normalize(series).denormalize()
        for month, value in series.as_dict().items():
            assert math.isclose(restored[month], value)

    def test_span_restricts(self) -> None:
        series = make_series([100, 1, 2], start="2000-01")
        assert normalize(series, ["2000-02", "2000-03"]).mean_used == 1.5

    def test_constant_series(self) -> None:
        with pytest.raises(DegenerateSeriesError) as info:
            normalize(make_series([3, 3, 3]))
        assert info.value.reason == ExclusionReason.DEGENERATE_SERIES

    def test_tiny_scale_is_not_constant(self) -> None:
        norm = normalize(make_series([1e-13, 2e-13, 3e-13]))
        assert list(norm.values) == pytest.approx([-math.sqrt(1.5), 0.0, math.sqrt(1.5)])
        assert norm.std_used == pytest.approx(math.sqrt(2 / 3) * 1e-13)

    @pytest.mark.parametrize(
        ("values", "expected"),
        [
            ([0.0, 0.0, 0.0], True),
            ([1e6, 1e6, 1e6], True),
            ([1e-13, 3e-13], False),
            ([-2e-14, 2e-14], False),
            ([1e15, 1e15 + 0.125], True),
        ],
    )
    def test_is_constant_is_relative(self, values: list[float], expected: bool) -> None:
        assert is_constant(values) is expected

    def test_single_month(self) -> None:
        series = MonthlySeries.from_mapping("t", {"2000-01": 1.0})
        with pytest.raises(DegenerateSeriesError) as info:
            normalize(series)
        assert info.value.reason == ExclusionReason.TOO_SHORT
