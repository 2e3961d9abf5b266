"""Statistical calibration of the pipeline stages on seeded synthetic data."""

from __future__ import annotations

import numpy as np
import pytest

from slanglag.correlation import benjamini_hochberg, best_lag, cross_correlation
from slanglag.models import Provenance
from slanglag.months import MonthRange
from slanglag.series import correction_factor, twitter_series
from slanglag.synth import dropout_coverage, lagged_pair
from slanglag.testing import make_series
from slanglag.trends import CostModel, contingency_for, detect_trends

WINDOW = MonthRange.parse("2014-01:2014-12")


def _jaccard(a: set[str] | frozenset[str], b: set[str] | frozenset[str]) -> float:
    union = a | b
    return len(a & b) / len(union) if union else 1.0


class TestCorrection:
    """Correction factors under uniform minute dropout."""

    def test_mean_factor_at_six_percent_dropout(self) -> None:
        coverage = dropout_coverage(WINDOW, 0.06, np.random.default_rng(0))
        factors = [correction_factor(coverage, m) for m in WINDOW.months()]
        assert 1.05 <= float(np.mean(factors)) <= 1.08
        assert all(1.0 < f < 1.1 for f in factors)

    def test_uniform_dropout_never_imputes(self) -> None:
        coverage = dropout_coverage(WINDOW, 0.06, np.random.default_rng(1))
        days = {f"{m}-15": 30 for m in WINDOW.months()}
        series = twitter_series("t", days, coverage, WINDOW, max_missing_days=14)
        assert set(series.provenance) == {Provenance.OBSERVED}
        # corrected totals never fall below the raw 30 matches
        assert all(v >= 30 / 31 for v in series.values)


class TestLagRecovery:
    """best_lag on pairs with a planted lag."""

    @pytest.mark.parametrize(("noise", "required"), [(0.0, 1.0), (0.1, 0.95)])
    def test_planted_lag_recovered(self, noise: float, required: float) -> None:
        rng = np.random.default_rng(21)
        hits = trials = 0
        for lag in range(-3, 4):
            for _ in range(60):
                sign = 1 if rng.random() < 0.5 else -1
                ud, tw = lagged_pair(36, lag, noise, rng, sign=sign)
                by_lag = cross_correlation(ud, tw)
                k, r = best_lag({key: v.r for key, v in by_lag.items()})
                if k == lag and r * sign > 0:
                    hits += 1
                trials += 1
        assert hits / trials >= required


class TestFalseDiscovery:
    """Benjamini-Hochberg under the global null."""

    @pytest.mark.parametrize("alpha", [0.01, 0.05])
    def test_fdr_under_global_null(self, alpha: float) -> None:
        rng = np.random.default_rng(31)
        runs = 4000
        # every rejection is false, so FDR is the chance of any rejection
        any_rejected = sum(
            any(benjamini_hochberg(rng.random(20).tolist(), alpha).reject) for _ in range(runs)
        )
        assert any_rejected / runs <= alpha + 0.01


class TestTrendRecovery:
    """Trending months against planted bursts."""

    BURST = np.array([1.0] * 10 + [10.0, 16.0, 22.0] + [1.0] * 10)
    PLANTED = range(10, 13)

    @pytest.mark.parametrize("noise", [0.1, 0.2])
    def test_planted_burst_found(self, noise: float) -> None:
        rng = np.random.default_rng(41)
        scores = []
        for _ in range(40):
            noisy = self.BURST + rng.normal(0.0, noise, size=len(self.BURST))
            series = make_series(noisy.tolist(), term_id="burst")
            report = detect_trends(series, "twitter", penalty=10.0, cost=CostModel.LINEAR)
            expected = {series.months[i] for i in self.PLANTED}
            scores.append(_jaccard(report.trending_months, expected))
        assert min(scores) >= 0.8


class TestContingencyCalibration:
    """Welch decisions on independent and coupled definition/trend grids."""

    TERMS = 40
    MONTHS = MonthRange.parse("2010-01:2012-12").months()

    def _grid(
        self, rng: np.random.Generator, rate_in: float, rate_out: float
    ) -> tuple[dict[str, list[str]], dict[str, list[str]], dict[str, list[str]]]:
        grid: dict[str, list[str]] = {}
        defs: dict[str, list[str]] = {}
        hot: dict[str, list[str]] = {}
        for i in range(self.TERMS):
            term = f"t{i:02d}"
            trending = rng.random(len(self.MONTHS)) < 0.3
            rate = np.where(trending, rate_in, rate_out)
            defined = rng.random(len(self.MONTHS)) < rate
            grid[term] = list(self.MONTHS)
            hot[term] = [m for m, flag in zip(self.MONTHS, trending, strict=True) if flag]
            defs[term] = [m for m, flag in zip(self.MONTHS, defined, strict=True) if flag]
        return grid, defs, hot

    def test_coupled_planting_is_detected(self) -> None:
        rng = np.random.default_rng(51)
        runs = 200
        detected = 0
        for _ in range(runs):
            grid, defs, hot = self._grid(rng, 0.3, 0.1)
            stats = contingency_for("ud", defs, hot, grid)
            assert stats.p_d_given_u is not None and stats.p_d_given_not_u is not None
            if stats.p_d_given_u > stats.p_d_given_not_u and stats.d_test.rejects(0.001):
                detected += 1
        assert detected / runs >= 0.99

    def test_independent_planting_rarely_rejects(self) -> None:
        rng = np.random.default_rng(52)
        runs = 200
        rejected = 0
        for _ in range(runs):
            grid, defs, hot = self._grid(rng, 0.15, 0.15)
            if contingency_for("ud", defs, hot, grid).d_test.rejects(0.001):
                rejected += 1
        assert rejected / runs <= 0.01
