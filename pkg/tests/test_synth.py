"""Tests for the synthetic corpus generator."""

from __future__ import annotations

import numpy as np
import pytest
from pydantic import ValidationError

from slanglag.ingest import KeepLanguage, ingest_stream
from slanglag.matcher import PatternSet, build_automaton
from slanglag.months import MonthRange, expected_minutes, shift_month
from slanglag.series import monthly_totals
from slanglag.synth import (
    SynthSpec,
    dropout_coverage,
    generate,
    lagged_pair,
    load_truth,
    ramp_series,
    ramp_values,
    term_name,
)


@pytest.fixture
def small_spec() -> SynthSpec:
    return SynthSpec(n_terms=2, start="2014-01", months=4, lags=(1, -2), signs=(1, -1))


def _ingest(out_dir, truth):
    files = sorted((out_dir / "events").glob("*.jsonl"))
    matcher = build_automaton(PatternSet.from_terms(t.term for t in truth.terms))
    window = MonthRange.parse(truth.window)
    return ingest_stream(files, matcher, KeepLanguage("en"), window)


class TestSynthSpec:
    """Tests for SynthSpec validation and defaults."""

    def test_defaults(self) -> None:
        spec = SynthSpec()
        assert str(spec.window) == "2014-01:2015-12"
        assert [spec.lag_of(i) for i in range(8)] == [-3, -2, -1, 0, 1, 2, 3, -3]
        assert spec.sign_of(0) == 1
        assert spec.intervals_of(0) == ()

    @pytest.mark.parametrize(
        "fields",
        [
            {"n_terms": 2, "lags": (1,)},
            {"n_terms": 1, "lags": (4,)},
            {"n_terms": 1, "signs": (0,)},
            {"n_terms": 1, "months": 6, "trend_intervals": (((4, 3),),)},
            {"base_level": 5, "peak_level": 2},
            {"dropout": 1.0},
            {"unknown": 1},
        ],
    )
    def test_infeasible(self, fields: dict) -> None:
        with pytest.raises(ValidationError):
            SynthSpec.model_validate(fields)


class TestHelpers:
    """Tests for the in-memory helpers."""

    def test_ramp_values(self) -> None:
        assert ramp_values(6, [(2, 2)], 2, 12).tolist() == [2, 2, 7, 12, 2, 2]

    def test_ramp_series(self) -> None:
        series, planted = ramp_series(6, [(1, 2)], base=0.0, peak=4.0)
        assert series.values == (0.0, 2.0, 4.0, 0.0, 0.0, 0.0)
        assert planted == {"2000-02", "2000-03"}

    def test_lagged_pair(self) -> None:
        ud, tw = lagged_pair(12, 2, 0.0, np.random.default_rng(0), sign=-1)
        ud_map, tw_map = ud.as_dict(), tw.as_dict()
        for month in tw.months[:10]:
            assert ud_map[shift_month(month, 2)] == pytest.approx(-tw_map[month])

    def test_dropout_coverage(self) -> None:
        window = MonthRange.parse("2014-01:2014-02")
        full = dropout_coverage(window, 0.0, np.random.default_rng(0))
        assert full.observed("2014-02") == expected_minutes("2014-02")
        half = dropout_coverage(window, 0.5, np.random.default_rng(0))
        assert 0 < half.observed("2014-01") < expected_minutes("2014-01")


class TestGenerate:
    """Tests for generate() and load_truth()."""

    def test_layout_and_manifest(self, tmp_path, small_spec) -> None:
        truth = generate(small_spec, tmp_path)
        assert sorted(p.name for p in (tmp_path / "events").iterdir()) == [
            f"events-2014-0{m}.jsonl" for m in range(1, 5)
        ]
        for name in ("dictionary.jsonl", "lexicon.txt", "stopwords.txt", "manifest.json"):
            assert (tmp_path / name).is_file()
        assert load_truth(tmp_path / "manifest.json") == truth
        assert [t.term for t in truth.terms] == [term_name(0), term_name(1)]

    def test_deterministic(self, tmp_path, small_spec) -> None:
        generate(small_spec, tmp_path / "a")
        generate(small_spec, tmp_path / "b")
        files = sorted(p.relative_to(tmp_path / "a") for p in (tmp_path / "a").rglob("*.*"))
        assert files
        for rel in files:
            assert (tmp_path / "a" / rel).read_bytes() == (tmp_path / "b" / rel).read_bytes()

    def test_planted_activity_relation(self, tmp_path, small_spec) -> None:
        truth = generate(small_spec, tmp_path)
        for term in truth.terms:
            offsets = {
                term.activity[shift_month(m, term.lag)] - 10 * term.sign * n
                for m, n in term.twitter_daily.items()
                if shift_month(m, term.lag) in term.activity
            }
            assert len(offsets) == 1

    def test_full_coverage_recovers_totals(self, tmp_path, small_spec) -> None:
        truth = generate(small_spec, tmp_path)
        result = _ingest(tmp_path, truth)
        window = MonthRange.parse(truth.window)
        assert all(v == 0 for v in truth.dropped_minutes.values())
        for month in window.months():
            assert result.coverage.observed(month) == expected_minutes(month)
        by_term = result.daily.by_term()
        for term in truth.terms:
            assert monthly_totals(by_term.get(term.term, {}), window) == term.twitter_totals

    def test_dropout_matches_coverage(self, tmp_path) -> None:
        spec = SynthSpec(n_terms=1, start="2014-01", months=4, dropout=0.2, seed=3)
        truth = generate(spec, tmp_path)
        result = _ingest(tmp_path, truth)
        for month, dropped in truth.dropped_minutes.items():
            assert dropped > 0
            assert result.coverage.observed(month) == expected_minutes(month) - dropped

    def test_full_coupling_defines_trending_months(self, tmp_path) -> None:
        spec = SynthSpec(
            n_terms=1,
            months=6,
            trend_intervals=(((2, 2),),),
            coupling=1.0,
            baseline_definition_rate=0.0,
        )
        (term,) = generate(spec, tmp_path).terms
        assert term.trending_months == ["2014-03", "2014-04"]
        assert term.definition_months == term.trending_months
