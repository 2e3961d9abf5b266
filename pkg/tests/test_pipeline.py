"""Tests for pipeline helpers that the CLI flows do not reach directly."""

from __future__ import annotations

from pathlib import Path

from slanglag.config import RunConfig
from slanglag.dictionary import DictionaryLoad
from slanglag.ingest import CoverageTable, DailyCounts, KeepAll, KeepLanguage
from slanglag.models import ExclusionReason, Platform, Provenance, TermRecord
from slanglag.output import write_csv
from slanglag.pipeline import (
    SERIES_HEADER,
    _contingency_dict,
    build_pairs,
    language_filter,
    plot_filename,
    read_series,
)
from slanglag.series import MonthlySeries
from slanglag.trends import contingency_for

FULL = {"2012-01": 31 * 1440, "2012-02": 29 * 1440, "2012-03": 31 * 1440}


def test_language_filter() -> None:
    assert isinstance(language_filter("any"), KeepAll)
    assert isinstance(language_filter("*"), KeepAll)
    assert language_filter(" EN ") == KeepLanguage("en")


def test_plot_filename() -> None:
    assert plot_filename("on fleek") == "plot_on_fleek.csv"
    assert plot_filename("d'oh/../x") == "plot_d_oh_.._x.csv"


def test_read_series_round_trip(tmp_path: Path) -> None:
    series = MonthlySeries(
        "x",
        ("2012-01", "2012-02"),
        (1.5, 0.1),
        (Provenance.OBSERVED, Provenance.IMPUTED),
    )
    path = write_csv(tmp_path / "s.csv", SERIES_HEADER, series.rows())
    assert read_series(path) == {"x": series}


def test_build_pairs_exclusions() -> None:
    terms = {
        "active": TermRecord(term="active", activity={"2012-01": 1, "2012-03": 2}),
        "silent": TermRecord(term="silent"),
        "dark": TermRecord(term="dark", activity={"2012-01": 1, "2012-02": 2}),
    }
    loaded = DictionaryLoad(terms=terms)
    daily = DailyCounts({("active", "2012-01-01"): 31, ("dark", "2012-01-01"): 3})
    coverage = CoverageTable(
        observed_minutes=FULL,
        missing_day_counts=dict.fromkeys(FULL, 0),
    )
    config = RunConfig(window="2012-01:2012-03")
    pairs, excluded = build_pairs(terms, loaded, daily, coverage, config)
    assert set(pairs) == {"active", "dark"}
    ud, tw = pairs["active"]
    assert ud.as_dict() == {"2012-01": 1.0, "2012-02": 0.0, "2012-03": 2.0}
    assert tw.values[0] == 1.0
    assert [(e.term_id, e.reason) for e in excluded] == [("silent", ExclusionReason.NO_ACTIVITY)]


def test_build_pairs_imputation_impossible() -> None:
    terms = {"x": TermRecord(term="x", activity={"2012-01": 1})}
    coverage = CoverageTable(
        observed_minutes=dict.fromkeys(FULL, 0),
        missing_day_counts={"2012-01": 31, "2012-02": 29, "2012-03": 31},
    )
    pairs, excluded = build_pairs(
        terms,
        DictionaryLoad(terms=terms),
        DailyCounts(),
        coverage,
        RunConfig(window="2012-01:2012-03"),
    )
    assert pairs == {}
    assert excluded[0].reason is ExclusionReason.IMPUTATION_IMPOSSIBLE


def test_contingency_summary_follows_trend_level() -> None:
    grid = {"a": [f"2000-{m:02d}" for m in range(1, 9)]}
    stats = {Platform.UD: contingency_for("ud", {"a": grid["a"][:3]}, {"a": grid["a"][:4]}, grid)}
    loose = _contingency_dict(stats, 0.1)["ud"]
    strict = _contingency_dict(stats, 0.001)["ud"]
    assert loose["d_test_p"] == strict["d_test_p"]
    assert loose["d_test_reject"] is True
    assert strict["d_test_reject"] is False
    assert loose["p(d|u)"] == 0.75
