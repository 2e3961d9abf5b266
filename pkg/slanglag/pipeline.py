# SPDX-License-Identifier: MIT
"""The ``match``, ``analyze`` and ``plotdata`` stages.

SPDX-License-Identifier: MIT

``match`` turns event files into ``daily_counts.csv`` and ``coverage.csv``;
``analyze`` reads only those files plus the declared dictionary, stopword and
lexicon inputs; ``plotdata`` reads only ``analyze`` outputs. Every stage writes
through :func:`slanglag.output.staged_output`, so a failed run leaves the
output directory untouched.
"""

from __future__ import annotations

import json
import logging
import re
import sys
from collections import Counter, defaultdict
from collections.abc import Iterable, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import Any

from slanglag import __version__
from slanglag.association import lexicon_coverage, pmi_tags
from slanglag.config import RunConfig
from slanglag.correlation import CorrelationRun, correlate_terms
from slanglag.dictionary import (
    DictionaryLoad,
    filter_terms,
    load_dictionary_file,
    load_wordlist,
    select_analysis_terms,
    selection_exclusions,
)
from slanglag.errors import (
    AnalysisError,
    ConfigError,
    DegenerateSeriesError,
    ImputationError,
    TermNotFoundError,
)
from slanglag.fuzzy import suggest_terms
from slanglag.ingest import (
    CoverageTable,
    DailyCounts,
    KeepAll,
    KeepLanguage,
    LanguageFilter,
    ShardResult,
    ingest_stream,
)
from slanglag.matcher import PatternSet, build_automaton
from slanglag.models import Exclusion, ExclusionReason, Platform, Provenance, normalize_term
from slanglag.output import (
    file_sha256,
    read_csv,
    staged_output,
    write_csv,
    write_csv_to,
    write_json,
)
from slanglag.series import MonthlySeries, activity_series, normalize, overlap, twitter_series
from slanglag.trends import (
    ContingencyStats,
    TrendReport,
    contingency,
    detect_trends,
    overlap_grid,
)

logger = logging.getLogger(__name__)

DAILY_COUNTS = "daily_counts.csv"
COVERAGE = "coverage.csv"
MATCH_MANIFEST = "match_manifest.json"
SERIES_TWITTER = "series_twitter.csv"
SERIES_UD = "series_ud.csv"
CORRELATIONS = "correlations.csv"
LAG_HISTOGRAM = "lag_histogram.csv"
PMI = "pmi.csv"
LEXICON_COVERAGE = "lexicon_coverage.csv"
SEGMENTS = "segments.csv"
TRENDING_MONTHS = "trending_months.csv"
CONTINGENCY = "contingency.csv"
EXCLUSIONS = "exclusions.csv"
SUMMARY = "summary.json"
ANALYZE_MANIFEST = "analyze_manifest.json"

DAILY_HEADER = ("term_id", "day", "count")
COVERAGE_HEADER = ("month", "observed_minutes", "expected_minutes", "missing_days")
SERIES_HEADER = ("term_id", "month", "value", "provenance")
CORRELATION_HEADER = (
    "term_id",
    "best_lag",
    "r_best",
    "p_value",
    "q_value",
    "category",
    "overlap_len",
    "p_permutation",
)
HISTOGRAM_HEADER = ("lag", "category", "count")
PMI_HEADER = ("tag", "group", "pmi", "joint_count", "tag_count", "group_count", "total")
LEXICON_HEADER = ("group", "lag_bucket", "defined_fraction", "n_terms")
SEGMENT_HEADER = ("term_id", "platform", "start_month", "end_month", "slope", "trending")
TRENDING_HEADER = ("term_id", "platform", "month")
CONTINGENCY_HEADER = ("platform", "quantity", "value", "p_value", "reject")
EXCLUSION_HEADER = ("term_id", "stage", "reason")
PLOT_HEADER = (
    "month",
    "ud_value",
    "twitter_value",
    "ud_norm",
    "twitter_norm",
    "ud_trending",
    "twitter_trending",
)

_ANY_LANGUAGE = frozenset({"", "*", "any"})
_UNSAFE_FILENAME = re.compile(r"[^\w.-]+")


@dataclass
class MatchSummary:
    """What ``match`` did, for display and ``--json``."""

    out_dir: Path
    config_hash: str
    files: int
    patterns: int
    automaton_states: int
    terms_matched: int
    stats: dict[str, int]
    issues: list[str] = field(default_factory=list)

    def as_dict(self) -> dict[str, Any]:
        """JSON-ready form."""
        return {
            "out_dir": str(self.out_dir),
            "config_hash": self.config_hash,
            "files": self.files,
            "patterns": self.patterns,
            "automaton_states": self.automaton_states,
            "terms_matched": self.terms_matched,
            "stats": self.stats,
            "issues": self.issues,
        }


@dataclass
class AnalyzeSummary:
    """Headline numbers of an ``analyze`` run; also written as ``summary.json``."""

    config_hash: str
    matched: int
    selected: int
    analysed: int
    categories: dict[str, int]
    lag_histogram: dict[str, dict[str, int]]
    exclusions: dict[str, int]
    contingency: dict[str, dict[str, float | bool | None]]
    out_dir: Path | None = None

    def as_dict(self) -> dict[str, Any]:
        """JSON-ready form (``out_dir`` left out so the file is location independent)."""
        return {
            "config_hash": self.config_hash,
            "matched": self.matched,
            "selected": self.selected,
            "analysed": self.analysed,
            "categories": self.categories,
            "lag_histogram": self.lag_histogram,
            "exclusions": self.exclusions,
            "contingency": self.contingency,
        }


# -----------------------------------------------------------------------------
# Shared helpers
# -----------------------------------------------------------------------------


def language_filter(code: str) -> LanguageFilter:
    """Filter keeping one language, or everything for ``""``, ``*`` or ``any``."""
    code = code.strip().lower()
    return KeepAll() if code in _ANY_LANGUAGE else KeepLanguage(code)


def _load_inputs(config: RunConfig) -> tuple[DictionaryLoad, frozenset[str]]:
    config.require("dictionary")
    if config.stopwords is not None:
        config.require("stopwords")
    assert config.dictionary is not None
    loaded = load_dictionary_file(config.dictionary, error_budget=config.error_budget)
    stopwords = load_wordlist(config.stopwords) if config.stopwords else frozenset()
    return loaded, stopwords


def _input_hashes(paths: Iterable[Path | None]) -> dict[str, str]:
    return {str(p): file_sha256(p) for p in paths if p is not None}


def _stage_input(out_dir: Path, name: str, producer: str = "match") -> Path:
    path = out_dir / name
    if not path.is_file():
        raise ConfigError(f"{path} not found; run 'slanglag {producer}' first")
    return path


# -----------------------------------------------------------------------------
# match
# -----------------------------------------------------------------------------


def cmd_match(config: RunConfig) -> MatchSummary:
    """Scan the event files and write daily counts, coverage and a manifest.

    Raises:
        ConfigError: Missing dictionary, no input files, or no eligible terms.
        ShardError: An event file could not be read; nothing is written.

    """
    loaded, stopwords = _load_inputs(config)
    files = config.event_files()
    eligible = filter_terms(loaded.terms.values(), config.criteria(stopwords))
    if not eligible:
        raise ConfigError("no dictionary terms left after length and stopword filtering")

    matcher = build_automaton(PatternSet.from_terms(eligible))
    logger.info(
        "matching %d patterns (%d states) over %d files",
        matcher.pattern_count,
        matcher.state_count,
        len(files),
    )
    result: ShardResult = ingest_stream(
        files,
        matcher,
        language_filter(config.lang),
        config.window,
        fmt=config.event_format(),
        count_per_doc=config.count_per_doc,
        workers=config.threads,
    )

    issues = [str(i) for i in loaded.issues]
    config_hash = config.config_hash()
    manifest = {
        "tool": f"slanglag {__version__}",
        "stage": "match",
        "config_hash": config_hash,
        "config": config.snapshot(),
        "inputs": _input_hashes([config.dictionary, config.stopwords, *files]),
        "stats": result.stats.as_dict(),
        "patterns": matcher.pattern_count,
        "automaton_states": matcher.state_count,
        "issues": issues,
    }
    with staged_output(config.out) as stage:
        write_csv(stage / DAILY_COUNTS, DAILY_HEADER, result.daily.to_rows())
        write_csv(stage / COVERAGE, COVERAGE_HEADER, result.coverage.table().to_rows())
        write_json(stage / MATCH_MANIFEST, manifest)

    return MatchSummary(
        out_dir=config.out,
        config_hash=config_hash,
        files=len(files),
        patterns=matcher.pattern_count,
        automaton_states=matcher.state_count,
        terms_matched=len(result.daily.terms()),
        stats=result.stats.as_dict(),
        issues=issues,
    )


# -----------------------------------------------------------------------------
# analyze
# -----------------------------------------------------------------------------


def _check_match_window(config: RunConfig) -> None:
    manifest = json.loads(_stage_input(config.out, MATCH_MANIFEST).read_text(encoding="utf-8"))
    window = manifest.get("config", {}).get("window")
    if window != str(config.window):
        raise ConfigError(
            f"match outputs cover window {window}, analysis asks for {config.window}; "
            "rerun 'slanglag match'"
        )


def _selection_error(
    reasons: Mapping[str, ExclusionReason], matched: int, selected: int
) -> AnalysisError:
    by_reason = Counter(str(r) for r in reasons.values())
    detail = ", ".join(f"{k}={by_reason[k]}" for k in sorted(by_reason)) or "no matched terms"
    return AnalysisError(
        f"only {selected} of {matched} matched terms pass selection (need 2): {detail}",
        reason="too_few_terms",
    )


def build_pairs(
    terms: Iterable[str],
    loaded: DictionaryLoad,
    daily: DailyCounts,
    coverage: CoverageTable,
    config: RunConfig,
) -> tuple[dict[str, tuple[MonthlySeries, MonthlySeries]], list[Exclusion]]:
    """Dictionary-side and corrected Twitter-side series for each selected term."""
    per_term = daily.by_term()
    pairs: dict[str, tuple[MonthlySeries, MonthlySeries]] = {}
    excluded: list[Exclusion] = []
    for term in sorted(terms):
        ud = activity_series(loaded.terms[term], config.window)
        if ud is None:
            excluded.append(Exclusion(term, "series", ExclusionReason.NO_ACTIVITY))
            continue
        try:
            tw = twitter_series(
                term, per_term.get(term, {}), coverage, config.window, config.max_missing_days
            )
        except ImputationError:
            excluded.append(Exclusion(term, "series", ExclusionReason.IMPUTATION_IMPOSSIBLE))
            continue
        pairs[term] = (ud, tw)
    return pairs, excluded


def _trend_reports(
    pairs: Mapping[str, tuple[MonthlySeries, MonthlySeries]], config: RunConfig
) -> tuple[list[TrendReport], list[Exclusion]]:
    reports: list[TrendReport] = []
    excluded: list[Exclusion] = []
    for term in sorted(pairs):
        ud, tw = pairs[term]
        for platform, series in ((Platform.UD, ud), (Platform.TWITTER, tw)):
            report = detect_trends(
                series, platform, penalty=config.pelt_penalty, cost=config.pelt_cost
            )
            if report.reason is not None:
                excluded.append(Exclusion(term, f"trends:{platform}", report.reason))
            reports.append(report)
    return reports, excluded


def _histogram_dict(run: CorrelationRun) -> dict[str, dict[str, int]]:
    out: dict[str, dict[str, int]] = defaultdict(dict)
    for (lag, category), n in sorted(run.histogram.items()):
        out[str(lag)][str(category)] = n
    return dict(out)


def _contingency_dict(
    stats: Mapping[Platform, ContingencyStats], alpha: float
) -> dict[str, dict]:
    return {
        str(platform): {
            "p(d|u)": s.p_d_given_u,
            "p(d|~u)": s.p_d_given_not_u,
            "p(u|d)": s.p_u_given_d,
            "p(u|~d)": s.p_u_given_not_d,
            "d_test_p": s.d_test.p_value,
            "u_test_p": s.u_test.p_value,
            "d_test_reject": s.d_test.decision(alpha),
            "u_test_reject": s.u_test.decision(alpha),
        }
        for platform, s in sorted(stats.items())
    }


def cmd_analyze(config: RunConfig) -> AnalyzeSummary:
    """Run selection, series, correlation, association, trends and contingency.

    Raises:
        ConfigError: Missing inputs or match outputs for another window.
        AnalysisError: Fewer than two terms pass selection.

    """
    loaded, stopwords = _load_inputs(config)
    if config.lexicon is not None:
        config.require("lexicon")
    _check_match_window(config)

    daily_path = _stage_input(config.out, DAILY_COUNTS)
    coverage_path = _stage_input(config.out, COVERAGE)
    daily = DailyCounts.from_rows(read_csv(daily_path, DAILY_HEADER))
    coverage = CoverageTable.from_rows(read_csv(coverage_path, COVERAGE_HEADER))

    criteria = config.criteria(stopwords)
    totals = daily.totals()
    selected = select_analysis_terms(loaded.terms, totals, criteria, config.window)
    reasons = selection_exclusions(loaded.terms, totals, criteria, config.window)
    if len(selected) < 2:
        raise _selection_error(reasons, len(totals), len(selected))
    exclusions = [Exclusion(t, "selection", r) for t, r in reasons.items()]
    logger.info("selected %d of %d matched terms", len(selected), len(totals))

    pairs, series_excluded = build_pairs(selected, loaded, daily, coverage, config)
    exclusions += series_excluded

    run = correlate_terms(
        pairs,
        k_min=config.k_min,
        k_max=config.k_max,
        min_overlap=config.min_overlap_months,
        alpha=config.alpha,
        mode=config.ccf_mode,
        permutations=config.permutations,
        seed=config.seed,
    )
    exclusions += run.exclusions
    categories = {r.term_id: r.category for r in run.results}
    lags = {r.term_id: r.best_lag for r in run.results}

    associations = pmi_tags(
        {t: loaded.terms[t].tags for t in categories},
        categories,
        min_support=config.pmi_min_support,
        base=config.pmi_log_base,
    )
    coverage_rows = None
    if config.lexicon is not None:
        coverage_rows = lexicon_coverage(categories, lags, load_wordlist(config.lexicon))
    else:
        logger.warning("no lexicon configured; skipping %s", LEXICON_COVERAGE)

    analysed = {t: pairs[t] for t in sorted(categories)}
    reports, trend_excluded = _trend_reports(analysed, config)
    exclusions += trend_excluded
    trending: dict[Platform, dict[str, frozenset[str]]] = {p: {} for p in Platform}
    for report in reports:
        trending[report.platform][report.term_id] = report.trending_months
    definitions = {t: loaded.terms[t].definition_months for t in analysed}
    stats = contingency(definitions, trending, overlap_grid(analysed))

    config_hash = config.config_hash()
    summary = AnalyzeSummary(
        config_hash=config_hash,
        matched=len(totals),
        selected=len(selected),
        analysed=len(run.results),
        categories=run.counts(),
        lag_histogram=_histogram_dict(run),
        exclusions=dict(sorted(Counter(str(e.reason) for e in exclusions).items())),
        contingency=_contingency_dict(stats, config.alpha_trend),
        out_dir=config.out,
    )
    manifest = {
        "tool": f"slanglag {__version__}",
        "stage": "analyze",
        "config_hash": config_hash,
        "config": config.snapshot(),
        "inputs": _input_hashes(
            [config.dictionary, config.stopwords, config.lexicon, daily_path, coverage_path]
        ),
    }

    with staged_output(config.out, remove=[LEXICON_COVERAGE]) as stage:
        write_csv(
            stage / SERIES_TWITTER,
            SERIES_HEADER,
            (row for _, tw in pairs.values() for row in tw.rows()),
        )
        write_csv(
            stage / SERIES_UD,
            SERIES_HEADER,
            (row for ud, _ in pairs.values() for row in ud.rows()),
        )
        write_csv(stage / CORRELATIONS, CORRELATION_HEADER, (r.row() for r in run.results))
        write_csv(
            stage / LAG_HISTOGRAM,
            HISTOGRAM_HEADER,
            ((lag, str(cat), n) for (lag, cat), n in sorted(run.histogram.items())),
        )
        write_csv(stage / PMI, PMI_HEADER, (a.row() for a in associations))
        if coverage_rows is not None:
            write_csv(stage / LEXICON_COVERAGE, LEXICON_HEADER, (c.row() for c in coverage_rows))
        write_csv(
            stage / SEGMENTS, SEGMENT_HEADER, (row for r in reports for row in r.segment_rows())
        )
        write_csv(
            stage / TRENDING_MONTHS,
            TRENDING_HEADER,
            (
                (r.term_id, str(r.platform), m)
                for r in reports
                for m in sorted(r.trending_months)
            ),
        )
        write_csv(
            stage / CONTINGENCY,
            CONTINGENCY_HEADER,
            (row for _, s in sorted(stats.items()) for row in s.rows(config.alpha_trend)),
        )
        write_csv(stage / EXCLUSIONS, EXCLUSION_HEADER, (e.row() for e in sorted(exclusions)))
        write_json(stage / SUMMARY, summary.as_dict())
        write_json(stage / ANALYZE_MANIFEST, manifest)
    return summary


# -----------------------------------------------------------------------------
# plotdata
# -----------------------------------------------------------------------------


def read_series(path: Path) -> dict[str, MonthlySeries]:
    """Rebuild series written to ``series_*.csv``."""
    grouped: dict[str, dict[str, tuple[float, Provenance]]] = defaultdict(dict)
    for term, month, value, prov, *_ in read_csv(path, SERIES_HEADER):
        grouped[term][month] = (float(value), Provenance(prov))
    out: dict[str, MonthlySeries] = {}
    for term, values in grouped.items():
        months = sorted(values)
        out[term] = MonthlySeries(
            term_id=term,
            months=tuple(months),
            values=tuple(values[m][0] for m in months),
            provenance=tuple(values[m][1] for m in months),
        )
    return out


def _norm_or_none(series: MonthlySeries, span: list[str]) -> dict[str, float]:
    try:
        return normalize(series, span).as_dict()
    except DegenerateSeriesError:
        logger.warning("'%s' is constant over the overlap; no norm column", series.term_id)
        return {}


def plot_table(config: RunConfig, term: str) -> tuple[str, list[tuple[Any, ...]]]:
    """Aligned rows for ``term`` over its overlap months.

    Raises:
        TermNotFoundError: ``term`` was not analysed; carries nearest matches.

    """

    def analysis_file(name: str) -> Path:
        """Path of an analyze output that must already exist."""
        return _stage_input(config.out, name, "analyze")

    analysed = [row[0] for row in read_csv(analysis_file(CORRELATIONS), CORRELATION_HEADER)]
    term_id = normalize_term(term)
    if term_id not in analysed:
        raise TermNotFoundError(term, suggest_terms(term_id, analysed))

    ud = read_series(analysis_file(SERIES_UD))[term_id]
    tw = read_series(analysis_file(SERIES_TWITTER))[term_id]
    hot: dict[str, set[str]] = defaultdict(set)
    for t, platform, month, *_ in read_csv(analysis_file(TRENDING_MONTHS), TRENDING_HEADER):
        if t == term_id:
            hot[platform].add(month)

    span = overlap(ud, tw)
    ud_values, tw_values = ud.as_dict(), tw.as_dict()
    ud_norm, tw_norm = _norm_or_none(ud, span), _norm_or_none(tw, span)
    rows = [
        (
            m,
            ud_values[m],
            tw_values[m],
            ud_norm.get(m),
            tw_norm.get(m),
            int(m in hot[str(Platform.UD)]),
            int(m in hot[str(Platform.TWITTER)]),
        )
        for m in span
    ]
    return term_id, rows


def plot_filename(term_id: str) -> str:
    """``plot_<term>.csv`` with characters unsafe in file names replaced."""
    return f"plot_{_UNSAFE_FILENAME.sub('_', term_id)}.csv"


def cmd_plotdata(config: RunConfig, term: str, *, stdout: bool = False) -> Path | None:
    """Write ``plot_<term>.csv`` (or CSV on stdout); returns the written path."""
    term_id, rows = plot_table(config, term)
    if stdout:
        write_csv_to(sys.stdout, PLOT_HEADER, rows)
        return None
    with staged_output(config.out) as stage:
        write_csv(stage / plot_filename(term_id), PLOT_HEADER, rows)
    return config.out / plot_filename(term_id)

