# SPDX-License-Identifier: MIT
"""Load, validate and filter the term dictionary.

SPDX-License-Identifier: MIT
"""

from __future__ import annotations

import gzip
import json
import logging
from collections.abc import Iterable, Iterator, Mapping
from dataclasses import dataclass, field
from pathlib import Path
from typing import IO

from pydantic import ValidationError

from slanglag.errors import ErrorBudgetExceeded, RecordError, RecordIssue
from slanglag.models import ExclusionReason, SelectionCriteria, TermRecord, normalize_term
from slanglag.months import MonthRange

logger = logging.getLogger(__name__)

DEFAULT_ERROR_BUDGET = 0.01


@dataclass
class DictionaryLoad:
    """Result of :func:`load_dictionary`."""

    terms: dict[str, TermRecord] = field(default_factory=dict)
    issues: list[RecordIssue] = field(default_factory=list)
    records: int = 0

    @property
    def error_fraction(self) -> float:
        """Share of records that produced an issue."""
        return len(self.issues) / self.records if self.records else 0.0


def open_text(path: Path) -> IO[str]:
    """Open a UTF-8 text file, transparently gunzipping ``*.gz``."""
    if path.suffix == ".gz":
        return gzip.open(path, "rt", encoding="utf-8")
    return path.open(encoding="utf-8")


def _format_validation(exc: ValidationError) -> str:
    first = exc.errors()[0]
    where = ".".join(str(p) for p in first["loc"])
    return f"{where}: {first['msg']}" if where else first["msg"]


def parse_record(line: str, lineno: int | None = None) -> TermRecord:
    """Parse one dictionary line.

    Raises:
        RecordError: If the line is not a JSON object describing a valid term.

    """
    try:
        raw = json.loads(line)
        if not isinstance(raw, dict):
            raise ValueError("record is not a JSON object")
        return TermRecord.model_validate(raw)
    except ValidationError as e:
        raise RecordError(_format_validation(e), line=lineno) from e
    except ValueError as e:
        raise RecordError(str(e), line=lineno) from e


def load_dictionary(
    source: Iterable[str],
    *,
    error_budget: float = DEFAULT_ERROR_BUDGET,
) -> DictionaryLoad:
    """Parse newline-delimited JSON dictionary records.

    Duplicate headwords merge: tags union, votes sum, definition months
    concatenate, and the record carrying an activity map supplies it. Two
    different activity maps for one headword keep the first and report a
    term-level issue.

    Args:
        source: Lines of the dictionary file.
        error_budget: Largest tolerated fraction of records with issues.

    Returns:
        The merged terms plus every collected issue.

    Raises:
        ErrorBudgetExceeded: When issues exceed ``error_budget`` of the records.

    """
    result = DictionaryLoad()
    for lineno, line in enumerate(source, start=1):
        if not line.strip():
            continue
        result.records += 1
        try:
            record = parse_record(line, lineno)
        except RecordError as e:
            result.issues.append(RecordIssue(str(e), line=e.line))
            continue

        existing = result.terms.get(record.term)
        if existing is None:
            result.terms[record.term] = record
            continue
        if (
            existing.activity is not None
            and record.activity is not None
            and existing.activity != record.activity
        ):
            result.issues.append(
                RecordIssue("conflicting activity maps", line=lineno, term=record.term)
            )
            record = record.model_copy(update={"activity": None})
        result.terms[record.term] = existing.merged_with(record)

    if result.error_fraction > error_budget:
        raise ErrorBudgetExceeded(
            f"{len(result.issues)} of {result.records} dictionary records have errors "
            f"(budget {error_budget:.2%})",
            reason="error_budget",
        )
    for issue in result.issues:
        logger.warning("dictionary: %s", issue)
    return result


def load_dictionary_file(
    path: Path, *, error_budget: float = DEFAULT_ERROR_BUDGET
) -> DictionaryLoad:
    """Load a dictionary file (plain or ``.gz``)."""
    with open_text(path) as fh:
        return load_dictionary(fh, error_budget=error_budget)


def iter_wordlist(lines: Iterable[str]) -> Iterator[str]:
    """Yield normalized entries of a one-per-line word list."""
    for line in lines:
        entry = normalize_term(line)
        if entry and not entry.startswith("#"):
            yield entry


def load_wordlist(path: Path) -> frozenset[str]:
    """Load a stopword or lexicon file."""
    with open_text(path) as fh:
        return frozenset(iter_wordlist(fh))


def filter_terms(terms: Iterable[str | TermRecord], criteria: SelectionCriteria) -> set[str]:
    """Return the headwords eligible for matching.

    Drops headwords shorter than ``min_term_length`` characters and headwords
    whose whole normalized form is a stopword. Multi-word expressions that merely
    contain a stopword are kept.
    """
    eligible: set[str] = set()
    for item in terms:
        term = normalize_term(item.term if isinstance(item, TermRecord) else item)
        if len(term) < criteria.min_term_length or term in criteria.stopwords:
            continue
        eligible.add(term)
    return eligible


def overlap_months(record: TermRecord, window: MonthRange) -> int:
    """Number of activity months of ``record`` inside ``window``."""
    if not record.activity:
        return 0
    return sum(1 for month in record.activity if month in window)


def select_analysis_terms(
    terms: Mapping[str, TermRecord],
    twitter_totals: Mapping[str, int],
    criteria: SelectionCriteria,
    window: MonthRange,
) -> set[str]:
    """Keep terms defined in the dictionary, frequent enough, with enough activity overlap.

    All thresholds are inclusive.
    """
    selected: set[str] = set()
    for term, total in twitter_totals.items():
        record = terms.get(term)
        if record is None or record.activity is None:
            continue
        if total < criteria.min_occurrences:
            continue
        if overlap_months(record, window) < criteria.min_overlap_months:
            continue
        selected.add(term)
    return selected


def selection_exclusions(
    terms: Mapping[str, TermRecord],
    twitter_totals: Mapping[str, int],
    criteria: SelectionCriteria,
    window: MonthRange,
) -> dict[str, ExclusionReason]:
    """Why each matched term failed :func:`select_analysis_terms` (first failed criterion)."""
    reasons: dict[str, ExclusionReason] = {}
    for term, total in sorted(twitter_totals.items()):
        record = terms.get(term)
        if record is None or record.activity is None:
            reasons[term] = ExclusionReason.NO_ACTIVITY
        elif total < criteria.min_occurrences:
            reasons[term] = ExclusionReason.BELOW_MIN_OCCURRENCES
        elif overlap_months(record, window) < criteria.min_overlap_months:
            reasons[term] = ExclusionReason.INSUFFICIENT_OVERLAP
    return reasons
