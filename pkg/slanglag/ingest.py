# SPDX-License-Identifier: MIT
"""Stream timestamped events, run the matcher, and aggregate per-day counts.

SPDX-License-Identifier: MIT

Each event file is a shard. A shard is reduced to a :class:`ShardResult`
(daily counts, minute coverage, line statistics); shards are mapped in worker
processes and merged by a single coordinator in input order, so the output
does not depend on the worker count.
"""

from __future__ import annotations

import gzip
import json
import logging
import re
from collections import Counter
from collections.abc import Iterable, Iterator, Mapping, Sequence
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, fields
from datetime import UTC, datetime
from functools import reduce
from pathlib import Path
from typing import IO, Any, Protocol

import numpy as np

from slanglag.errors import MissingMonthError, ShardError
from slanglag.matcher import Matcher, scan_text
from slanglag.months import (
    MINUTES_PER_DAY,
    MonthRange,
    days_in_month,
    expected_minutes,
    month_of,
)

logger = logging.getLogger(__name__)

TWITTER_CREATED_AT = "%a %b %d %H:%M:%S %z %Y"
_EPOCH_MS_THRESHOLD = 10**11
_NUMERIC_RE = re.compile(r"\d+(?:\.\d+)?")


# -----------------------------------------------------------------------------
# Events
# -----------------------------------------------------------------------------


@dataclass(frozen=True, slots=True)
class EventFormat:
    """Where to find the fields of an event line."""

    time_keys: tuple[str, ...] = ("created_at", "ts", "timestamp_ms")
    text_key: str = "text"
    lang_key: str = "lang"
    time_format: str = "auto"  # auto | iso | epoch | twitter


@dataclass(frozen=True, slots=True)
class TextEvent:
    """One timestamped document; ``text`` is ``None`` for a heartbeat line."""

    event_time: datetime
    text: str | None
    language: str | None = None


class MalformedEventError(ValueError):
    """An event line cannot be parsed."""


def _from_epoch(value: float) -> datetime:
    if value > _EPOCH_MS_THRESHOLD:
        value /= 1000.0
    return datetime.fromtimestamp(value, tz=UTC)


def parse_time(value: Any, time_format: str = "auto") -> datetime:
    """Parse an event timestamp into a UTC datetime truncated to the minute.

    Raises:
        MalformedEventError: If the value matches none of the accepted layouts.

    """
    moment: datetime | None = None
    try:
        if isinstance(value, bool):
            raise MalformedEventError(f"invalid timestamp {value!r}")
        if isinstance(value, int | float):
            if time_format not in ("auto", "epoch"):
                raise MalformedEventError(f"numeric timestamp with format {time_format}")
            moment = _from_epoch(float(value))
        elif isinstance(value, str):
            text = value.strip()
            if time_format == "auto" and _NUMERIC_RE.fullmatch(text):
                moment = _from_epoch(float(text))
            if moment is None and time_format in ("auto", "iso"):
                try:
                    moment = datetime.fromisoformat(text)
                except ValueError:
                    moment = None
            if moment is None and time_format in ("auto", "twitter"):
                try:
                    moment = datetime.strptime(text, TWITTER_CREATED_AT)
                except ValueError:
                    moment = None
            if moment is None and time_format in ("auto", "epoch"):
                moment = _from_epoch(float(text))
    except (ValueError, OverflowError, OSError) as e:
        raise MalformedEventError(f"invalid timestamp {value!r}") from e
    if moment is None:
        raise MalformedEventError(f"invalid timestamp {value!r}")
    moment = moment.replace(tzinfo=UTC) if moment.tzinfo is None else moment.astimezone(UTC)
    return moment.replace(second=0, microsecond=0)


def parse_event(raw: Mapping[str, Any], fmt: EventFormat) -> TextEvent:
    """Build a :class:`TextEvent` from a decoded JSON object."""
    stamp = next((raw[k] for k in fmt.time_keys if raw.get(k) is not None), None)
    if stamp is None:
        raise MalformedEventError("missing timestamp")
    text = raw.get(fmt.text_key)
    if text is not None and not isinstance(text, str):
        raise MalformedEventError("text is not a string")
    lang = raw.get(fmt.lang_key)
    return TextEvent(
        event_time=parse_time(stamp, fmt.time_format),
        text=text,
        language=str(lang) if lang is not None else None,
    )


class LanguageFilter(Protocol):
    """Predicate deciding whether an event is searched for terms."""

    def __call__(self, event: TextEvent) -> bool:
        """True if the event is kept."""
        ...


@dataclass(frozen=True, slots=True)
class KeepLanguage:
    """Keep events tagged with ``code``; untagged events are dropped."""

    code: str = "en"

    def __call__(self, event: TextEvent) -> bool:
        """Keep events in language ``code``."""
        return event.language == self.code


@dataclass(frozen=True, slots=True)
class KeepAll:
    """Keep every event regardless of language."""

    def __call__(self, event: TextEvent) -> bool:
        """Keep every event."""
        return True


# -----------------------------------------------------------------------------
# Aggregates
# -----------------------------------------------------------------------------


class CoverageLike(Protocol):
    """Read-only view of per-month minute coverage."""

    def months(self) -> list[str]:
        """Covered months in order."""
        ...

    def observed(self, month: str) -> int:
        """Observed minutes in ``month``."""
        ...

    def expected(self, month: str) -> int:
        """Minutes in ``month``."""
        ...

    def missing_days(self, month: str) -> int:
        """Days of ``month`` without any observed minute."""
        ...


class MinuteCoverage:
    """Per-month bitmaps of observed minutes over an analysis window."""

    def __init__(self, window: MonthRange) -> None:
        """Create empty coverage for every month of ``window``."""
        self.window = window
        self._masks: dict[str, np.ndarray] = {
            m: np.zeros(expected_minutes(m), dtype=bool) for m in window.months()
        }

    def mark(self, moment: datetime) -> bool:
        """Mark the minute of ``moment`` observed; False if outside the window."""
        mask = self._masks.get(month_of(moment))
        if mask is None:
            return False
        mask[(moment.day - 1) * MINUTES_PER_DAY + moment.hour * 60 + moment.minute] = True
        return True

    def mark_mask(self, month: str, mask: np.ndarray) -> None:
        """OR a full minute mask into ``month`` (used by generators and tests)."""
        self._masks[month] |= mask

    def mask(self, month: str) -> np.ndarray:
        """Copy of the minute bitmap of ``month``."""
        return self._masks[month].copy()

    def months(self) -> list[str]:
        """Months covered by the window."""
        return list(self._masks)

    def observed(self, month: str) -> int:
        """O_m(M): distinct observed minutes in ``month``."""
        return int(np.count_nonzero(self._masks[month]))

    def expected(self, month: str) -> int:
        """E_m(M) = 60 * 24 * n_days."""
        return expected_minutes(month)

    def missing_days(self, month: str) -> int:
        """Days of ``month`` with all 1,440 minutes unobserved."""
        days = self._masks[month].reshape(days_in_month(month), MINUTES_PER_DAY)
        return int(np.count_nonzero(~days.any(axis=1)))

    def merge(self, other: MinuteCoverage) -> MinuteCoverage:
        """Union of two coverages over the same window."""
        if other.window != self.window:
            raise ValueError("cannot merge coverage over different windows")
        overlap = sum(
            int(np.count_nonzero(self._masks[m] & other._masks[m])) for m in self._masks
        )
        if overlap:
            logger.warning("merged shards overlap on %d observed minutes", overlap)
        merged = MinuteCoverage.__new__(MinuteCoverage)
        merged.window = self.window
        merged._masks = {m: self._masks[m] | other._masks[m] for m in self._masks}
        return merged

    def table(self) -> CoverageTable:
        """Freeze into a :class:`CoverageTable`."""
        return CoverageTable(
            observed_minutes={m: self.observed(m) for m in self._masks},
            missing_day_counts={m: self.missing_days(m) for m in self._masks},
        )

    def __eq__(self, other: object) -> bool:
        """Equal when every month bitmap is equal."""
        if not isinstance(other, MinuteCoverage):
            return NotImplemented
        return self.window == other.window and all(
            np.array_equal(self._masks[m], other._masks[m]) for m in self._masks
        )

    __hash__ = None  # type: ignore[assignment]


@dataclass(frozen=True)
class CoverageTable:
    """Per-month coverage counts as written to ``coverage.csv``."""

    observed_minutes: dict[str, int]
    missing_day_counts: dict[str, int]

    def months(self) -> list[str]:
        """Months present in the table, in order."""
        return sorted(self.observed_minutes)

    def observed(self, month: str) -> int:
        """O_m(M)."""
        return self.observed_minutes[month]

    def expected(self, month: str) -> int:
        """E_m(M)."""
        return expected_minutes(month)

    def missing_days(self, month: str) -> int:
        """Days without any observed minute."""
        return self.missing_day_counts[month]

    def to_rows(self) -> list[tuple[str, int, int, int]]:
        """``(month, observed, expected, missing_days)`` rows in month order."""
        return [
            (m, self.observed(m), self.expected(m), self.missing_days(m)) for m in self.months()
        ]

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[str]]) -> CoverageTable:
        """Rebuild from CSV rows (header already consumed)."""
        observed: dict[str, int] = {}
        missing: dict[str, int] = {}
        for month, obs, _expected, miss, *_ in rows:
            observed[month] = int(obs)
            missing[month] = int(miss)
        return cls(observed_minutes=observed, missing_day_counts=missing)


def require_observed(coverage: CoverageLike, month: str) -> int:
    """Return O_m(M), raising :class:`MissingMonthError` when it is zero."""
    observed = coverage.observed(month)
    if observed == 0:
        raise MissingMonthError(f"no observed minutes in {month}", reason="fully_missing")
    return observed


class DailyCounts:
    """Per-term, per-UTC-day match counts."""

    def __init__(self, counts: Mapping[tuple[str, str], int] | None = None) -> None:
        """Create from an optional ``{(term_id, day): count}`` mapping."""
        self.counts: Counter[tuple[str, str]] = Counter(counts or {})

    def add(self, term_id: str, day: str, n: int = 1) -> None:
        """Add ``n`` occurrences of ``term_id`` on ``day`` (``YYYY-MM-DD``)."""
        self.counts[(term_id, day)] += n

    def merge(self, other: DailyCounts) -> DailyCounts:
        """Pointwise sum."""
        merged = DailyCounts(self.counts)
        merged.counts.update(other.counts)
        return merged

    def terms(self) -> set[str]:
        """Terms with at least one count."""
        return {term for term, _ in self.counts}

    def totals(self) -> dict[str, int]:
        """Total count per term."""
        totals: Counter[str] = Counter()
        for (term, _day), n in self.counts.items():
            totals[term] += n
        return dict(totals)

    def by_term(self) -> dict[str, dict[str, int]]:
        """``{term: {day: count}}``."""
        index: dict[str, dict[str, int]] = {}
        for (term, day), n in self.counts.items():
            index.setdefault(term, {})[day] = n
        return index

    def to_rows(self) -> list[tuple[str, str, int]]:
        """Sorted ``(term_id, day, count)`` rows, zero counts dropped."""
        return sorted((t, d, n) for (t, d), n in self.counts.items() if n)

    @classmethod
    def from_rows(cls, rows: Iterable[Sequence[str]]) -> DailyCounts:
        """Rebuild from CSV rows (header already consumed)."""
        return cls({(term, day): int(n) for term, day, n, *_ in rows})

    def __eq__(self, other: object) -> bool:
        """Equal when the non-zero counts agree."""
        if not isinstance(other, DailyCounts):
            return NotImplemented
        return +self.counts == +other.counts

    __hash__ = None  # type: ignore[assignment]


@dataclass
class ShardStats:
    """Line accounting for one or more shards."""

    events: int = 0
    heartbeats: int = 0
    matched_events: int = 0
    matches: int = 0
    malformed_lines: int = 0
    invalid_documents: int = 0
    out_of_window: int = 0
    filtered_language: int = 0

    def __add__(self, other: ShardStats) -> ShardStats:
        """Field-wise sum."""
        return ShardStats(
            **{f.name: getattr(self, f.name) + getattr(other, f.name) for f in fields(self)}
        )

    def as_dict(self) -> dict[str, int]:
        """Plain dict for manifests."""
        return {f.name: getattr(self, f.name) for f in fields(self)}


@dataclass
class ShardResult:
    """Everything one shard contributes."""

    daily: DailyCounts
    coverage: MinuteCoverage
    stats: ShardStats = field(default_factory=ShardStats)


def merge_aggregates(
    parts: Iterable[tuple[DailyCounts, MinuteCoverage]],
) -> tuple[DailyCounts, MinuteCoverage]:
    """Sum daily counts and union minute coverage; associative and commutative."""
    items = list(parts)
    if not items:
        raise ValueError("merge_aggregates needs at least one part")
    return reduce(
        lambda a, b: (a[0].merge(b[0]), a[1].merge(b[1])),
        items[1:],
        items[0],
    )


def merge_results(parts: Sequence[ShardResult]) -> ShardResult:
    """Merge shard results, statistics included."""
    daily, coverage = merge_aggregates((p.daily, p.coverage) for p in parts)
    stats = reduce(lambda a, b: a + b, (p.stats for p in parts), ShardStats())
    return ShardResult(daily=daily, coverage=coverage, stats=stats)


# -----------------------------------------------------------------------------
# Ingestion
# -----------------------------------------------------------------------------


def _open_binary(path: Path) -> IO[bytes]:
    if path.suffix == ".gz":
        return gzip.open(path, "rb")
    return path.open("rb")


def _event_time_of_undecodable(line: bytes, fmt: EventFormat) -> datetime | None:
    """Timestamp of a line whose text is not UTF-8, when the rest of it still parses."""
    try:
        raw = json.loads(line.decode("utf-8", errors="replace"))
        if not isinstance(raw, dict):
            return None
        return parse_event(raw, fmt).event_time
    except ValueError:
        return None


def ingest_lines(
    lines: Iterable[bytes | str],
    matcher: Matcher,
    language_filter: LanguageFilter,
    window: MonthRange,
    *,
    fmt: EventFormat | None = None,
    count_per_doc: bool = False,
) -> ShardResult:
    """Reduce event lines to daily counts and minute coverage."""
    fmt = fmt or EventFormat()
    result = ShardResult(daily=DailyCounts(), coverage=MinuteCoverage(window))
    stats, daily, coverage = result.stats, result.daily, result.coverage

    for line in lines:
        if isinstance(line, bytes):
            try:
                line = line.decode("utf-8")
            except UnicodeDecodeError:
                # the minute was still collected; only the text is unusable
                stats.invalid_documents += 1
                event_time = _event_time_of_undecodable(line, fmt)
                if event_time is not None:
                    coverage.mark(event_time)
                continue
        if not line.strip():
            continue
        try:
            raw = json.loads(line)
            if not isinstance(raw, dict):
                raise MalformedEventError("event is not a JSON object")
            event = parse_event(raw, fmt)
        except ValueError:
            stats.malformed_lines += 1
            continue

        if not coverage.mark(event.event_time):
            stats.out_of_window += 1
            continue
        if event.text is None:
            stats.heartbeats += 1
            continue
        stats.events += 1
        if not language_filter(event):
            stats.filtered_language += 1
            continue

        found = scan_text(matcher, event.text, event.event_time)
        if not found:
            continue
        stats.matched_events += 1
        day = event.event_time.date().isoformat()
        terms: Iterable[str] = (m.term_id for m in found)
        if count_per_doc:
            terms = sorted({m.term_id for m in found})
        for term_id in terms:
            daily.add(term_id, day)
            stats.matches += 1
    return result


def ingest_file(
    path: Path,
    matcher: Matcher,
    language_filter: LanguageFilter,
    window: MonthRange,
    *,
    fmt: EventFormat | None = None,
    count_per_doc: bool = False,
) -> ShardResult:
    """Ingest one event file (plain or ``.gz``).

    Raises:
        ShardError: If the file cannot be opened or decompressed.

    """
    try:
        with _open_binary(path) as fh:
            result = ingest_lines(
                fh, matcher, language_filter, window, fmt=fmt, count_per_doc=count_per_doc
            )
    except (OSError, EOFError) as e:
        raise ShardError(str(path), str(e)) from e
    if result.stats.malformed_lines or result.stats.invalid_documents:
        logger.warning(
            "%s: skipped %d malformed lines, %d invalid documents",
            path,
            result.stats.malformed_lines,
            result.stats.invalid_documents,
        )
    return result


# Worker-process state, installed once per worker by _init_worker.
_WORKER: dict[str, Any] = {}


def _init_worker(
    matcher: Matcher,
    language_filter: LanguageFilter,
    window: MonthRange,
    fmt: EventFormat,
    count_per_doc: bool,
) -> None:
    _WORKER.update(
        matcher=matcher,
        language_filter=language_filter,
        window=window,
        fmt=fmt,
        count_per_doc=count_per_doc,
    )


def _ingest_in_worker(path: Path) -> ShardResult:
    return ingest_file(
        path,
        _WORKER["matcher"],
        _WORKER["language_filter"],
        _WORKER["window"],
        fmt=_WORKER["fmt"],
        count_per_doc=_WORKER["count_per_doc"],
    )


def _map_shards(
    files: Sequence[Path],
    matcher: Matcher,
    language_filter: LanguageFilter,
    window: MonthRange,
    fmt: EventFormat,
    count_per_doc: bool,
    workers: int,
) -> Iterator[ShardResult]:
    if workers <= 1 or len(files) <= 1:
        for path in files:
            yield ingest_file(
                path, matcher, language_filter, window, fmt=fmt, count_per_doc=count_per_doc
            )
        return
    with ProcessPoolExecutor(
        max_workers=min(workers, len(files)),
        initializer=_init_worker,
        initargs=(matcher, language_filter, window, fmt, count_per_doc),
    ) as pool:
        yield from pool.map(_ingest_in_worker, files)


def ingest_stream(
    files: Sequence[Path],
    matcher: Matcher,
    language_filter: LanguageFilter,
    window: MonthRange,
    *,
    fmt: EventFormat | None = None,
    count_per_doc: bool = False,
    workers: int = 1,
) -> ShardResult:
    """Ingest all shards and merge them in input order.

    Either every shard succeeds or a :class:`ShardError` naming the failing
    file propagates; no partial aggregate is returned.
    """
    if not files:
        raise ValueError("no input files")
    fmt = fmt or EventFormat()
    parts = list(
        _map_shards(files, matcher, language_filter, window, fmt, count_per_doc, workers)
    )
    merged = merge_results(parts)
    logger.info(
        "ingested %d shards: %d events, %d matches",
        len(files),
        merged.stats.events,
        merged.stats.matches,
    )
    return merged
