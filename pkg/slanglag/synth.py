# SPDX-License-Identifier: MIT
"""Synthetic two-platform corpora with known ground truth.

SPDX-License-Identifier: MIT

A generated corpus has one NDJSON event file per month, a dictionary file
with activity logs and definition months, a lexicon, a stopword list and a
``manifest.json`` recording every planted truth: lag, sign, trending months,
definition months and the exact per-month Twitter totals.

Every minute of the window carries a heartbeat line unless it is dropped, so
minute coverage (and the correction factor) follows the planted dropout.
"""

from __future__ import annotations

import json
import logging
from collections.abc import Sequence
from datetime import UTC, datetime, timedelta
from pathlib import Path
from typing import IO

import numpy as np
from pydantic import BaseModel, ConfigDict, Field, model_validator

from slanglag.ingest import MinuteCoverage
from slanglag.months import (
    MINUTES_PER_DAY,
    Month,
    MonthRange,
    days_in_month,
    expected_minutes,
    shift_month,
)
from slanglag.series import MonthlySeries

logger = logging.getLogger(__name__)

MAX_LAG = 3
_CREATED_AT = "%a %b %d %H:%M:%S +0000 %Y"
_FILLER = (
    "just saw this",
    "honestly",
    "cannot believe it",
    "so tired today",
    "what a game",
    "see you later",
    "new post up",
    "weekend plans",
)
_TAG_POOL = ("internet", "music", "food", "sports", "gaming", "school")


def term_name(index: int) -> str:
    """Headword of the ``index``-th synthetic term."""
    return f"zorb{index:03d}"


class SynthSpec(BaseModel):
    """What to plant in a synthetic corpus."""

    model_config = ConfigDict(frozen=True, extra="forbid")

    n_terms: int = Field(default=4, ge=1)
    start: Month = "2014-01"
    months: int = Field(default=24, ge=4)
    lags: tuple[int, ...] | None = None
    signs: tuple[int, ...] | None = None
    noise: float = Field(default=0.0, ge=0.0)
    dropout: float = Field(default=0.0, ge=0.0, lt=1.0)
    # per term: (start offset, length) of each planted ramp
    trend_intervals: tuple[tuple[tuple[int, int], ...], ...] = ()
    coupling: float = Field(default=0.0, ge=0.0, le=1.0)
    baseline_definition_rate: float = Field(default=0.0, ge=0.0, le=1.0)
    base_level: int = Field(default=2, ge=0)
    peak_level: int = Field(default=12, ge=0)
    foreign_rate: float = Field(default=0.1, ge=0.0, le=1.0)
    heartbeats: bool = True
    seed: int = 0

    @model_validator(mode="after")
    def _feasible(self) -> SynthSpec:
        if self.lags is not None:
            if len(self.lags) != self.n_terms:
                raise ValueError("lags must give one value per term")
            if any(abs(k) > MAX_LAG for k in self.lags):
                raise ValueError(f"lags must lie in [-{MAX_LAG}, {MAX_LAG}]")
        if self.signs is not None:
            if len(self.signs) != self.n_terms:
                raise ValueError("signs must give one value per term")
            if any(s not in (-1, 1) for s in self.signs):
                raise ValueError("signs must be +1 or -1")
        if len(self.trend_intervals) > self.n_terms:
            raise ValueError("more trend interval lists than terms")
        for intervals in self.trend_intervals:
            for offset, length in intervals:
                if length < 1 or offset < 0 or offset + length > self.months:
                    raise ValueError(
                        f"trend interval ({offset}, {length}) lies outside the "
                        f"{self.months}-month window"
                    )
        if self.peak_level < self.base_level:
            raise ValueError("peak_level must be >= base_level")
        return self

    @property
    def window(self) -> MonthRange:
        """Months covered by the corpus."""
        return MonthRange(start=self.start, end=shift_month(self.start, self.months - 1))

    def lag_of(self, i: int) -> int:
        """Planted lag of term ``i`` (cycles -3..3 by default)."""
        return self.lags[i] if self.lags is not None else (i % (2 * MAX_LAG + 1)) - MAX_LAG

    def sign_of(self, i: int) -> int:
        """Planted correlation sign of term ``i``."""
        return self.signs[i] if self.signs is not None else 1

    def intervals_of(self, i: int) -> tuple[tuple[int, int], ...]:
        """Planted ramps of term ``i``."""
        return self.trend_intervals[i] if i < len(self.trend_intervals) else ()


class TermTruth(BaseModel):
    """Planted truth for one term."""

    term: str
    lag: int
    sign: int
    trending_months: list[str]
    definition_months: list[str]
    twitter_daily: dict[str, int]
    twitter_totals: dict[str, int]
    activity: dict[str, int]
    in_lexicon: bool


class GroundTruth(BaseModel):
    """Contents of ``manifest.json``."""

    spec: SynthSpec
    window: str
    terms: list[TermTruth]
    dropped_minutes: dict[str, int]
    stopwords: list[str]
    decoy_terms: list[str]

    def by_term(self) -> dict[str, TermTruth]:
        """Truths keyed by headword."""
        return {t.term: t for t in self.terms}


def ramp_values(
    months: int, intervals: Sequence[tuple[int, int]], base: int, peak: int
) -> np.ndarray:
    """Integer levels: ``base`` everywhere, rising linearly to ``peak`` inside each interval."""
    levels = np.full(months, base, dtype=int)
    for offset, length in intervals:
        for j in range(length):
            levels[offset + j] = base + round((peak - base) * (j + 1) / length)
    return levels


def _twitter_levels(spec: SynthSpec, i: int, rng: np.random.Generator) -> np.ndarray:
    # small iid jitter keeps every lag identifiable
    jitter = rng.integers(0, 3, size=spec.months)
    return ramp_values(spec.months, spec.intervals_of(i), spec.base_level, spec.peak_level) + jitter


def _activity(
    spec: SynthSpec, i: int, levels: np.ndarray, rng: np.random.Generator
) -> dict[str, int]:
    """Dictionary-side activity: ``ud[M + lag] = c + 10 * sign * tw[M]`` plus noise."""
    lag, sign = spec.lag_of(i), spec.sign_of(i)
    months = spec.window.months()
    centre = 10 * (int(levels.max()) + 1)
    activity: dict[str, int] = {}
    for m in range(spec.months):
        src = m - lag
        if not 0 <= src < spec.months:
            continue
        value = centre + 10 * sign * float(levels[src])
        if spec.noise:
            value += rng.normal(0.0, spec.noise * 10.0)
        activity[months[m]] = max(0, round(value))
    return activity


def _definitions(
    spec: SynthSpec, trending: set[str], rng: np.random.Generator
) -> list[str]:
    out = []
    for month in spec.window.months():
        rate = spec.coupling if month in trending else spec.baseline_definition_rate
        if rng.random() < rate:
            out.append(month)
    return out


def _event_minute(term: int, j: int) -> int:
    return (37 * term + 53 * j + 11) % MINUTES_PER_DAY


def generate(spec: SynthSpec, out_dir: Path) -> GroundTruth:
    """Write a corpus for ``spec`` into ``out_dir`` and return its ground truth.

    Identical specs produce byte-identical files.
    """
    rng = np.random.default_rng(spec.seed)
    months = spec.window.months()
    names = [term_name(i) for i in range(spec.n_terms)]

    truths: list[TermTruth] = []
    levels_by_term: list[np.ndarray] = []
    for i, name in enumerate(names):
        levels = _twitter_levels(spec, i, rng)
        levels_by_term.append(levels)
        trending = {months[o + j] for o, length in spec.intervals_of(i) for j in range(length)}
        truths.append(
            TermTruth(
                term=name,
                lag=spec.lag_of(i),
                sign=spec.sign_of(i),
                trending_months=sorted(trending),
                definition_months=_definitions(spec, trending, rng),
                twitter_daily={m: int(levels[k]) for k, m in enumerate(months)},
                twitter_totals={
                    m: int(levels[k]) * days_in_month(m) for k, m in enumerate(months)
                },
                activity=_activity(spec, i, levels, rng),
                in_lexicon=i % 2 == 0,
            )
        )

    events_dir = out_dir / "events"
    events_dir.mkdir(parents=True, exist_ok=True)
    dropped: dict[str, int] = {}
    for k, month in enumerate(months):
        keep = rng.random(expected_minutes(month)) >= spec.dropout
        dropped[month] = int(np.count_nonzero(~keep))
        daily = [int(levels[k]) for levels in levels_by_term]
        path = events_dir / f"events-{month}.jsonl"
        with path.open("w", encoding="utf-8", newline="\n") as fh:
            _write_month(fh, month, keep, names, daily, spec, rng)

    decoys = ["zorbnever", "unseen phrase"]
    stopwords = ["the", "lol"]
    _write_dictionary(out_dir / "dictionary.jsonl", truths, decoys, stopwords, rng)
    (out_dir / "lexicon.txt").write_text(
        "".join(f"{t.term}\n" for t in truths if t.in_lexicon) + "wordthatisnotused\n",
        encoding="utf-8",
    )
    (out_dir / "stopwords.txt").write_text("# synthetic stopwords\n" + "\n".join(stopwords) + "\n")

    truth = GroundTruth(
        spec=spec,
        window=str(spec.window),
        terms=truths,
        dropped_minutes=dropped,
        stopwords=stopwords,
        decoy_terms=decoys,
    )
    (out_dir / "manifest.json").write_text(truth.model_dump_json(indent=2) + "\n", encoding="utf-8")
    logger.info("wrote synthetic corpus: %d terms, %d months", spec.n_terms, spec.months)
    return truth


def _write_month(
    fh: IO[str],
    month: str,
    keep: np.ndarray,
    names: list[str],
    daily: list[int],
    spec: SynthSpec,
    rng: np.random.Generator,
) -> None:
    first = datetime.fromisoformat(f"{month}-01T00:00:00").replace(tzinfo=UTC)
    epoch = int(first.timestamp())
    for d in range(days_in_month(month)):
        scheduled: dict[int, list[tuple[str, str]]] = {}
        for i, name in enumerate(names):
            for j in range(daily[i]):
                filler = _FILLER[(i + j) % len(_FILLER)]
                scheduled.setdefault(_event_minute(i, j), []).append((f"{filler} {name}!", "en"))
            if rng.random() < spec.foreign_rate:
                scheduled.setdefault(_event_minute(i, 1000), []).append((f"mira {name}", "es"))
        for minute in range(MINUTES_PER_DAY):
            if not keep[d * MINUTES_PER_DAY + minute]:
                continue
            if spec.heartbeats:
                fh.write(f'{{"ts": {epoch + d * 86_400 + minute * 60}}}\n')
            if minute not in scheduled:
                continue
            stamp = (first + timedelta(days=d, minutes=minute)).strftime(_CREATED_AT)
            for text, lang in scheduled[minute]:
                record = {"created_at": stamp, "text": text, "lang": lang}
                fh.write(json.dumps(record, ensure_ascii=False) + "\n")


def _write_dictionary(
    path: Path,
    truths: Sequence[TermTruth],
    decoys: Sequence[str],
    stopwords: Sequence[str],
    rng: np.random.Generator,
) -> None:
    with path.open("w", encoding="utf-8", newline="\n") as fh:
        for t in truths:
            extra = _TAG_POOL[int(rng.integers(len(_TAG_POOL)))]
            record = {
                "term": t.term,
                "tags": sorted({extra, "hype" if t.sign > 0 else "faded"}),
                "definition_months": t.definition_months,
                "upvotes": int(rng.integers(0, 500)),
                "downvotes": int(rng.integers(0, 100)),
                "activity": t.activity,
            }
            fh.write(json.dumps(record, sort_keys=True) + "\n")
        for word in (*decoys, *stopwords):
            fh.write(json.dumps({"term": word, "tags": ["misc"]}, sort_keys=True) + "\n")


def load_truth(path: Path) -> GroundTruth:
    """Read a ``manifest.json`` written by :func:`generate`."""
    return GroundTruth.model_validate_json(path.read_text(encoding="utf-8"))


# -----------------------------------------------------------------------------
# In-memory helpers for calibration tests
# -----------------------------------------------------------------------------


def lagged_pair(
    n: int,
    lag: int,
    noise: float,
    rng: np.random.Generator,
    *,
    sign: int = 1,
    start: str = "2000-01",
) -> tuple[MonthlySeries, MonthlySeries]:
    """``(ud, twitter)`` series of length ``n`` with ``ud[M + lag] = sign * tw[M] + noise``."""
    base = rng.normal(size=n + 2 * MAX_LAG)
    tw = base[MAX_LAG : MAX_LAG + n]
    ud = sign * base[MAX_LAG - lag : MAX_LAG - lag + n] + rng.normal(0.0, noise, size=n)
    months = MonthRange(start=start, end=shift_month(start, n - 1)).months()
    return (
        MonthlySeries.from_mapping("pair", dict(zip(months, ud.tolist(), strict=True))),
        MonthlySeries.from_mapping("pair", dict(zip(months, tw.tolist(), strict=True))),
    )


def ramp_series(
    n: int,
    intervals: Sequence[tuple[int, int]],
    *,
    base: float = 1.0,
    peak: float = 20.0,
    noise: float = 0.0,
    rng: np.random.Generator | None = None,
    start: str = "2000-01",
    term_id: str = "ramp",
) -> tuple[MonthlySeries, set[str]]:
    """Series with planted ramps and the set of planted trending months."""
    rng = rng or np.random.default_rng(0)
    values = np.full(n, base, dtype=float)
    for offset, length in intervals:
        for j in range(length):
            values[offset + j] = base + (peak - base) * (j + 1) / length
    if noise:
        values += rng.normal(0.0, noise, size=n)
    months = MonthRange(start=start, end=shift_month(start, n - 1)).months()
    planted = {months[o + j] for o, length in intervals for j in range(length)}
    series = MonthlySeries.from_mapping(term_id, dict(zip(months, values.tolist(), strict=True)))
    return series, planted


def dropout_coverage(window: MonthRange, rate: float, rng: np.random.Generator) -> MinuteCoverage:
    """Coverage with every minute dropped independently with probability ``rate``."""
    coverage = MinuteCoverage(window)
    for month in window.months():
        coverage.mark_mask(month, rng.random(expected_minutes(month)) >= rate)
    return coverage
