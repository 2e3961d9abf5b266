# SPDX-License-Identifier: MIT
"""Monthly series: averaging, missing-minute correction, imputation, normalization.

SPDX-License-Identifier: MIT

Twitter-side series go through month totals -> correction (rounded to whole
counts) -> imputation of months missing too many days -> average daily count.
Dictionary-side series use the activity log as-is.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass

import numpy as np

from slanglag.errors import DegenerateSeriesError, ImputationError, MissingMonthError
from slanglag.ingest import CoverageLike, DailyCounts, require_observed
from slanglag.models import ExclusionReason, Provenance, TermRecord
from slanglag.months import MonthRange, days_in_month, month_index, month_span

logger = logging.getLogger(__name__)

DEFAULT_MAX_MISSING_DAYS = 14
_DEGENERATE_RTOL = 1e-12


@dataclass(frozen=True)
class MonthlySeries:
    """Month-indexed values of one term on one platform."""

    term_id: str
    months: tuple[str, ...]
    values: tuple[float, ...]
    provenance: tuple[Provenance, ...]

    def __post_init__(self) -> None:
        """Check aligned lengths and contiguous months."""
        if not len(self.months) == len(self.values) == len(self.provenance):
            raise ValueError("months, values and provenance must have equal length")
        idx = [month_index(m) for m in self.months]
        if any(b - a != 1 for a, b in zip(idx, idx[1:], strict=False)):
            raise ValueError(f"months of '{self.term_id}' are not contiguous")

    @classmethod
    def from_mapping(
        cls,
        term_id: str,
        values: Mapping[str, float],
        provenance: Provenance = Provenance.OBSERVED,
    ) -> MonthlySeries:
        """Build a series from ``{month: value}`` with a single provenance."""
        months = tuple(sorted(values))
        return cls(
            term_id=term_id,
            months=months,
            values=tuple(float(values[m]) for m in months),
            provenance=(provenance,) * len(months),
        )

    def __len__(self) -> int:
        """Number of months."""
        return len(self.months)

    def as_dict(self) -> dict[str, float]:
        """``{month: value}``."""
        return dict(zip(self.months, self.values, strict=True))

    def as_array(self) -> np.ndarray:
        """Values as a float array."""
        return np.asarray(self.values, dtype=float)

    def restrict(self, months: Iterable[str]) -> MonthlySeries:
        """Sub-series over a contiguous subset of months."""
        keep = set(months)
        picked = [i for i, m in enumerate(self.months) if m in keep]
        return MonthlySeries(
            term_id=self.term_id,
            months=tuple(self.months[i] for i in picked),
            values=tuple(self.values[i] for i in picked),
            provenance=tuple(self.provenance[i] for i in picked),
        )

    def rows(self) -> list[tuple[str, str, float, str]]:
        """``(term_id, month, value, provenance)`` rows for ``series_*.csv``."""
        return [
            (self.term_id, m, v, str(p))
            for m, v, p in zip(self.months, self.values, self.provenance, strict=True)
        ]


@dataclass(frozen=True)
class NormalizedSeries:
    """Z-scored series with the moments used."""

    term_id: str
    months: tuple[str, ...]
    values: tuple[float, ...]
    mean_used: float
    std_used: float

    def as_dict(self) -> dict[str, float]:
        """``{month: z}``."""
        return dict(zip(self.months, self.values, strict=True))

    def denormalize(self) -> dict[str, float]:
        """Invert the normalization: ``z * std + mean``."""
        return {m: z * self.std_used + self.mean_used for m, z in self.as_dict().items()}


def round_half_up(value: float) -> int:
    """Round to the nearest integer, halves away from zero for non-negatives."""
    return math.floor(value + 0.5)


def monthly_totals(day_counts: Mapping[str, int], window: MonthRange) -> dict[str, int]:
    """Sum ``{YYYY-MM-DD: count}`` into every month of ``window`` (0 when absent)."""
    totals = dict.fromkeys(window.months(), 0)
    for day, n in day_counts.items():
        month = day[:7]
        if month in totals:
            totals[month] += n
    return totals


def monthly_average(daily: DailyCounts, term_id: str, window: MonthRange) -> dict[str, float]:
    """Average daily count per month: month total divided by the days in the month."""
    day_counts = daily.by_term().get(term_id, {})
    return {m: t / days_in_month(m) for m, t in monthly_totals(day_counts, window).items()}


def correction_factor(coverage: CoverageLike, month: str) -> float:
    """C(M) = E_m(M) / O_m(M).

    Raises:
        MissingMonthError: When no minute of ``month`` was observed.

    """
    return coverage.expected(month) / require_observed(coverage, month)


def apply_correction(
    term_id: str,
    totals: Mapping[str, float],
    coverage: CoverageLike,
) -> MonthlySeries:
    """Scale month totals by C(M) and round to whole counts.

    Months without any observed minute are kept at 0 with provenance
    ``missing``; :func:`impute_missing` fills them.
    """
    months = tuple(sorted(totals))
    values: list[float] = []
    provenance: list[Provenance] = []
    for month in months:
        try:
            factor = correction_factor(coverage, month)
        except MissingMonthError:
            values.append(0.0)
            provenance.append(Provenance.MISSING)
            continue
        values.append(float(round_half_up(totals[month] * factor)))
        provenance.append(Provenance.OBSERVED if factor == 1.0 else Provenance.CORRECTED)
    return MonthlySeries(term_id, months, tuple(values), tuple(provenance))


def months_to_impute(
    series: MonthlySeries,
    coverage: CoverageLike,
    max_missing_days: int = DEFAULT_MAX_MISSING_DAYS,
) -> set[str]:
    """Months missing strictly more than ``max_missing_days`` days, or fully missing."""
    known = set(coverage.months())
    return {
        m
        for m, p in zip(series.months, series.provenance, strict=True)
        if p is Provenance.MISSING or (m in known and coverage.missing_days(m) > max_missing_days)
    }


def impute_missing(
    series: MonthlySeries,
    coverage: CoverageLike,
    max_missing_days: int = DEFAULT_MAX_MISSING_DAYS,
) -> MonthlySeries:
    """Replace badly covered months by the mean of their neighbours.

    The neighbours are the nearest months on each side that do not themselves
    need imputation; at the edges the single available neighbour is copied.

    Raises:
        ImputationError: When a month needs imputation and no neighbour exists.

    """
    flagged = months_to_impute(series, coverage, max_missing_days)
    if not flagged:
        return series
    good = [i for i, m in enumerate(series.months) if m not in flagged]
    if not good:
        raise ImputationError(
            f"'{series.term_id}' has no usable month to impute from",
            reason=ExclusionReason.IMPUTATION_IMPOSSIBLE,
        )

    values = list(series.values)
    provenance = list(series.provenance)
    for i, month in enumerate(series.months):
        if month not in flagged:
            continue
        before = [j for j in good if j < i]
        after = [j for j in good if j > i]
        neighbours = ([series.values[before[-1]]] if before else []) + (
            [series.values[after[0]]] if after else []
        )
        values[i] = sum(neighbours) / len(neighbours)
        provenance[i] = Provenance.IMPUTED
    logger.debug("%s: imputed %d months", series.term_id, len(flagged))
    return MonthlySeries(series.term_id, series.months, tuple(values), tuple(provenance))


def to_daily_average(series: MonthlySeries) -> MonthlySeries:
    """Divide month totals by the number of days in each month."""
    return MonthlySeries(
        series.term_id,
        series.months,
        tuple(v / days_in_month(m) for m, v in zip(series.months, series.values, strict=True)),
        series.provenance,
    )


def twitter_series(
    term_id: str,
    day_counts: Mapping[str, int],
    coverage: CoverageLike,
    window: MonthRange,
    max_missing_days: int = DEFAULT_MAX_MISSING_DAYS,
) -> MonthlySeries:
    """Corrected, imputed average-daily-count series over the whole window."""
    corrected = apply_correction(term_id, monthly_totals(day_counts, window), coverage)
    return to_daily_average(impute_missing(corrected, coverage, max_missing_days))


def activity_series(record: TermRecord, window: MonthRange) -> MonthlySeries | None:
    """Dictionary-side series from the activity log, clipped to ``window``.

    Spans the first to the last logged month inside the window; months missing
    from the log in between count as 0. Returns ``None`` without activity.
    """
    if not record.activity:
        return None
    inside = sorted(m for m in record.activity if m in window)
    if not inside:
        return None
    values = {m: float(record.activity.get(m, 0)) for m in month_span(inside[0], inside[-1])}
    return MonthlySeries.from_mapping(record.term, values)


def overlap(a: MonthlySeries, b: MonthlySeries) -> list[str]:
    """Months on which both series are defined."""
    other = set(b.months)
    return [m for m in a.months if m in other]


def is_constant(values: Sequence[float] | np.ndarray) -> bool:
    """True when the spread is negligible next to the largest magnitude.

    The tolerance is purely relative, so a series measured on a tiny scale
    still counts as varying.
    """
    x = np.asarray(values, dtype=float)
    scale = max(float(np.abs(x).max(initial=0.0)), float(np.finfo(float).tiny))
    return float(x.std()) <= _DEGENERATE_RTOL * scale


def normalize(
    series: MonthlySeries, span: Sequence[str] | MonthRange | None = None
) -> NormalizedSeries:
    """Z-score a series over ``span`` with population moments.

    Raises:
        DegenerateSeriesError: Fewer than two months, or zero variance.

    """
    if span is None:
        months = list(series.months)
    else:
        wanted = set(span.months() if isinstance(span, MonthRange) else span)
        months = [m for m in series.months if m in wanted]
    if len(months) < 2:
        raise DegenerateSeriesError(
            f"'{series.term_id}' needs at least 2 months to normalize",
            reason=ExclusionReason.TOO_SHORT,
        )
    lookup = series.as_dict()
    x = np.array([lookup[m] for m in months], dtype=float)
    mu = float(x.mean())
    sigma = float(x.std())
    if is_constant(x):
        raise DegenerateSeriesError(
            f"'{series.term_id}' is constant over the span",
            reason=ExclusionReason.DEGENERATE_SERIES,
        )
    return NormalizedSeries(
        term_id=series.term_id,
        months=tuple(months),
        values=tuple(((x - mu) / sigma).tolist()),
        mean_used=mu,
        std_used=sigma,
    )
