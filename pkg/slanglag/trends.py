# SPDX-License-Identifier: MIT
"""Trending intervals and their relation to new definitions.

SPDX-License-Identifier: MIT

A series is segmented with PELT (penalised change points), a least-squares
line is fitted to every segment, and a segment is *trending* when its slope
strictly exceeds ``max(series) / 4``. Trending months are then cross-tabulated
against the months in which a term received new definitions.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Iterable, Mapping, Sequence
from dataclasses import dataclass
from enum import StrEnum

import numpy as np
from scipy import stats

from slanglag.models import ExclusionReason, Platform, Provenance
from slanglag.series import MonthlySeries, overlap

logger = logging.getLogger(__name__)

MIN_SERIES_LENGTH = 4
DEFAULT_MIN_SIZE = 2
DEFAULT_ALPHA_TREND = 0.001

ContingencyRow = tuple[str, str, float | int | None, float | None, bool | None]


class CostModel(StrEnum):
    """Per-segment cost used by PELT."""

    L2 = "l2"  # squared deviation from the segment mean
    LINEAR = "linear"  # residual sum of squares of the segment's own line


# -----------------------------------------------------------------------------
# Segmentation
# -----------------------------------------------------------------------------


class SegmentCost:
    """O(1) segment costs on ``values[s:t]`` from cumulative sums."""

    def __init__(
        self, values: Sequence[float] | np.ndarray, model: CostModel | str = CostModel.L2
    ) -> None:
        """Precompute the prefix sums the chosen cost needs."""
        y = np.asarray(values, dtype=float)
        x = np.arange(len(y), dtype=float)
        self.model = CostModel(model)
        zero = np.zeros(1)
        self._y = np.concatenate([zero, np.cumsum(y)])
        self._yy = np.concatenate([zero, np.cumsum(y * y)])
        self._x = np.concatenate([zero, np.cumsum(x)])
        self._xx = np.concatenate([zero, np.cumsum(x * x)])
        self._xy = np.concatenate([zero, np.cumsum(x * y)])

    def __call__(self, s: int, t: int) -> float:
        """Cost of the segment ``[s, t)``."""
        n = t - s
        sy = self._y[t] - self._y[s]
        syy = self._yy[t] - self._yy[s]
        sse = syy - sy * sy / n
        if self.model is CostModel.LINEAR and n > 1:
            sx = self._x[t] - self._x[s]
            sxx = self._xx[t] - self._xx[s] - sx * sx / n
            sxy = self._xy[t] - self._xy[s] - sx * sy / n
            sse -= sxy * sxy / sxx
        return max(0.0, float(sse))


@dataclass(frozen=True)
class Segmentation:
    """Change points as indexes where a new segment starts."""

    breakpoints: tuple[int, ...]
    cost: float
    reason: ExclusionReason | None = None


def default_penalty(values: Sequence[float] | np.ndarray) -> float:
    """2 * sigma^2 * log(n), sigma estimated from first differences.

    Falls back to the series variance when the differences are constant and
    to 1.0 for a constant series.
    """
    y = np.asarray(values, dtype=float)
    n = max(len(y), 2)
    sigma2 = float(np.diff(y).std() / math.sqrt(2)) ** 2 if len(y) > 2 else 0.0
    if sigma2 <= 1e-12:
        sigma2 = float(y.var()) if len(y) else 0.0
    if sigma2 <= 1e-12:
        sigma2 = 1.0
    return 2.0 * sigma2 * math.log(n)


def segmentation_cost(
    values: Sequence[float] | np.ndarray,
    breakpoints: Sequence[int],
    penalty: float,
    cost: CostModel | str = CostModel.L2,
) -> float:
    """Total cost of a given segmentation plus ``penalty`` per change point."""
    fn = SegmentCost(values, cost)
    bounds = [0, *breakpoints, len(values)]
    total = sum(fn(s, t) for s, t in zip(bounds, bounds[1:], strict=False))
    return total + penalty * len(breakpoints)


def pelt_changepoints(
    values: Sequence[float] | np.ndarray,
    penalty: float | None = None,
    *,
    min_size: int = DEFAULT_MIN_SIZE,
    cost: CostModel | str = CostModel.L2,
) -> Segmentation:
    """Optimal penalised segmentation with pruning.

    Minimises the sum of segment costs plus ``penalty`` per change point over
    all segmentations whose segments have at least ``min_size`` points. A
    candidate pruned at time ``t`` stays available until ``t + min_size``,
    the first time the pruning argument applies to it.
    """
    y = np.asarray(values, dtype=float)
    n = len(y)
    if min_size < 1:
        raise ValueError("min_size must be >= 1")
    if n < MIN_SERIES_LENGTH or n < 2 * min_size:
        fn_short = SegmentCost(y, cost)
        return Segmentation((), fn_short(0, n) if n else 0.0, ExclusionReason.TOO_SHORT)
    pen = default_penalty(y) if penalty is None else float(penalty)
    if pen <= 0:
        raise ValueError("penalty must be > 0")

    fn = SegmentCost(y, cost)
    if math.isinf(pen):
        return Segmentation((), fn(0, n))

    best = np.full(n + 1, np.inf)
    best[0] = -pen
    last = np.zeros(n + 1, dtype=int)
    # candidate start -> time from which it may be dropped
    candidates: dict[int, int | None] = {0: None}

    for t in range(min_size, n + 1):
        fresh = t - min_size
        if fresh >= min_size:
            candidates.setdefault(fresh, None)
        scored = [(best[s] + fn(s, t), s) for s in candidates]
        value, arg = min(scored, key=lambda pair: pair[0])
        best[t] = value + pen
        last[t] = arg
        for seg_cost, s in scored:
            if seg_cost > best[t] and candidates[s] is None:
                candidates[s] = t + min_size
        candidates = {s: exp for s, exp in candidates.items() if exp is None or exp > t + 1}

    breakpoints: list[int] = []
    t = n
    while t > 0:
        s = int(last[t])
        if s > 0:
            breakpoints.append(s)
        t = s
    return Segmentation(tuple(sorted(breakpoints)), float(best[n]))


# -----------------------------------------------------------------------------
# Segments and trend reports
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class Segment:
    """One fitted segment; months are inclusive."""

    start_month: str
    end_month: str
    slope: float
    intercept: float
    trending: bool
    single_point: bool = False
    imputed_only: bool = False


@dataclass(frozen=True)
class TrendReport:
    """Segmentation and trending months of one term on one platform."""

    term_id: str
    platform: Platform
    months: tuple[str, ...]
    change_points: tuple[str, ...]
    segments: tuple[Segment, ...]
    tau: float
    penalty: float | None = None
    reason: ExclusionReason | None = None
    trending_months: frozenset[str] = frozenset()

    def segment_rows(self) -> list[tuple[str, str, str, str, float, bool]]:
        """``segments.csv`` rows."""
        return [
            (self.term_id, str(self.platform), s.start_month, s.end_month, s.slope, s.trending)
            for s in self.segments
        ]


def trend_threshold(values: Sequence[float] | np.ndarray) -> float:
    """tau = max(values) / 4."""
    return float(np.max(np.asarray(values, dtype=float))) / 4.0


def fit_segments(
    series: MonthlySeries,
    change_points: Iterable[int],
    tau: float,
) -> list[Segment]:
    """Fit a least-squares line to every segment and flag ``slope > tau``.

    ``x`` is the month position within the series. A one-month segment gets
    slope 0 and is never trending.
    """
    y = series.as_array()
    bounds = [0, *sorted(change_points), len(y)]
    if any(b <= a for a, b in zip(bounds, bounds[1:], strict=False)):
        raise ValueError(f"invalid change points for a series of length {len(y)}")

    segments: list[Segment] = []
    for s, t in zip(bounds, bounds[1:], strict=False):
        imputed_only = all(p is Provenance.IMPUTED for p in series.provenance[s:t])
        if t - s == 1:
            segments.append(
                Segment(
                    start_month=series.months[s],
                    end_month=series.months[s],
                    slope=0.0,
                    intercept=float(y[s]),
                    trending=False,
                    single_point=True,
                    imputed_only=imputed_only,
                )
            )
            continue
        fit = stats.linregress(np.arange(s, t, dtype=float), y[s:t])
        slope = float(fit.slope)
        segments.append(
            Segment(
                start_month=series.months[s],
                end_month=series.months[t - 1],
                slope=slope,
                intercept=float(fit.intercept),
                trending=slope > tau,
                imputed_only=imputed_only,
            )
        )
    return segments


def _months_of(series: MonthlySeries, segment: Segment) -> list[str]:
    start = series.months.index(segment.start_month)
    end = series.months.index(segment.end_month)
    return list(series.months[start : end + 1])


def detect_trends(
    series: MonthlySeries,
    platform: Platform | str,
    *,
    penalty: float | None = None,
    cost: CostModel | str = CostModel.L2,
    min_size: int = DEFAULT_MIN_SIZE,
) -> TrendReport:
    """Segment ``series``, fit the segments and collect its trending months."""
    platform = Platform(platform)
    y = series.as_array()
    seg = pelt_changepoints(y, penalty, min_size=min_size, cost=cost)
    tau = trend_threshold(y) if len(y) else 0.0
    segments = fit_segments(series, seg.breakpoints, tau) if len(y) else []
    months = {m for s in segments if s.trending for m in _months_of(series, s)}
    if any(s.trending and s.imputed_only for s in segments):
        logger.info("%s/%s: trending segment of imputed months only", series.term_id, platform)
    return TrendReport(
        term_id=series.term_id,
        platform=platform,
        months=series.months,
        change_points=tuple(series.months[b] for b in seg.breakpoints),
        segments=tuple(segments),
        tau=tau,
        penalty=None if seg.reason else (default_penalty(y) if penalty is None else penalty),
        reason=seg.reason,
        trending_months=frozenset(months),
    )


def trending_months(report: TrendReport) -> set[str]:
    """Union of the months of all trending segments."""
    return set(report.trending_months)


def plot_rows(series: MonthlySeries, report: TrendReport) -> list[tuple[str, float, bool]]:
    """``(month, value, trending_flag)`` for shading plots."""
    return [
        (m, v, m in report.trending_months)
        for m, v in zip(series.months, series.values, strict=True)
    ]


# -----------------------------------------------------------------------------
# Contingency of definitions and trends
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class WelchTest:
    """Welch two-sample t-test result; ``None`` fields when undefined."""

    t_stat: float | None
    p_value: float | None

    def rejects(self, alpha: float) -> bool:
        """True when the test is defined and ``p < alpha``."""
        return self.p_value is not None and self.p_value < alpha

    def decision(self, alpha: float) -> bool | None:
        """:meth:`rejects`, or ``None`` when the test is undefined."""
        return None if self.p_value is None else self.rejects(alpha)


@dataclass(frozen=True)
class ContingencyStats:
    """Counts ``n[(d, u)]`` over a term-month grid and the derived probabilities."""

    platform: Platform
    counts: dict[tuple[int, int], int]
    d_test: WelchTest
    u_test: WelchTest

    @property
    def total(self) -> int:
        """Grid size."""
        return sum(self.counts.values())

    @staticmethod
    def _ratio(num: int, den: int) -> float | None:
        return num / den if den else None

    @property
    def p_d_given_u(self) -> float | None:
        """p(d=1 | u=1)."""
        c = self.counts
        return self._ratio(c[(1, 1)], c[(1, 1)] + c[(0, 1)])

    @property
    def p_d_given_not_u(self) -> float | None:
        """p(d=1 | u=0)."""
        c = self.counts
        return self._ratio(c[(1, 0)], c[(1, 0)] + c[(0, 0)])

    @property
    def p_u_given_d(self) -> float | None:
        """p(u=1 | d=1)."""
        c = self.counts
        return self._ratio(c[(1, 1)], c[(1, 1)] + c[(1, 0)])

    @property
    def p_u_given_not_d(self) -> float | None:
        """p(u=1 | d=0)."""
        c = self.counts
        return self._ratio(c[(0, 1)], c[(0, 1)] + c[(0, 0)])

    def rows(self, alpha: float = DEFAULT_ALPHA_TREND) -> list[ContingencyRow]:
        """``contingency.csv`` rows: ``platform, quantity, value, p_value, reject``.

        ``reject`` is the decision of the row's Welch test at ``alpha``; count
        rows and undefined tests leave it empty.
        """
        p = str(self.platform)
        d_reject = self.d_test.decision(alpha)
        u_reject = self.u_test.decision(alpha)
        return [
            (p, "p(d|u)", self.p_d_given_u, self.d_test.p_value, d_reject),
            (p, "p(d|~u)", self.p_d_given_not_u, self.d_test.p_value, d_reject),
            (p, "p(u|d)", self.p_u_given_d, self.u_test.p_value, u_reject),
            (p, "p(u|~d)", self.p_u_given_not_d, self.u_test.p_value, u_reject),
            *(
                (p, f"n(d={d},u={u})", self.counts[(d, u)], None, None)
                for d in (1, 0)
                for u in (1, 0)
            ),
        ]


def welch_test(a: np.ndarray, b: np.ndarray) -> WelchTest:
    """Welch's unequal-variance t-test; undefined with fewer than 2 samples or zero spread."""
    if len(a) < 2 or len(b) < 2:
        return WelchTest(None, None)
    with np.errstate(divide="ignore", invalid="ignore"):
        res = stats.ttest_ind(a, b, equal_var=False)
    t, p = float(res.statistic), float(res.pvalue)
    if not (math.isfinite(t) and math.isfinite(p)):
        return WelchTest(None, None)
    return WelchTest(t, p)


def overlap_grid(pairs: Mapping[str, tuple[MonthlySeries, MonthlySeries]]) -> dict[str, list[str]]:
    """Term-month grid: for each term, the months both of its series cover."""
    return {term: overlap(ud, tw) for term, (ud, tw) in sorted(pairs.items())}


def contingency_for(
    platform: Platform | str,
    definitions: Mapping[str, Iterable[str]],
    trending: Mapping[str, Iterable[str]],
    grid: Mapping[str, Sequence[str]],
) -> ContingencyStats:
    """Cross-tabulate new-definition months ``d`` against trending months ``u`` on one platform."""
    d_flags: list[int] = []
    u_flags: list[int] = []
    for term in sorted(grid):
        defined = set(definitions.get(term, ()))
        hot = set(trending.get(term, ()))
        for month in grid[term]:
            d_flags.append(int(month in defined))
            u_flags.append(int(month in hot))
    d = np.asarray(d_flags, dtype=float)
    u = np.asarray(u_flags, dtype=float)
    counts = {
        (dv, uv): int(np.sum((d == dv) & (u == uv))) for dv in (1, 0) for uv in (1, 0)
    }
    return ContingencyStats(
        platform=Platform(platform),
        counts=counts,
        d_test=welch_test(d[u == 1], d[u == 0]),
        u_test=welch_test(u[d == 1], u[d == 0]),
    )


def contingency(
    definitions: Mapping[str, Iterable[str]],
    trend_reports: Mapping[Platform, Mapping[str, Iterable[str]]],
    grid: Mapping[str, Sequence[str]],
) -> dict[Platform, ContingencyStats]:
    """:func:`contingency_for` on every platform present in ``trend_reports``."""
    return {
        platform: contingency_for(platform, definitions, trending, grid)
        for platform, trending in trend_reports.items()
    }
