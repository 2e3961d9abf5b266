# SPDX-License-Identifier: MIT
"""Lagged cross-correlation between dictionary-side and Twitter-side series.

SPDX-License-Identifier: MIT

Lag ``k`` pairs the dictionary value of month ``M + k`` with the Twitter value
of month ``M``: positive ``k`` means Twitter leads. Each lag's Pearson ``r`` is
computed over its exact overlap. The best lag is tested with the usual
t-statistic, and the p-values of all terms are adjusted together with
Benjamini-Hochberg.
"""

from __future__ import annotations

import logging
import math
from collections.abc import Mapping, Sequence
from dataclasses import dataclass, field, replace
from enum import StrEnum

import numpy as np
from scipy import stats
from statsmodels.stats.multitest import multipletests

from slanglag.errors import DegenerateSeriesError, UndefinedTestError
from slanglag.models import Category, Exclusion, ExclusionReason
from slanglag.months import shift_month
from slanglag.series import MonthlySeries, is_constant, normalize

logger = logging.getLogger(__name__)


class CcfMode(StrEnum):
    """How per-lag correlation values are computed."""

    PEARSON = "pearson"
    GLOBAL_MOMENTS = "global-moments"


@dataclass(frozen=True, slots=True)
class LagValue:
    """Correlation at one lag and the number of months it used."""

    r: float
    overlap_len: int


@dataclass(frozen=True)
class CorrelationResult:
    """Per-term outcome; ``q_value`` and ``category`` are set after BH."""

    term_id: str
    r_by_lag: dict[int, float]
    overlap_by_lag: dict[int, int]
    best_lag: int
    r_best: float
    p_value: float
    q_value: float | None = None
    category: Category = Category.NONE
    p_permutation: float | None = None

    @property
    def overlap_len(self) -> int:
        """Overlap length at the best lag."""
        return self.overlap_by_lag[self.best_lag]

    def row(self) -> tuple[str, int, float, float, float | None, str, int, float | None]:
        """``correlations.csv`` row; ``p_permutation`` is empty when no draws were made."""
        return (
            self.term_id,
            self.best_lag,
            self.r_best,
            self.p_value,
            self.q_value,
            str(self.category),
            self.overlap_len,
            self.p_permutation,
        )


@dataclass(frozen=True)
class BHResult:
    """Adjusted q-values and reject flags, in input order."""

    q_values: list[float]
    reject: list[bool]


@dataclass
class CorrelationRun:
    """Everything :func:`correlate_terms` produces."""

    results: list[CorrelationResult] = field(default_factory=list)
    exclusions: list[Exclusion] = field(default_factory=list)
    histogram: dict[tuple[int, Category], int] = field(default_factory=dict)

    def counts(self) -> dict[str, int]:
        """Number of terms per category."""
        out = dict.fromkeys((str(c) for c in Category), 0)
        for res in self.results:
            out[str(res.category)] += 1
        return out


def pearson(x: np.ndarray, y: np.ndarray) -> float | None:
    """Pearson correlation, or ``None`` when either side has zero variance."""
    if len(x) < 2 or is_constant(x) or is_constant(y):
        return None
    xc = x - x.mean()
    yc = y - y.mean()
    r = float(np.dot(xc, yc) / math.sqrt(float(np.dot(xc, xc)) * float(np.dot(yc, yc))))
    return min(1.0, max(-1.0, r))


def lagged_overlap(
    ud: Mapping[str, float], tw: Mapping[str, float], k: int
) -> tuple[np.ndarray, np.ndarray]:
    """Aligned ``(ud[M + k], tw[M])`` arrays over the months where both exist."""
    pairs = [
        (ud[shifted], value)
        for m, value in sorted(tw.items())
        if (shifted := shift_month(m, k)) in ud
    ]
    if not pairs:
        return np.empty(0), np.empty(0)
    arr = np.asarray(pairs, dtype=float)
    return arr[:, 0], arr[:, 1]


def cross_correlation(
    ud: MonthlySeries,
    tw: MonthlySeries,
    k_min: int = -3,
    k_max: int = 3,
    min_overlap: int = 12,
    mode: CcfMode | str = CcfMode.PEARSON,
) -> dict[int, LagValue]:
    """Correlation of the two series for every lag in ``[k_min, k_max]``.

    Lags whose overlap is shorter than ``min_overlap`` or has zero variance
    are left out of the result. In ``global-moments`` mode each series is
    normalized once over its whole span and the value is the plain sum of
    lagged products over the overlap; it grows with the overlap length.
    """
    if k_min > k_max:
        raise ValueError(f"k_min ({k_min}) > k_max ({k_max})")
    mode = CcfMode(mode)
    if mode is CcfMode.GLOBAL_MOMENTS:
        try:
            ud_map = normalize(ud).as_dict()
            tw_map = normalize(tw).as_dict()
        except DegenerateSeriesError:
            return {}
    else:
        ud_map, tw_map = ud.as_dict(), tw.as_dict()

    out: dict[int, LagValue] = {}
    for k in range(k_min, k_max + 1):
        x, y = lagged_overlap(ud_map, tw_map, k)
        if len(x) < min_overlap:
            continue
        if mode is CcfMode.GLOBAL_MOMENTS:
            out[k] = LagValue(float(np.dot(x, y)), len(x))
            continue
        r = pearson(x, y)
        if r is None:
            logger.debug("%s: lag %d omitted, zero variance in overlap", ud.term_id, k)
            continue
        out[k] = LagValue(r, len(x))
    return out


def best_lag(r_by_lag: Mapping[int, float]) -> tuple[int, float]:
    """Lag with the largest ``|r|``; ties go to the smallest ``|k|``, then negative ``k``."""
    if not r_by_lag:
        raise ValueError("no lags to choose from")
    k = min(r_by_lag, key=lambda lag: (-abs(r_by_lag[lag]), abs(lag), lag))
    return k, r_by_lag[k]


def significance(r_best: float, overlap_len: int) -> float:
    """Two-sided p-value of H0: rho = 0 from the t-test with ``n - 2`` degrees of freedom.

    Raises:
        UndefinedTestError: If ``overlap_len < 3``.

    """
    if overlap_len < 3:
        raise UndefinedTestError(
            f"t-test needs at least 3 months, got {overlap_len}",
            reason=ExclusionReason.UNDEFINED_TEST,
        )
    r = min(1.0, max(-1.0, r_best))
    if abs(r) >= 1.0:
        return 0.0
    df = overlap_len - 2
    t = r * math.sqrt(df / (1.0 - r * r))
    return min(1.0, float(2.0 * stats.t.sf(abs(t), df)))


def permutation_pvalue(
    x: np.ndarray, y: np.ndarray, n_perm: int, rng: np.random.Generator
) -> float:
    """Two-sided permutation p-value of Pearson ``r`` with the (count + 1)/(n + 1) estimator."""
    observed = pearson(x, y)
    if observed is None:
        return 1.0
    hits = 0
    for _ in range(n_perm):
        r = pearson(x, rng.permutation(y))
        if r is not None and abs(r) >= abs(observed) - 1e-12:
            hits += 1
    return (hits + 1) / (n_perm + 1)


def benjamini_hochberg(p_values: Sequence[float], alpha: float = 0.01) -> BHResult:
    """Benjamini-Hochberg step-up; rejection is inclusive and ``alpha <= 0`` rejects nothing."""
    if not p_values:
        return BHResult([], [])
    p = np.asarray(p_values, dtype=float)
    if np.any((p < 0) | (p > 1)):
        raise ValueError("p-values must lie in [0, 1]")
    reject, q, _, _ = multipletests(p, alpha=max(alpha, 0.0), method="fdr_bh")
    q = np.clip(q, 0.0, 1.0)
    if alpha <= 0:
        reject = np.zeros(len(p), dtype=bool)
    return BHResult(q_values=q.tolist(), reject=[bool(v) for v in reject])


def _category(result: CorrelationResult, alpha: float) -> Category:
    if alpha <= 0 or result.q_value is None or result.q_value > alpha:
        return Category.NONE
    if result.r_best > 0:
        return Category.POSITIVE
    if result.r_best < 0:
        return Category.NEGATIVE
    return Category.NONE


def lag_histogram(
    results: Sequence[CorrelationResult], k_min: int = -3, k_max: int = 3
) -> dict[tuple[int, Category], int]:
    """Count of terms per (best lag, category), zero cells included."""
    hist = {(k, c): 0 for k in range(k_min, k_max + 1) for c in Category}
    for res in results:
        hist[(res.best_lag, res.category)] = hist.get((res.best_lag, res.category), 0) + 1
    return hist


def categorize(
    results: Sequence[CorrelationResult],
    alpha: float = 0.01,
    *,
    k_min: int = -3,
    k_max: int = 3,
) -> tuple[list[CorrelationResult], dict[tuple[int, Category], int]]:
    """Assign positive/negative/none from the sign of ``r_best`` and ``q <= alpha``."""
    labelled = [replace(res, category=_category(res, alpha)) for res in results]
    return labelled, lag_histogram(labelled, k_min, k_max)


def correlate_term(
    ud: MonthlySeries,
    tw: MonthlySeries,
    *,
    k_min: int = -3,
    k_max: int = 3,
    min_overlap: int = 12,
    mode: CcfMode | str = CcfMode.PEARSON,
    permutations: int = 0,
    rng: np.random.Generator | None = None,
) -> CorrelationResult | ExclusionReason:
    """Correlate one pair and test its best lag; returns the exclusion reason on failure."""
    by_lag = cross_correlation(ud, tw, k_min, k_max, min_overlap, mode)
    if not by_lag:
        return ExclusionReason.ALL_LAGS_OMITTED
    k, r = best_lag({lag: v.r for lag, v in by_lag.items()})
    try:
        p = significance(r, by_lag[k].overlap_len)
    except UndefinedTestError:
        return ExclusionReason.UNDEFINED_TEST

    p_perm = None
    if permutations > 0:
        x, y = lagged_overlap(ud.as_dict(), tw.as_dict(), k)
        p_perm = permutation_pvalue(x, y, permutations, rng or np.random.default_rng(0))
    return CorrelationResult(
        term_id=tw.term_id,
        r_by_lag={lag: v.r for lag, v in by_lag.items()},
        overlap_by_lag={lag: v.overlap_len for lag, v in by_lag.items()},
        best_lag=k,
        r_best=r,
        p_value=p,
        p_permutation=p_perm,
    )


def correlate_terms(
    pairs: Mapping[str, tuple[MonthlySeries, MonthlySeries]],
    *,
    k_min: int = -3,
    k_max: int = 3,
    min_overlap: int = 12,
    alpha: float = 0.01,
    mode: CcfMode | str = CcfMode.PEARSON,
    permutations: int = 0,
    seed: int = 0,
) -> CorrelationRun:
    """Correlate every ``term -> (ud, twitter)`` pair, then run one BH pass over all of them.

    Terms are processed in sorted order so the permutation stream is reproducible.
    """
    rng = np.random.default_rng(seed)
    run = CorrelationRun()
    tested: list[CorrelationResult] = []
    for term in sorted(pairs):
        ud, tw = pairs[term]
        outcome = correlate_term(
            ud,
            tw,
            k_min=k_min,
            k_max=k_max,
            min_overlap=min_overlap,
            mode=mode,
            permutations=permutations,
            rng=rng,
        )
        if isinstance(outcome, ExclusionReason):
            run.exclusions.append(Exclusion(term, "correlation", outcome))
        else:
            tested.append(outcome)

    bh = benjamini_hochberg([res.p_value for res in tested], alpha)
    adjusted = [replace(res, q_value=q) for res, q in zip(tested, bh.q_values, strict=True)]
    run.results, run.histogram = categorize(adjusted, alpha, k_min=k_min, k_max=k_max)
    logger.info(
        "correlated %d terms (%d excluded): %s",
        len(run.results),
        len(run.exclusions),
        run.counts(),
    )
    return run
