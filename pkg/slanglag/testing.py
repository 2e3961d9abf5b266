"""Reference oracles and fixture builders for slanglag.

SPDX-License-Identifier: MIT

The oracles are naive re-implementations that import nothing from the code
they check. They are used by both the test suite and
``slanglag selftest``.
"""

from __future__ import annotations

import itertools
import json
import math
import re
import time
from collections.abc import Callable, Iterable, Mapping, Sequence
from dataclasses import dataclass
from pathlib import Path
from typing import Any

import numpy as np

from slanglag.correlation import benjamini_hochberg, best_lag, cross_correlation
from slanglag.matcher import PatternSet, build_automaton, scan_text
from slanglag.months import MonthRange, shift_month
from slanglag.series import MonthlySeries
from slanglag.synth import MAX_LAG, lagged_pair
from slanglag.trends import CostModel, pelt_changepoints, segmentation_cost

# -----------------------------------------------------------------------------
# Oracles
# -----------------------------------------------------------------------------


# ``\w`` is ``str.isalnum()`` plus ``_``; ``[^\W_]`` is ``str.isalnum()`` alone.
_ALNUM = re.compile(r"[^\W_]")
_HANDLE_TAIL = re.compile(r"@\w*\Z")
_SPACES = re.compile(r"\s+")


def _naive_normalize(text: str | bytes) -> str:
    if isinstance(text, bytes):
        text = text.decode("utf-8")
    return _SPACES.sub(" ", text).strip().lower()


def naive_scan(patterns: Iterable[str], text: str | bytes) -> list[tuple[int, int, str]]:
    """Boundary-aware substring search, one pattern at a time.

    Normalization, the word-boundary test and the ``@``-handle test are
    written here with regular expressions, apart from the matcher's own.
    Returns ``(start, end, term_id)`` hits ordered like :meth:`Matcher.raw_hits`.
    """
    doc = _naive_normalize(text)
    hits = []
    for pattern in {_naive_normalize(p) for p in patterns} - {""}:
        start = doc.find(pattern)
        while start != -1:
            end = start + len(pattern)
            before = doc[start - 1] if start else ""
            after = doc[end] if end < len(doc) else ""
            if (
                not _ALNUM.fullmatch(before)
                and not _ALNUM.fullmatch(after)
                and not _HANDLE_TAIL.search(doc, 0, start)
            ):
                hits.append((start, end, pattern))
            start = doc.find(pattern, start + 1)
    return sorted(hits)


def brute_pearson(x: Sequence[float], y: Sequence[float]) -> float | None:
    """Pearson r with plain Python loops; ``None`` when a side has no spread."""
    n = len(x)
    if n < 2:
        return None
    mx = sum(x) / n
    my = sum(y) / n
    sxy = sum((a - mx) * (b - my) for a, b in zip(x, y, strict=True))
    sxx = sum((a - mx) ** 2 for a in x)
    syy = sum((b - my) ** 2 for b in y)
    if sxx == 0 or syy == 0:
        return None
    return sxy / math.sqrt(sxx * syy)


def brute_ccf(
    ud: Mapping[str, float],
    tw: Mapping[str, float],
    k_min: int = -MAX_LAG,
    k_max: int = MAX_LAG,
    min_overlap: int = 2,
) -> dict[int, float]:
    """Per-lag Pearson r pairing ``ud[M + k]`` with ``tw[M]``."""
    out: dict[int, float] = {}
    for k in range(k_min, k_max + 1):
        x, y = [], []
        for month in sorted(tw):
            shifted = shift_month(month, k)
            if shifted in ud:
                x.append(ud[shifted])
                y.append(tw[month])
        if len(x) < min_overlap:
            continue
        r = brute_pearson(x, y)
        if r is not None:
            out[k] = r
    return out


def bh_step_up(p_values: Sequence[float], alpha: float) -> list[bool]:
    """Direct Benjamini-Hochberg step-up: reject every p at or below the largest passing rank."""
    m = len(p_values)
    if m == 0 or alpha <= 0:
        return [False] * m
    order = sorted(range(m), key=lambda i: p_values[i])
    cutoff = -1
    for rank, i in enumerate(order, start=1):
        if p_values[i] <= (rank / m) * alpha:
            cutoff = rank
    rejected = set(order[:cutoff]) if cutoff > 0 else set()
    return [i in rejected for i in range(m)]


def exhaustive_segmentation(
    values: Sequence[float],
    penalty: float,
    min_size: int = 2,
    cost: CostModel | str = CostModel.L2,
) -> tuple[tuple[int, ...], float]:
    """Cheapest segmentation by trying every admissible set of change points."""
    n = len(values)
    best: tuple[tuple[int, ...], float] = ((), segmentation_cost(values, (), penalty, cost))
    inner = range(min_size, n - min_size + 1)
    for r in range(1, n // min_size):
        for cut in itertools.combinations(inner, r):
            bounds = (0, *cut, n)
            if any(b - a < min_size for a, b in itertools.pairwise(bounds)):
                continue
            total = segmentation_cost(values, cut, penalty, cost)
            if total < best[1]:
                best = (cut, total)
    return best


# -----------------------------------------------------------------------------
# Fixture builders
# -----------------------------------------------------------------------------


def make_series(
    values: Sequence[float], start: str = "2000-01", term_id: str = "t"
) -> MonthlySeries:
    """Observed series of consecutive months beginning at ``start``."""
    months = MonthRange(start=start, end=shift_month(start, max(len(values) - 1, 1))).months()
    return MonthlySeries.from_mapping(term_id, dict(zip(months, values, strict=False)))


def write_events(path: Path, events: Iterable[Mapping[str, Any] | str]) -> Path:
    """Write events as JSON lines; strings are written verbatim."""
    path.parent.mkdir(parents=True, exist_ok=True)
    with path.open("w", encoding="utf-8") as fh:
        for event in events:
            line = event if isinstance(event, str) else json.dumps(event, ensure_ascii=False)
            fh.write(line + "\n")
    return path


def write_dictionary(path: Path, records: Iterable[Mapping[str, Any]]) -> Path:
    """Write dictionary records as JSON lines."""
    return write_events(path, records)


# -----------------------------------------------------------------------------
# Randomised cases
# -----------------------------------------------------------------------------

_TEXT_ALPHABET = "abcé ß@_.,!'-1"
_PATTERN_ALPHABET = "abcé'-"


def random_text(rng: np.random.Generator, max_len: int = 500) -> str:
    """Random text over a small alphabet with handles, punctuation and non-ASCII."""
    n = int(rng.integers(0, max_len + 1))
    return "".join(rng.choice(list(_TEXT_ALPHABET), size=n).tolist())


def random_patterns(rng: np.random.Generator, max_patterns: int = 20) -> list[str]:
    """Random non-empty patterns, some with inner spaces or punctuation."""
    out = []
    for _ in range(int(rng.integers(1, max_patterns + 1))):
        head = "".join(rng.choice(list(_PATTERN_ALPHABET), size=int(rng.integers(1, 4))).tolist())
        if rng.random() < 0.2:
            head += " " + "".join(rng.choice(list("abc"), size=2).tolist())
        out.append(head)
    return out


def _random_series(rng: np.random.Generator, n: int, start: str, term_id: str) -> MonthlySeries:
    return make_series(rng.normal(size=n).tolist(), start=start, term_id=term_id)


# -----------------------------------------------------------------------------
# Self-test suites
# -----------------------------------------------------------------------------


@dataclass(frozen=True)
class SelftestResult:
    """Outcome of one oracle suite."""

    name: str
    cases: int
    mismatches: int
    seconds: float

    @property
    def passed(self) -> bool:
        """True when no case disagreed with its oracle."""
        return self.mismatches == 0

    def as_dict(self) -> dict[str, Any]:
        """JSON-ready form."""
        return {
            "name": self.name,
            "cases": self.cases,
            "mismatches": self.mismatches,
            "seconds": round(self.seconds, 3),
            "passed": self.passed,
        }


def check_matcher(cases: int, rng: np.random.Generator) -> int:
    """Aho-Corasick hits against :func:`naive_scan`."""
    bad = 0
    for _ in range(cases):
        patterns = random_patterns(rng)
        text = random_text(rng)
        matcher = build_automaton(PatternSet.from_terms(patterns))
        fast = [(e.span[0], e.span[1], e.term_id) for e in scan_text(matcher, text)]
        bad += fast != naive_scan(patterns, text)
    return bad


def check_ccf(cases: int, rng: np.random.Generator) -> int:
    """Per-lag r against :func:`brute_ccf` within 1e-12."""
    bad = 0
    for _ in range(cases):
        n = int(rng.integers(12, 94))
        ud = _random_series(rng, n, shift_month("2005-01", int(rng.integers(-3, 4))), "c")
        tw = _random_series(rng, n, "2005-01", "c")
        fast = {k: v.r for k, v in cross_correlation(ud, tw, min_overlap=2).items()}
        slow = brute_ccf(ud.as_dict(), tw.as_dict())
        if fast.keys() != slow.keys() or any(abs(fast[k] - slow[k]) > 1e-12 for k in fast):
            bad += 1
    return bad


def check_bh(cases: int, rng: np.random.Generator) -> int:
    """BH reject sets against :func:`bh_step_up`."""
    bad = 0
    for _ in range(cases):
        m = int(rng.integers(1, 60))
        p = (rng.random(m) ** 3).tolist()
        alpha = float(rng.choice([0.001, 0.01, 0.05, 0.1]))
        bad += benjamini_hochberg(p, alpha).reject != bh_step_up(p, alpha)
    return bad


def check_pelt(cases: int, rng: np.random.Generator) -> int:
    """PELT optimum against :func:`exhaustive_segmentation`."""
    bad = 0
    for _ in range(cases):
        n = int(rng.integers(4, 13))
        values = rng.integers(0, 10, size=n).astype(float).tolist()
        penalty = float(rng.choice([0.5, 1.0, 5.0, 25.0]))
        fast = pelt_changepoints(values, penalty).cost
        _, slow = exhaustive_segmentation(values, penalty)
        bad += not math.isclose(fast, slow, rel_tol=1e-9, abs_tol=1e-9)
    return bad


def check_lag_recovery(cases: int, rng: np.random.Generator) -> int:
    """Noise-free lagged pairs must recover their planted lag exactly."""
    bad = 0
    for i in range(cases):
        lag = i % (2 * MAX_LAG + 1) - MAX_LAG
        ud, tw = lagged_pair(36, lag, 0.0, rng)
        by_lag = cross_correlation(ud, tw)
        k, _ = best_lag({k: v.r for k, v in by_lag.items()})
        bad += k != lag
    return bad


SUITES: dict[str, Callable[[int, np.random.Generator], int]] = {
    "matcher": check_matcher,
    "ccf": check_ccf,
    "bh": check_bh,
    "pelt": check_pelt,
    "lag": check_lag_recovery,
}


def run_selftest(
    cases: int = 1000, seed: int = 0, suites: Iterable[str] | None = None
) -> list[SelftestResult]:
    """Run the oracle suites with ``cases`` random cases each.

    Raises:
        ValueError: On an unknown suite name.

    """
    names = list(SUITES) if suites is None else list(suites)
    unknown = sorted(set(names) - set(SUITES))
    if unknown:
        raise ValueError(f"unknown selftest suite(s): {', '.join(unknown)}")
    results = []
    for offset, name in enumerate(names):
        rng = np.random.default_rng([seed, offset])
        started = time.perf_counter()
        mismatches = SUITES[name](cases, rng)
        results.append(SelftestResult(name, cases, mismatches, time.perf_counter() - started))
    return results
