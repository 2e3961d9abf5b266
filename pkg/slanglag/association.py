# SPDX-License-Identifier: MIT
"""Tag/group PMI and reference-lexicon coverage of the correlation groups.

SPDX-License-Identifier: MIT
"""

from __future__ import annotations

import math
from collections import Counter
from collections.abc import Iterable, Mapping
from dataclasses import dataclass
from enum import StrEnum

from slanglag.errors import ConfigError
from slanglag.models import Category, normalize_term

DEFAULT_MIN_SUPPORT = 5
REPORTED_GROUPS = (Category.POSITIVE, Category.NEGATIVE)
ALL = "all"


class LagBucket(StrEnum):
    """Sign of the best lag."""

    NEGATIVE = "t<0"
    ZERO = "t=0"
    POSITIVE = "t>0"
    ALL = "all"

    @classmethod
    def of(cls, lag: int) -> LagBucket:
        """Bucket of a lag value."""
        if lag < 0:
            return cls.NEGATIVE
        return cls.ZERO if lag == 0 else cls.POSITIVE


@dataclass(frozen=True, slots=True)
class TagAssociation:
    """PMI of one tag with one group, with the counts it came from."""

    tag: str
    group: Category
    pmi: float
    joint_count: int
    tag_count: int
    group_count: int
    total: int

    def row(self) -> tuple[str, str, float, int, int, int]:
        """``pmi.csv`` row."""
        return (
            self.tag,
            str(self.group),
            self.pmi,
            self.joint_count,
            self.tag_count,
            self.group_count,
        )


@dataclass(frozen=True, slots=True)
class LexiconCoverage:
    """Share of terms of one (group, lag bucket) cell found in the lexicon."""

    group: str
    lag_bucket: str
    n_terms: int
    n_defined: int

    @property
    def defined_fraction(self) -> float | None:
        """``n_defined / n_terms``; ``None`` for an empty cell."""
        return self.n_defined / self.n_terms if self.n_terms else None

    def row(self) -> tuple[str, str, float | None, int]:
        """``lexicon_coverage.csv`` row."""
        return (self.group, self.lag_bucket, self.defined_fraction, self.n_terms)


def _log(value: float, base: str | float) -> float:
    if base in ("e", "ln"):
        return math.log(value)
    if base in ("2", 2):
        return math.log2(value)
    if base in ("10", 10):
        return math.log10(value)
    return math.log(value, float(base))


def pmi(
    joint: int, tag_count: int, group_count: int, total: int, base: str | float = "e"
) -> float | None:
    """log p(x,y) / (p(x) p(y)) from counts; ``None`` when any count is zero."""
    if joint <= 0 or tag_count <= 0 or group_count <= 0 or total <= 0:
        return None
    return _log(joint * total / (tag_count * group_count), base)


def pmi_tags(
    tags: Mapping[str, Iterable[str]],
    categories: Mapping[str, Category],
    *,
    min_support: int = DEFAULT_MIN_SUPPORT,
    base: str | float = "e",
    groups: Iterable[Category] = REPORTED_GROUPS,
) -> list[TagAssociation]:
    """PMI of every (tag, group) pair over the analysed terms.

    The universe is every term in ``categories`` (the ``none`` group
    included); a tag counts once per term however many definitions carry it.
    Pairs with fewer than ``min_support`` joint terms are dropped. Output is
    grouped in ``groups`` order, highest PMI first.
    """
    universe = sorted(categories)
    total = len(universe)
    term_tags = {t: frozenset(tags.get(t, ())) for t in universe}
    tag_count: Counter[str] = Counter(tag for t in universe for tag in term_tags[t])
    group_count: Counter[Category] = Counter(categories[t] for t in universe)
    joint: Counter[tuple[str, Category]] = Counter(
        (tag, categories[t]) for t in universe for tag in term_tags[t]
    )

    out: list[TagAssociation] = []
    for group in groups:
        rows = []
        for tag in sorted(tag_count):
            n = joint[(tag, group)]
            if n < max(min_support, 1):
                continue
            value = pmi(n, tag_count[tag], group_count[group], total, base)
            if value is None:
                continue
            rows.append(
                TagAssociation(tag, group, value, n, tag_count[tag], group_count[group], total)
            )
        rows.sort(key=lambda a: (-a.pmi, a.tag))
        out.extend(rows)
    return out


def lexicon_coverage(
    categories: Mapping[str, Category],
    lags: Mapping[str, int],
    lexicon: Iterable[str],
) -> list[LexiconCoverage]:
    """Four-by-four table of lexicon coverage by group and lag bucket, ``all`` margins included.

    Raises:
        ConfigError: If the lexicon is empty.

    """
    reference = {normalize_term(w) for w in lexicon} - {""}
    if not reference:
        raise ConfigError("reference lexicon is empty")

    groups = [str(Category.POSITIVE), str(Category.NONE), str(Category.NEGATIVE), ALL]
    buckets = [str(b) for b in LagBucket]
    n_terms: Counter[tuple[str, str]] = Counter()
    n_defined: Counter[tuple[str, str]] = Counter()
    for term, category in categories.items():
        defined = normalize_term(term) in reference
        bucket = str(LagBucket.of(lags[term]))
        for cell in (
            (str(category), bucket),
            (str(category), ALL),
            (ALL, bucket),
            (ALL, ALL),
        ):
            n_terms[cell] += 1
            n_defined[cell] += int(defined)
    return [
        LexiconCoverage(g, b, n_terms[(g, b)], n_defined[(g, b)]) for g in groups for b in buckets
    ]
