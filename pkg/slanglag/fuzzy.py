# SPDX-License-Identifier: MIT
"""Nearest-term lookup for misspelled headwords.

SPDX-License-Identifier: MIT
"""

from __future__ import annotations

from collections.abc import Callable, Iterable

from rapidfuzz import fuzz, process

SUGGESTION_CUTOFF = 60
SUGGESTION_LIMIT = 5


def score_terms(
    query: str,
    terms: Iterable[str],
    *,
    cutoff: float = SUGGESTION_CUTOFF,
    scorer: Callable[..., float] = fuzz.WRatio,
) -> list[tuple[str, float]]:
    """Score each distinct term against ``query``.

    Returns:
        ``(term, score)`` pairs with ``score >= cutoff``, best first and
        alphabetical among equal scores. Empty for an empty query.

    """
    if not query:
        return []
    candidates = sorted(set(terms))
    hits = process.extract(query, candidates, scorer=scorer, score_cutoff=cutoff, limit=None)
    return sorted(((term, score) for term, score, _ in hits), key=lambda hit: (-hit[1], hit[0]))


def suggest_terms(
    query: str,
    terms: Iterable[str],
    *,
    cutoff: float = SUGGESTION_CUTOFF,
    limit: int = SUGGESTION_LIMIT,
) -> list[str]:
    """Up to ``limit`` analysed terms closest to ``query``."""
    return [term for term, _ in score_terms(query, terms, cutoff=cutoff)[:limit]]
