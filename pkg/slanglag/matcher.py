# SPDX-License-Identifier: MIT
"""Aho-Corasick multi-pattern matching over raw event text.

SPDX-License-Identifier: MIT

The automaton is a trie with failure links: ``goto[state]`` maps a character to
the next state, ``fail[state]`` points at the longest proper suffix that is
also a trie path, and ``out[state]`` lists every pattern ending at that state
(its own plus those inherited along the failure chain). One pass over the text
reports all occurrences of all patterns, overlapping ones included.

No tokenization is applied: hits are filtered afterwards by the word-boundary
and @-handle rules in :func:`accept_hit`.
"""

from __future__ import annotations

from collections import deque
from collections.abc import Iterable
from dataclasses import dataclass, field
from datetime import datetime

from slanglag.errors import ConfigError, InvalidDocumentError
from slanglag.models import normalize_term

ROOT = 0


@dataclass(frozen=True, slots=True)
class PatternSet:
    """Unique normalized patterns and their stable term identifiers."""

    patterns: tuple[str, ...]
    id_map: dict[str, str] = field(default_factory=dict)

    def __post_init__(self) -> None:
        """Check uniqueness and default each identifier to its pattern."""
        if len(set(self.patterns)) != len(self.patterns):
            raise ConfigError("patterns must be unique")
        if any(not p for p in self.patterns):
            raise ConfigError("patterns must be non-empty")
        if not self.id_map:
            object.__setattr__(self, "id_map", {p: p for p in self.patterns})
        elif set(self.id_map) != set(self.patterns):
            raise ConfigError("id_map must cover exactly the pattern set")

    @classmethod
    def from_terms(cls, terms: Iterable[str]) -> PatternSet:
        """Normalize, deduplicate and sort ``terms``; each term is its own identifier."""
        patterns = tuple(sorted({normalize_term(t) for t in terms} - {""}))
        return cls(patterns=patterns)


@dataclass(frozen=True, slots=True)
class MatchEvent:
    """One accepted occurrence of a term.

    ``span`` is a ``(start, end)`` pair of code-point offsets into the
    normalized text.
    """

    term_id: str
    span: tuple[int, int]
    event_time: datetime | None = None


class Matcher:
    """Immutable Aho-Corasick automaton over a :class:`PatternSet`.

    Safe to share between threads; pickles cleanly for worker processes.
    """

    __slots__ = ("_fail", "_goto", "_lengths", "_out", "term_ids")

    def __init__(self, patterns: PatternSet) -> None:
        """Build the automaton in O(total pattern length).

        Raises:
            ConfigError: If the pattern set is empty.

        """
        if not patterns.patterns:
            raise ConfigError("cannot build a matcher from an empty pattern set")

        self.term_ids: tuple[str, ...] = tuple(patterns.id_map[p] for p in patterns.patterns)
        self._lengths: tuple[int, ...] = tuple(len(p) for p in patterns.patterns)
        goto: list[dict[str, int]] = [{}]
        out: list[list[int]] = [[]]

        for idx, pattern in enumerate(patterns.patterns):
            state = ROOT
            for char in pattern:
                nxt = goto[state].get(char)
                if nxt is None:
                    nxt = len(goto)
                    goto[state][char] = nxt
                    goto.append({})
                    out.append([])
                state = nxt
            out[state].append(idx)

        fail = [ROOT] * len(goto)
        queue: deque[int] = deque(goto[ROOT].values())
        while queue:
            state = queue.popleft()
            for char, child in goto[state].items():
                queue.append(child)
                fallback = fail[state]
                while fallback != ROOT and char not in goto[fallback]:
                    fallback = fail[fallback]
                target = goto[fallback].get(char, ROOT)
                fail[child] = target if target != child else ROOT
                out[child].extend(out[fail[child]])

        self._goto = tuple(goto)
        self._fail = tuple(fail)
        self._out = tuple(tuple(o) for o in out)

    @property
    def state_count(self) -> int:
        """Number of automaton states, root included."""
        return len(self._goto)

    @property
    def pattern_count(self) -> int:
        """Number of patterns recognised."""
        return len(self.term_ids)

    def raw_hits(self, text: str) -> list[tuple[int, int, str]]:
        """All substring hits ``(start, end, term_id)`` before boundary filtering.

        ``text`` must already be normalized.
        """
        goto, fail, out = self._goto, self._fail, self._out
        lengths, term_ids = self._lengths, self.term_ids
        hits: list[tuple[int, int, str]] = []
        state = ROOT
        for pos, char in enumerate(text):
            while state != ROOT and char not in goto[state]:
                state = fail[state]
            state = goto[state].get(char, ROOT)
            for idx in out[state]:
                end = pos + 1
                hits.append((end - lengths[idx], end, term_ids[idx]))
        hits.sort()
        return hits


def build_automaton(patterns: PatternSet) -> Matcher:
    """Build the matcher handle for ``patterns``."""
    return Matcher(patterns)


def _is_word_char(char: str) -> bool:
    return char.isalnum()


def _in_handle(text: str, start: int) -> bool:
    """True if ``start`` lies inside an ``@``-handle token.

    The containing token is the maximal run of letters, digits and ``_``
    ending just before ``start``.
    """
    i = start - 1
    while i >= 0 and (text[i].isalnum() or text[i] == "_"):
        i -= 1
    return i >= 0 and text[i] == "@"


def accept_hit(text: str, start: int, end: int) -> bool:
    """Apply the boundary and handle rules to a hit on normalized ``text``."""
    if start > 0 and _is_word_char(text[start - 1]):
        return False
    if end < len(text) and _is_word_char(text[end]):
        return False
    return not _in_handle(text, start)


def normalize_text(text: str | bytes) -> str:
    """Decode (strict UTF-8) and normalize document text like headwords.

    Raises:
        InvalidDocumentError: If ``text`` is bytes that are not valid UTF-8.

    """
    if isinstance(text, bytes):
        try:
            text = text.decode("utf-8")
        except UnicodeDecodeError as e:
            raise InvalidDocumentError(f"document is not valid UTF-8: {e}") from e
    return normalize_term(text)


def scan_text(
    matcher: Matcher,
    text: str | bytes,
    event_time: datetime | None = None,
) -> list[MatchEvent]:
    """Return accepted matches in ``text`` ordered by span start.

    Overlapping distinct terms each yield an event; a term occurring twice
    yields two.
    """
    normalized = normalize_text(text)
    return [
        MatchEvent(term_id=term_id, span=(start, end), event_time=event_time)
        for start, end, term_id in matcher.raw_hits(normalized)
        if accept_hit(normalized, start, end)
    ]
