"""Tests for the Aho-Corasick matcher."""

from __future__ import annotations

import numpy as np
import pytest

import slanglag.matcher as matcher_module
from slanglag.errors import ConfigError, InvalidDocumentError
from slanglag.matcher import PatternSet, accept_hit, build_automaton, normalize_text, scan_text
from slanglag.testing import check_matcher, naive_scan


def _scan(terms: list[str], text: str) -> list:
    return scan_text(build_automaton(PatternSet.from_terms(terms)), text)


def _spans(terms: list[str], text: str) -> list[tuple[str, tuple[int, int]]]:
    matcher = build_automaton(PatternSet.from_terms(terms))
    return [(e.term_id, e.span) for e in scan_text(matcher, text)]


class TestPatternSet:
    """Tests for PatternSet."""

    def test_from_terms_normalizes_and_dedups(self) -> None:
        pset = PatternSet.from_terms(["Stan", "stan ", "  in   love"])
        assert pset.patterns == ("in love", "stan")
        assert pset.id_map == {"in love": "in love", "stan": "stan"}

    def test_duplicates_rejected(self) -> None:
        with pytest.raises(ConfigError):
            PatternSet(patterns=("a", "a"))

    def test_empty_set_cannot_build(self) -> None:
        with pytest.raises(ConfigError):
            build_automaton(PatternSet.from_terms([]))


class TestAutomaton:
    """Tests for the automaton tables."""

    def test_classic_state_count(self) -> None:
        matcher = build_automaton(PatternSet.from_terms(["he", "she", "his", "hers"]))
        assert matcher.state_count == 10
        assert matcher.pattern_count == 4

    def test_ushers_raw_hits(self) -> None:
        matcher = build_automaton(PatternSet.from_terms(["he", "she", "his", "hers"]))
        assert matcher.raw_hits("ushers") == [(1, 4, "she"), (2, 4, "he"), (2, 6, "hers")]


class TestScanText:
    """Tests for scan_text()."""

    def test_single_word(self) -> None:
        assert _spans(["stan"], "i stan this") == [("stan", (2, 6))]

    def test_inside_word_rejected(self) -> None:
        assert _spans(["stan"], "standard issue") == []

    def test_handle_rejected(self) -> None:
        assert _spans(["stan"], "@stan_fan stan") == [("stan", (10, 14))]

    def test_handle_suffix_rejected(self) -> None:
        assert _spans(["stan"], "@big_stan") == []

    def test_overlapping_terms(self) -> None:
        assert _spans(["falling in love", "in love"], "falling in love") == [
            ("falling in love", (0, 15)),
            ("in love", (8, 15)),
        ]

    def test_repeated_term_counts_twice(self) -> None:
        assert len(_spans(["yeet"], "yeet yeet")) == 2

    def test_punctuation_pattern(self) -> None:
        assert _spans(["d'oh"], "d'oh!") == [("d'oh", (0, 4))]

    def test_case_and_whitespace_normalized(self) -> None:
        assert _spans(["stan"], "I   STAN") == [("stan", (2, 6))]

    def test_unicode(self) -> None:
        assert _spans(["café"], "un café.") == [("café", (3, 7))]

    def test_invalid_utf8(self) -> None:
        matcher = build_automaton(PatternSet.from_terms(["stan"]))
        with pytest.raises(InvalidDocumentError):
            scan_text(matcher, b"\xff\xfe stan")

    def test_bytes_accepted(self) -> None:
        matcher = build_automaton(PatternSet.from_terms(["stan"]))
        assert [e.span for e in scan_text(matcher, "i stan".encode())] == [(2, 6)]


class TestBoundaries:
    """Tests for accept_hit() and normalize_text()."""

    def test_accept_hit_edges(self) -> None:
        assert accept_hit("stan", 0, 4)
        assert not accept_hit("xstan", 1, 5)
        assert not accept_hit("stanx", 0, 4)

    def test_normalize_text(self) -> None:
        assert normalize_text(" A\tB \n") == "a b"


class TestOracle:
    """Aho-Corasick against the naive boundary-aware search."""

    def test_naive_scan_agrees_on_fixed_case(self) -> None:
        text = "@stan stan, falling in love! standard"
        assert naive_scan(["stan", "in love", "falling in love"], text) == [
            (6, 10, "stan"),
            (12, 27, "falling in love"),
            (20, 27, "in love"),
        ]

    def test_random_cases(self) -> None:
        assert check_matcher(300, np.random.default_rng(7)) == 0

    @pytest.mark.parametrize(
        ("text", "expected"),
        [
            ("@foo_bar baz", [(9, 12, "baz")]),
            ("@foo_baz baz", [(9, 12, "baz")]),
            ("xbaz baz", [(5, 8, "baz")]),
            ("baz!", [(0, 3, "baz")]),
            ("BAZ\t\tbaz_", [(0, 3, "baz"), (4, 7, "baz")]),
            ("baz1 1baz", []),
        ],
    )
    def test_boundary_cases_agree(self, text: str, expected: list) -> None:
        assert naive_scan(["baz"], text) == expected
        assert [(e.span[0], e.span[1], e.term_id) for e in _scan(["baz"], text)] == expected

    def test_detects_broken_handle_rule(self, monkeypatch: pytest.MonkeyPatch) -> None:
        monkeypatch.setattr(matcher_module, "_in_handle", lambda text, start: False)
        fast = [(e.span[0], e.span[1], e.term_id) for e in _scan(["baz"], "@baz")]
        assert fast == [(1, 4, "baz")]
        assert naive_scan(["baz"], "@baz") == []
