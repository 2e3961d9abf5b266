"""Tests for tag PMI and lexicon coverage."""

from __future__ import annotations

import math

import pytest

from slanglag.association import LagBucket, lexicon_coverage, pmi, pmi_tags
from slanglag.errors import ConfigError
from slanglag.models import Category

CATEGORIES = {
    "a": Category.POSITIVE,
    "b": Category.POSITIVE,
    "c": Category.NONE,
    "d": Category.NONE,
}
TAGS = {"a": ["music", "music"], "b": ["music", "food"], "c": ["food"]}


class TestPmi:
    """Tests for pmi()."""

    def test_spot_values(self) -> None:
        assert math.isclose(pmi(1, 1, 1, 2), math.log(2))
        assert pmi(1, 2, 1, 2) == 0.0
        assert pmi(1, 1, 1, 2, base="2") == 1.0

    def test_symmetric_in_the_two_marginals(self) -> None:
        for total in range(1, 30, 7):
            for joint in range(1, total + 1, 3):
                for a in range(joint, total + 1, 4):
                    for b in range(joint, total + 1, 5):
                        assert pmi(joint, a, b, total) == pmi(joint, b, a, total)

    @pytest.mark.parametrize("counts", [(0, 1, 1, 2), (1, 0, 1, 2), (1, 1, 0, 2), (1, 1, 1, 0)])
    def test_zero_counts(self, counts: tuple[int, int, int, int]) -> None:
        assert pmi(*counts) is None


class TestPmiTags:
    """Tests for pmi_tags()."""

    def test_positive_group(self) -> None:
        rows = pmi_tags(TAGS, CATEGORIES, min_support=1)
        assert [(r.tag, r.group) for r in rows] == [
            ("music", Category.POSITIVE),
            ("food", Category.POSITIVE),
        ]
        music, food = rows
        assert math.isclose(music.pmi, math.log(2))
        assert (music.joint_count, music.tag_count, music.group_count, music.total) == (2, 2, 2, 4)
        assert food.pmi == 0.0

    def test_min_support_drops_rare_pairs(self) -> None:
        rows = pmi_tags(TAGS, CATEGORIES, min_support=2)
        assert [r.tag for r in rows] == ["music"]

    def test_none_group_on_request(self) -> None:
        rows = pmi_tags(TAGS, CATEGORIES, min_support=1, groups=[Category.NONE])
        assert [r.tag for r in rows] == ["food"]

    def test_row_layout(self) -> None:
        row = pmi_tags(TAGS, CATEGORIES, min_support=2)[0].row()
        assert row[:2] == ("music", "positive")
        assert row[3:] == (2, 2, 2)


class TestLexiconCoverage:
    """Tests for LagBucket and lexicon_coverage()."""

    def test_buckets(self) -> None:
        assert [LagBucket.of(k) for k in (-2, 0, 3)] == [
            LagBucket.NEGATIVE,
            LagBucket.ZERO,
            LagBucket.POSITIVE,
        ]

    def test_table(self) -> None:
        cells = lexicon_coverage(
            {"a": Category.POSITIVE, "b": Category.POSITIVE, "c": Category.NONE},
            {"a": -1, "b": 2, "c": 0},
            ["A", "c"],
        )
        assert len(cells) == 16
        table = {(c.group, c.lag_bucket): c for c in cells}
        assert table[("positive", "t<0")].defined_fraction == 1.0
        assert table[("positive", "t>0")].defined_fraction == 0.0
        assert table[("positive", "all")].defined_fraction == 0.5
        assert table[("all", "t=0")].defined_fraction == 1.0
        assert math.isclose(table[("all", "all")].defined_fraction or 0.0, 2 / 3)
        assert table[("negative", "t<0")].defined_fraction is None
        assert table[("negative", "all")].row() == ("negative", "all", None, 0)

    @pytest.mark.parametrize("lexicon", [[], [" ", ""]])
    def test_empty_lexicon(self, lexicon: list[str]) -> None:
        with pytest.raises(ConfigError):
            lexicon_coverage({"a": Category.NONE}, {"a": 0}, lexicon)
