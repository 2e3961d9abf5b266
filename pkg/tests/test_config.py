"""Tests for configuration loading."""

from __future__ import annotations

import logging
from pathlib import Path

import pytest

from slanglag.config import CONFIG_FILENAME, RunConfig, find_config_file, load_config
from slanglag.errors import ConfigError
from slanglag.months import MonthRange


class TestFindConfigFile:
    """Tests for find_config_file()."""

    def test_nothing_found(self) -> None:
        assert find_config_file() is None

    def test_found_in_parent(
        self, isolated_config: Path, monkeypatch: pytest.MonkeyPatch
    ) -> None:
        (isolated_config / CONFIG_FILENAME).write_text("SLANGLAG_ALPHA=0.05\n")
        nested = isolated_config / "a" / "b"
        nested.mkdir(parents=True)
        monkeypatch.chdir(nested)
        assert find_config_file() == isolated_config / CONFIG_FILENAME

    def test_xdg_fallback(self) -> None:
        xdg = Path.home() / ".config" / "slanglag" / CONFIG_FILENAME
        xdg.parent.mkdir(parents=True)
        xdg.write_text("")
        assert find_config_file() == xdg

    def test_explicit_missing(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="not found"):
            find_config_file(tmp_path / "nope.env")


class TestLoadConfig:
    """Tests for load_config() priority and validation."""

    def test_defaults(self) -> None:
        config = load_config()
        assert config.window == MonthRange(start="2012-01", end="2019-09")
        assert config.alpha == 0.01
        assert config.k_min == -3
        assert config.k_max == 3
        assert config.count_per_doc is False

    def test_file_values(self, isolated_config: Path) -> None:
        (isolated_config / CONFIG_FILENAME).write_text(
            "SLANGLAG_ALPHA=0.05\nSLANGLAG_WINDOW=2014-01:2015-12\nSLANGLAG_TIME_KEYS=when, ts\n"
        )
        config = load_config()
        assert config.alpha == 0.05
        assert str(config.window) == "2014-01:2015-12"
        assert config.time_keys == ("when", "ts")
        assert config.event_format().time_keys == ("when", "ts")

    def test_priority(self, isolated_config: Path, monkeypatch: pytest.MonkeyPatch) -> None:
        (isolated_config / CONFIG_FILENAME).write_text("SLANGLAG_ALPHA=0.05\nSLANGLAG_SEED=1\n")
        monkeypatch.setenv("SLANGLAG_ALPHA", "0.02")
        config = load_config(seed=None)
        assert (config.alpha, config.seed) == (0.02, 1)
        assert load_config(alpha=0.1).alpha == 0.1

    def test_explicit_file(self, tmp_path: Path) -> None:
        path = tmp_path / "custom.env"
        path.write_text("SLANGLAG_MIN_OCCURRENCES=5\n")
        assert load_config(path).min_occurrences == 5

    def test_unknown_key_warns(
        self, isolated_config: Path, caplog: pytest.LogCaptureFixture
    ) -> None:
        (isolated_config / CONFIG_FILENAME).write_text("SLANGLAG_ALHPA=0.05\n")
        with caplog.at_level(logging.WARNING, logger="slanglag"):
            config = load_config()
        assert config.alpha == 0.01
        assert "SLANGLAG_ALHPA" in caplog.text

    @pytest.mark.parametrize(
        "overrides",
        [
            {"k_min": 2, "k_max": 1},
            {"alpha": 1.5},
            {"window": "2014-05:2014-01"},
            {"pmi_log_base": "1"},
            {"pelt_cost": "l1"},
            {"min_overlap_months": 1},
        ],
    )
    def test_invalid(self, overrides: dict) -> None:
        with pytest.raises(ConfigError, match="invalid configuration"):
            load_config(**overrides)

    def test_numeric_log_base(self) -> None:
        assert load_config(pmi_log_base="3").pmi_log_base == "3"


class TestRunConfig:
    """Tests for RunConfig helpers."""

    def test_hash_ignores_runtime_knobs(self, tmp_path: Path) -> None:
        base = RunConfig()
        assert RunConfig(threads=8, out=tmp_path).config_hash() == base.config_hash()
        assert RunConfig(alpha=0.05).config_hash() != base.config_hash()
        assert "threads" not in base.snapshot()
        assert base.snapshot()["window"] == "2012-01:2019-09"

    def test_require(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="dictionary is not configured"):
            RunConfig().require("dictionary")
        with pytest.raises(ConfigError, match="not found"):
            RunConfig(dictionary=tmp_path / "missing.jsonl").require("dictionary")
        present = tmp_path / "dict.jsonl"
        present.write_text("")
        RunConfig(dictionary=present).require("dictionary")

    def test_event_files(self, tmp_path: Path) -> None:
        with pytest.raises(ConfigError, match="not configured"):
            RunConfig().event_files()
        with pytest.raises(ConfigError, match="no input files"):
            RunConfig(events=str(tmp_path / "*.jsonl")).event_files()
        for name in ("b.jsonl", "a.jsonl"):
            (tmp_path / name).write_text("")
        files = RunConfig(events=str(tmp_path / "*.jsonl")).event_files()
        assert [f.name for f in files] == ["a.jsonl", "b.jsonl"]

    def test_criteria(self) -> None:
        criteria = RunConfig(min_occurrences=7).criteria(frozenset({"The"}))
        assert criteria.min_occurrences == 7
        assert criteria.stopwords == frozenset({"the"})
