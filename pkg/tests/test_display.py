"""Tests for display helpers.

SPDX-License-Identifier: MIT
"""

from __future__ import annotations

import logging

import pytest
import typer

from slanglag.display import (
    _fmt,
    print_analyze_summary,
    print_scan_results,
    print_selftest,
    reported_errors,
    setup_logging,
)
from slanglag.errors import AnalysisError, ConfigError
from slanglag.matcher import PatternSet, build_automaton, scan_text
from slanglag.pipeline import AnalyzeSummary
from slanglag.testing import SelftestResult


def test_fmt() -> None:
    assert _fmt(None) == "—"
    assert _fmt(0.123456) == "0.1235"


def test_setup_logging_levels() -> None:
    setup_logging(verbose=True)
    assert logging.getLogger("slanglag").level == logging.DEBUG
    setup_logging(quiet=True)
    assert logging.getLogger("slanglag").level == logging.ERROR
    setup_logging()
    assert logging.getLogger("slanglag").level == logging.WARNING
    assert len(logging.getLogger("slanglag").handlers) == 1


class TestReportedErrors:
    """Tests for reported_errors()."""

    @pytest.mark.parametrize(
        ("error", "code"),
        [
            (ConfigError("bad flag"), 1),
            (AnalysisError("too few"), 2),
            (RuntimeError("bug"), 3),
        ],
    )
    def test_exit_codes(self, error: Exception, code: int) -> None:
        with pytest.raises(typer.Exit) as info, reported_errors():
            raise error
        assert info.value.exit_code == code

    def test_exit_passes_through(self) -> None:
        with pytest.raises(typer.Exit) as info, reported_errors():
            raise typer.Exit(0)
        assert info.value.exit_code == 0


class TestPrinters:
    """Smoke tests for the Rich printers."""

    def test_analyze_summary(self, capsys: pytest.CaptureFixture[str]) -> None:
        summary = AnalyzeSummary(
            config_hash="abc",
            matched=5,
            selected=3,
            analysed=3,
            categories={"positive": 2, "negative": 0, "none": 1},
            lag_histogram={"-1": {"positive": 1}, "0": {"none": 1}, "1": {"positive": 1}},
            exclusions={"below_min_occurrences": 2},
            contingency={
                "ud": {"p(d|u)": 0.5, "p(d|~u)": None, "d_test_p": None},
                "twitter": {
                    "p(d|u)": 0.75,
                    "p(d|~u)": 0.0,
                    "d_test_p": 0.0001,
                    "d_test_reject": True,
                },
            },
        )
        print_analyze_summary(summary)
        out = capsys.readouterr().out
        assert "Correlated terms" in out
        assert "below_min_occurrences=2" in out
        assert out.count("significant") == 1

    def test_scan_results(self, capsys: pytest.CaptureFixture[str]) -> None:
        events = scan_text(build_automaton(PatternSet.from_terms(["stan"])), "i stan")
        print_scan_results("i stan", events)
        assert "stan" in capsys.readouterr().out

    def test_selftest(self, capsys: pytest.CaptureFixture[str]) -> None:
        print_selftest([SelftestResult("bh", 3, 0, 0.01), SelftestResult("ccf", 3, 1, 0.02)])
        out = capsys.readouterr().out
        assert "pass" in out
        assert "FAIL" in out
