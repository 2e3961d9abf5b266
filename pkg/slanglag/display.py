# SPDX-License-Identifier: MIT
"""Rich-based display helpers for slanglag output.

SPDX-License-Identifier: MIT
"""

from __future__ import annotations

import logging
import os
from collections.abc import Iterator, Sequence
from contextlib import contextmanager
from pathlib import Path
from typing import TYPE_CHECKING

import typer
from rich import box
from rich.console import Console
from rich.logging import RichHandler
from rich.table import Table

from slanglag.errors import SlangLagError
from slanglag.models import Category

if TYPE_CHECKING:
    from slanglag.matcher import MatchEvent
    from slanglag.pipeline import AnalyzeSummary, MatchSummary
    from slanglag.synth import GroundTruth
    from slanglag.testing import SelftestResult

logger = logging.getLogger(__name__)

_no_color = bool(os.environ.get("NO_COLOR"))
console = Console(no_color=_no_color)
err_console = Console(stderr=True, no_color=_no_color)

_CATEGORY_STYLE = {
    str(Category.POSITIVE): "green",
    str(Category.NEGATIVE): "red",
    str(Category.NONE): "dim",
}


def setup_logging(*, verbose: bool = False, quiet: bool = False) -> None:
    """Route package logs to stderr through Rich.

    ``verbose`` selects DEBUG, ``quiet`` ERROR, otherwise WARNING.
    """
    level = logging.DEBUG if verbose else logging.ERROR if quiet else logging.WARNING
    root = logging.getLogger("slanglag")
    root.handlers = [
        RichHandler(console=err_console, show_path=verbose, rich_tracebacks=verbose),
    ]
    root.setLevel(level)


def _fmt(value: float | None, digits: int = 4) -> str:
    return "—" if value is None else f"{value:.{digits}g}"


def _print_table(table: Table) -> None:
    """Print a Rich table surrounded by blank lines."""
    console.print()
    console.print(table)
    console.print()


# -----------------------------------------------------------------------------
# Output functions
# -----------------------------------------------------------------------------


def print_match_summary(summary: MatchSummary) -> None:
    """Print what ``match`` read and wrote."""
    table = Table(title="Match", box=box.ROUNDED, highlight=True, show_header=False)
    table.add_column("Key", style="dim")
    table.add_column("Value", justify="right")
    table.add_row("Files", str(summary.files))
    table.add_row("Patterns", str(summary.patterns))
    table.add_row("Automaton states", str(summary.automaton_states))
    table.add_row("Terms matched", str(summary.terms_matched))
    for key, value in summary.stats.items():
        table.add_row(key.replace("_", " ").capitalize(), str(value))
    _print_table(table)
    if summary.issues:
        console.print(f"[yellow]{len(summary.issues)} dictionary issue(s) skipped[/yellow]")
    print_success(f"Wrote match outputs to [bold]{summary.out_dir}[/bold]")


def print_analyze_summary(summary: AnalyzeSummary) -> None:
    """Print category counts and the lag-by-category histogram."""
    counts = Table(title="Correlated terms", box=box.ROUNDED, highlight=True)
    counts.add_column("Category")
    counts.add_column("Terms", justify="right", style="yellow")
    for category, n in summary.categories.items():
        style = _CATEGORY_STYLE.get(category, "")
        counts.add_row(f"[{style}]{category}[/{style}]" if style else category, str(n))
    counts.add_row("[bold]analysed[/bold]", str(summary.analysed))
    _print_table(counts)

    lags = sorted(summary.lag_histogram, key=int)
    if lags:
        hist = Table(title="Best lag by category", box=box.ROUNDED, highlight=True)
        hist.add_column("Category")
        for lag in lags:
            hist.add_column(f"{int(lag):+d}" if int(lag) else "0", justify="right")
        for category in (str(c) for c in Category):
            hist.add_row(
                category, *(str(summary.lag_histogram[lag].get(category, 0)) for lag in lags)
            )
        _print_table(hist)

    if summary.exclusions:
        excluded = ", ".join(f"{k}={v}" for k, v in summary.exclusions.items())
        console.print(f"[dim]Excluded: {excluded}[/dim]")
    for platform, probs in summary.contingency.items():
        reject = probs.get("d_test_reject")
        flag = "" if reject is None else (" [bold]significant[/bold]" if reject else " n.s.")
        console.print(
            f"[dim]{platform}:[/dim] p(d|u)={_fmt(probs['p(d|u)'])} "
            f"p(d|~u)={_fmt(probs['p(d|~u)'])} t-test p={_fmt(probs['d_test_p'])}{flag}"
        )
    if summary.out_dir is not None:
        print_success(f"Wrote analysis outputs to [bold]{summary.out_dir}[/bold]")


def print_scan_results(text: str, events: Sequence[MatchEvent]) -> None:
    """Print the matches found in one text."""
    if not events:
        console.print("\n[dim]No matches.[/dim]\n")
        return
    table = Table(title="Matches", box=box.ROUNDED, highlight=True)
    table.add_column("Term", style="cyan")
    table.add_column("Start", justify="right")
    table.add_column("End", justify="right")
    table.add_column("Text")
    for event in events:
        start, end = event.span
        table.add_row(event.term_id, str(start), str(end), text[start:end])
    _print_table(table)


def print_selftest(results: Sequence[SelftestResult]) -> None:
    """Print one row per oracle suite."""
    table = Table(title="Self-test", box=box.ROUNDED, highlight=True)
    table.add_column("Suite", style="cyan")
    table.add_column("Cases", justify="right")
    table.add_column("Mismatches", justify="right")
    table.add_column("Seconds", justify="right", style="dim")
    table.add_column("Result")
    for res in results:
        verdict = "[green]pass[/green]" if res.passed else "[red]FAIL[/red]"
        table.add_row(res.name, str(res.cases), str(res.mismatches), f"{res.seconds:.2f}", verdict)
    _print_table(table)


def print_synth_summary(truth: GroundTruth, out_dir: Path) -> None:
    """Print the planted truths of a generated corpus."""
    table = Table(title=f"Synthetic corpus — {truth.window}", box=box.ROUNDED, highlight=True)
    table.add_column("Term", style="cyan")
    table.add_column("Lag", justify="right")
    table.add_column("Sign", justify="right")
    table.add_column("Trending months", justify="right")
    table.add_column("Definitions", justify="right")
    for term in truth.terms:
        table.add_row(
            term.term,
            f"{term.lag:+d}",
            f"{term.sign:+d}",
            str(len(term.trending_months)),
            str(len(term.definition_months)),
        )
    _print_table(table)
    print_success(f"Wrote corpus to [bold]{out_dir}[/bold]")


def print_success(message: str) -> None:
    """Print a success message."""
    console.print(f"\n[bold green]✔[/bold green] {message}\n")


def print_error(message: str) -> None:
    """Print an error message to stderr."""
    err_console.print(f"\n[bold red]✘[/bold red] {message}\n")


@contextmanager
def reported_errors() -> Iterator[None]:
    """Turn package errors into a red message and their exit code; anything else exits 3."""
    try:
        yield
    except typer.Exit:
        raise
    except SlangLagError as e:
        print_error(f"slanglag: {e}")
        raise typer.Exit(e.exit_code) from e
    except Exception as e:
        logger.debug("internal error", exc_info=True)
        print_error(f"slanglag: internal error: {e}")
        raise typer.Exit(3) from e
