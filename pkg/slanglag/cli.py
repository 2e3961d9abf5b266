# SPDX-License-Identifier: MIT
"""slanglag — command-line interface.

SPDX-License-Identifier: MIT
"""

from __future__ import annotations

import os
from dataclasses import dataclass
from importlib.metadata import PackageNotFoundError
from importlib.metadata import version as _pkg_version
from pathlib import Path
from typing import Annotated, Any

import typer
from rich.console import Console

from slanglag import __version__
from slanglag.config import RunConfig, load_config
from slanglag.dictionary import filter_terms, load_dictionary_file, load_wordlist
from slanglag.display import (
    print_analyze_summary,
    print_error,
    print_match_summary,
    print_scan_results,
    print_selftest,
    print_success,
    reported_errors,
    setup_logging,
)
from slanglag.errors import ConfigError
from slanglag.matcher import PatternSet, build_automaton, normalize_text, scan_text
from slanglag.output import emit_json, get_mode, set_mode
from slanglag.pipeline import cmd_analyze, cmd_match, cmd_plotdata
from slanglag.testing import SUITES, run_selftest

app = typer.Typer(
    name="slanglag",
    help="Lead/lag analysis of slang terms between a dictionary and a social stream.",
    add_completion=True,
)


@dataclass
class _State:
    """Global options shared with every subcommand."""

    config: Path | None = None


def _version_callback(value: bool) -> None:
    """Print the package version and exit when ``--version`` is passed."""
    if value:
        try:
            typer.echo(f"slanglag {_pkg_version('slanglag')}")
        except PackageNotFoundError:
            typer.echo(f"slanglag {__version__}")
        raise typer.Exit()


@app.callback()
def _main_options(
    ctx: typer.Context,
    _version: bool | None = typer.Option(
        None,
        "--version",
        "-V",
        help="Show version and exit.",
        callback=_version_callback,
        is_eager=True,
    ),
    config: Annotated[
        Path | None,
        typer.Option("--config", "-c", help="Config file (dotenv format, SLANGLAG_* keys)."),
    ] = None,
    json_output: bool = typer.Option(
        False,
        "--json",
        help="Output JSON (implies --quiet).",
        is_eager=True,
    ),
    quiet: bool = typer.Option(
        False,
        "--quiet",
        "-q",
        help="Suppress informational output.",
        is_eager=True,
    ),
    verbose: bool = typer.Option(False, "--verbose", "-v", help="Log debug details to stderr."),
) -> None:
    """Match slang terms in event streams and relate their usage to a dictionary."""
    set_mode(json_mode=json_output, quiet=quiet or json_output)
    setup_logging(verbose=verbose, quiet=quiet or json_output)
    ctx.obj = _State(config=config)


# Subcommands are registered below (see slanglag.cli_synth).

_no_color = bool(os.environ.get("NO_COLOR"))
console = Console(no_color=_no_color)


# -----------------------------------------------------------------------------
# Helpers
# -----------------------------------------------------------------------------


def _config(ctx: typer.Context, **overrides: Any) -> RunConfig:
    state = ctx.obj if isinstance(ctx.obj, _State) else _State()
    return load_config(state.config, **overrides)


WindowOpt = Annotated[
    str | None, typer.Option("--window", "-w", help="Month window YYYY-MM:YYYY-MM.")
]
OutOpt = Annotated[Path | None, typer.Option("--out", "-o", help="Output directory.")]
DictionaryOpt = Annotated[
    Path | None, typer.Option("--dictionary", "-d", help="Dictionary JSON-lines file.")
]
StopwordsOpt = Annotated[Path | None, typer.Option("--stopwords", help="Stopword list.")]


# -----------------------------------------------------------------------------
# Commands
# -----------------------------------------------------------------------------


@app.command()
def match(
    ctx: typer.Context,
    events: Annotated[
        str | None, typer.Option("--events", "-e", help="Glob of event files (.jsonl/.gz).")
    ] = None,
    dictionary: DictionaryOpt = None,
    stopwords: StopwordsOpt = None,
    window: WindowOpt = None,
    out: OutOpt = None,
    lang: Annotated[
        str | None, typer.Option("--lang", help="Language code to keep ('any' keeps all).")
    ] = None,
    threads: Annotated[
        int | None, typer.Option("--threads", "-t", help="Worker processes.")
    ] = None,
    count_per_doc: Annotated[
        bool | None,
        typer.Option(
            "--count-per-doc/--count-all", help="Count a term once per event, or every time."
        ),
    ] = None,
    min_term_length: Annotated[
        int | None, typer.Option("--min-term-length", help="Shortest headword matched.")
    ] = None,
    error_budget: Annotated[
        float | None, typer.Option("--error-budget", help="Tolerated malformed-record fraction.")
    ] = None,
) -> None:
    """Count dictionary terms per day and measure minute coverage."""
    mode = get_mode()
    with reported_errors():
        config = _config(
            ctx,
            events=events,
            dictionary=dictionary,
            stopwords=stopwords,
            window=window,
            out=out,
            lang=lang,
            threads=threads,
            count_per_doc=count_per_doc,
            min_term_length=min_term_length,
            error_budget=error_budget,
        )
        summary = cmd_match(config)

    if mode.json:
        emit_json(summary.as_dict())
    elif not mode.quiet:
        print_match_summary(summary)


@app.command()
def analyze(
    ctx: typer.Context,
    dictionary: DictionaryOpt = None,
    stopwords: StopwordsOpt = None,
    lexicon: Annotated[
        Path | None, typer.Option("--lexicon", help="Reference lexicon word list.")
    ] = None,
    window: WindowOpt = None,
    out: OutOpt = None,
    min_occurrences: Annotated[
        int | None, typer.Option("--min-occurrences", help="Minimum stream occurrences.")
    ] = None,
    min_overlap: Annotated[
        int | None, typer.Option("--min-overlap", help="Minimum overlapping months.")
    ] = None,
    k_min: Annotated[int | None, typer.Option("--k-min", help="Smallest lag tried.")] = None,
    k_max: Annotated[int | None, typer.Option("--k-max", help="Largest lag tried.")] = None,
    alpha: Annotated[float | None, typer.Option("--alpha", help="FDR level.")] = None,
    alpha_trend: Annotated[
        float | None, typer.Option("--alpha-trend", help="Level for the trend t-tests.")
    ] = None,
    pelt_penalty: Annotated[
        float | None, typer.Option("--pelt-penalty", help="Change-point penalty (auto if unset).")
    ] = None,
    pelt_cost: Annotated[
        str | None, typer.Option("--pelt-cost", help="Segment cost: l2 or linear.")
    ] = None,
    ccf_mode: Annotated[
        str | None, typer.Option("--ccf-mode", help="pearson or global-moments.")
    ] = None,
    max_missing_days: Annotated[
        int | None, typer.Option("--max-missing-days", help="Impute months missing more days.")
    ] = None,
    permutations: Annotated[
        int | None, typer.Option("--permutations", help="Permutation test draws (0 = off).")
    ] = None,
    seed: Annotated[int | None, typer.Option("--seed", help="Random seed.")] = None,
) -> None:
    """Correlate, associate and segment the matched terms."""
    mode = get_mode()
    with reported_errors():
        config = _config(
            ctx,
            dictionary=dictionary,
            stopwords=stopwords,
            lexicon=lexicon,
            window=window,
            out=out,
            min_occurrences=min_occurrences,
            min_overlap_months=min_overlap,
            k_min=k_min,
            k_max=k_max,
            alpha=alpha,
            alpha_trend=alpha_trend,
            pelt_penalty=pelt_penalty,
            pelt_cost=pelt_cost,
            ccf_mode=ccf_mode,
            max_missing_days=max_missing_days,
            permutations=permutations,
            seed=seed,
        )
        summary = cmd_analyze(config)

    if mode.json:
        emit_json(summary.as_dict())
    elif not mode.quiet:
        print_analyze_summary(summary)


@app.command()
def plotdata(
    ctx: typer.Context,
    term: Annotated[str, typer.Argument(help="Analysed term.")],
    out: OutOpt = None,
    stdout: Annotated[
        bool, typer.Option("--stdout", help="Write the CSV to stdout instead of a file.")
    ] = False,
) -> None:
    """Export one term's aligned series and trending flags for plotting."""
    mode = get_mode()
    with reported_errors():
        config = _config(ctx, out=out)
        path = cmd_plotdata(config, term, stdout=stdout)

    if path is None:
        return
    if mode.json:
        emit_json({"term": term, "path": str(path)})
    elif not mode.quiet:
        print_success(f"Wrote [bold]{path}[/bold]")


@app.command()
def selftest(
    cases: Annotated[int, typer.Option("--cases", "-n", help="Random cases per suite.")] = 200,
    seed: Annotated[int, typer.Option("--seed", help="Random seed.")] = 0,
    suite: Annotated[
        list[str] | None,
        typer.Option("--suite", "-s", help=f"Suite to run (repeatable): {', '.join(SUITES)}."),
    ] = None,
) -> None:
    """Check the fast algorithms against their brute-force references."""
    mode = get_mode()
    with reported_errors():
        if cases < 1:
            raise ConfigError("--cases must be at least 1")
        try:
            results = run_selftest(cases, seed, suite or None)
        except ValueError as e:
            raise ConfigError(str(e)) from e

    if mode.json:
        emit_json([r.as_dict() for r in results])
    elif not mode.quiet:
        print_selftest(results)

    failed = [r.name for r in results if not r.passed]
    if failed:
        print_error(f"slanglag: selftest failed: {', '.join(failed)}")
        raise typer.Exit(3)


@app.command()
def scan(
    ctx: typer.Context,
    text: Annotated[str, typer.Argument(help="Text to scan.")],
    term: Annotated[
        list[str] | None,
        typer.Option("--term", help="Pattern to look for (repeatable); default: the dictionary."),
    ] = None,
    dictionary: DictionaryOpt = None,
    stopwords: StopwordsOpt = None,
    pretty: Annotated[bool, typer.Option("--pretty", help="Show a table.")] = False,
) -> None:
    """Print the matches of the dictionary (or --term patterns) in TEXT."""
    mode = get_mode()
    with reported_errors():
        if term:
            patterns = PatternSet.from_terms(term)
        else:
            config = _config(ctx, dictionary=dictionary, stopwords=stopwords)
            config.require("dictionary")
            assert config.dictionary is not None
            loaded = load_dictionary_file(config.dictionary, error_budget=config.error_budget)
            words = load_wordlist(config.stopwords) if config.stopwords else frozenset()
            patterns = PatternSet.from_terms(
                filter_terms(loaded.terms.values(), config.criteria(words))
            )
        events = scan_text(build_automaton(patterns), text)

    if mode.json:
        emit_json([{"term_id": e.term_id, "start": e.span[0], "end": e.span[1]} for e in events])
    elif pretty:
        print_scan_results(normalize_text(text), events)
    else:
        for event in events:
            typer.echo(f"{event.term_id}\t{event.span[0]}\t{event.span[1]}")


# Register subcommands at import time so they also appear in `--help`.
from slanglag.cli_synth import register as _register_synth  # noqa: E402

_register_synth(app, console)


def main() -> None:
    """Entry point."""
    app()
