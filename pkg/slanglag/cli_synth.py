# SPDX-License-Identifier: MIT
"""CLI command for generating synthetic corpora.

SPDX-License-Identifier: MIT
"""

from __future__ import annotations

from pathlib import Path
from typing import TYPE_CHECKING, Annotated, Any

import typer
from pydantic import ValidationError

from slanglag.display import print_synth_summary, reported_errors
from slanglag.errors import ConfigError
from slanglag.output import emit_json, get_mode
from slanglag.synth import SynthSpec, generate

if TYPE_CHECKING:
    from rich.console import Console


def _build_spec(spec_file: Path | None, flags: dict[str, Any]) -> SynthSpec:
    """Spec from a JSON file, with any explicit flags laid over it.

    Raises:
        ConfigError: If the file is unreadable or the resulting spec is infeasible.

    """
    given = {k: v for k, v in flags.items() if v is not None}
    try:
        base: dict[str, Any] = {}
        if spec_file is not None:
            if not spec_file.is_file():
                raise ConfigError(f"spec file not found: {spec_file}")
            base = SynthSpec.model_validate_json(spec_file.read_text(encoding="utf-8")).model_dump()
        return SynthSpec.model_validate({**base, **given})
    except ValidationError as e:
        errors = "; ".join(
            f"{'.'.join(str(p) for p in err['loc']) or 'spec'}: {err['msg']}" for err in e.errors()
        )
        raise ConfigError(f"invalid synthetic spec: {errors}") from e


def register(app: typer.Typer, console: Console) -> None:
    """Register the ``synth`` command.

    Args:
        app: Parent Typer app.
        console: Rich console for output.

    """

    @app.command("synth")
    def synth(
        out_dir: Annotated[Path, typer.Argument(help="Directory to write the corpus into.")],
        spec_file: Annotated[
            Path | None, typer.Option("--spec", help="JSON file with SynthSpec fields.")
        ] = None,
        terms: Annotated[int | None, typer.Option("--terms", help="Number of terms.")] = None,
        start: Annotated[str | None, typer.Option("--start", help="First month.")] = None,
        months: Annotated[int | None, typer.Option("--months", help="Window length.")] = None,
        noise: Annotated[float | None, typer.Option("--noise", help="Activity noise.")] = None,
        dropout: Annotated[
            float | None, typer.Option("--dropout", help="Minute dropout rate in [0, 1).")
        ] = None,
        coupling: Annotated[
            float | None,
            typer.Option("--coupling", help="Definition probability in trending months."),
        ] = None,
        baseline: Annotated[
            float | None,
            typer.Option("--baseline-rate", help="Definition probability elsewhere."),
        ] = None,
        seed: Annotated[int | None, typer.Option("--seed", help="Random seed.")] = None,
    ) -> None:
        """Write a synthetic corpus with planted lags, trends and definitions."""
        mode = get_mode()
        with reported_errors():
            spec = _build_spec(
                spec_file,
                {
                    "n_terms": terms,
                    "start": start,
                    "months": months,
                    "noise": noise,
                    "dropout": dropout,
                    "coupling": coupling,
                    "baseline_definition_rate": baseline,
                    "seed": seed,
                },
            )
            truth = generate(spec, out_dir)

        if mode.json:
            emit_json(
                {
                    "out_dir": str(out_dir),
                    "window": truth.window,
                    "terms": [{"term": t.term, "lag": t.lag, "sign": t.sign} for t in truth.terms],
                }
            )
        elif not mode.quiet:
            print_synth_summary(truth, out_dir)
