# SPDX-License-Identifier: MIT
"""Output mode for --json/--quiet, and report file writers.

SPDX-License-Identifier: MIT
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import os
import shutil
import sys
import tempfile
from collections.abc import Iterable, Iterator, Sequence
from contextlib import contextmanager
from dataclasses import dataclass
from pathlib import Path
from typing import IO, Any

from slanglag.errors import ConfigError


@dataclass
class OutputMode:
    """Mutable singleton holding the current output mode."""

    json: bool = False
    quiet: bool = False


_mode = OutputMode()


def get_mode() -> OutputMode:
    """Return the current output mode."""
    return _mode


def set_mode(*, json_mode: bool = False, quiet: bool = False) -> None:
    """Set the global output mode.

    Args:
        json_mode: Emit JSON to stdout instead of Rich tables.
        quiet: Suppress informational output (errors still go to stderr).

    """
    _mode.json = json_mode
    _mode.quiet = quiet


def emit_json(data: Any) -> None:
    """Write *data* as JSON to stdout."""
    sys.stdout.write(json.dumps(data, indent=2, ensure_ascii=False, default=str) + "\n")


# -----------------------------------------------------------------------------
# Files
# -----------------------------------------------------------------------------


def format_cell(value: Any) -> str:
    """Render one CSV cell: floats via shortest round-trip repr, ``None`` as empty."""
    if value is None:
        return ""
    if hasattr(value, "item"):  # numpy scalar
        value = value.item()
    if isinstance(value, bool):
        return "true" if value else "false"
    if isinstance(value, float):
        return "" if math.isnan(value) else repr(value)
    return str(value)


def write_csv_to(fh: IO[str], header: Sequence[str], rows: Iterable[Sequence[Any]]) -> None:
    """Write a header and rows as RFC-4180 CSV."""
    writer = csv.writer(fh, lineterminator="\r\n")
    writer.writerow(header)
    for row in rows:
        writer.writerow([format_cell(v) for v in row])


def write_csv(path: Path, header: Sequence[str], rows: Iterable[Sequence[Any]]) -> Path:
    """Write a UTF-8 CSV file."""
    with path.open("w", encoding="utf-8", newline="") as fh:
        write_csv_to(fh, header, rows)
    return path


def read_csv(path: Path, header: Sequence[str]) -> Iterator[list[str]]:
    """Yield data rows of a CSV written by :func:`write_csv`.

    Raises:
        ConfigError: If the file is missing or its header differs.

    """
    if not path.is_file():
        raise ConfigError(f"missing input file: {path}")
    with path.open(encoding="utf-8", newline="") as fh:
        reader = csv.reader(fh)
        found = next(reader, None)
        if found != list(header):
            raise ConfigError(f"{path}: unexpected header {found}")
        yield from reader


def write_json(path: Path, data: Any) -> Path:
    """Write canonical JSON (sorted keys, 2-space indent, trailing newline)."""
    path.write_text(
        json.dumps(data, indent=2, sort_keys=True, ensure_ascii=False, default=str) + "\n",
        encoding="utf-8",
    )
    return path


def file_sha256(path: Path) -> str:
    """Hex SHA-256 of a file's bytes."""
    digest = hashlib.sha256()
    with path.open("rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


@contextmanager
def staged_output(out_dir: Path, remove: Iterable[str] = ()) -> Iterator[Path]:
    """Yield a scratch directory whose files replace those in ``out_dir`` on success.

    Names in ``remove`` that the run did not stage are deleted from ``out_dir``
    on success, so an optional output from an earlier run does not outlive it.
    On any exception the scratch directory is removed and ``out_dir`` is left
    as it was.
    """
    out_dir = out_dir.resolve()
    out_dir.parent.mkdir(parents=True, exist_ok=True)
    staging = Path(tempfile.mkdtemp(prefix=f".{out_dir.name}.", dir=out_dir.parent))
    try:
        yield staging
        out_dir.mkdir(parents=True, exist_ok=True)
        staged = {item.name for item in staging.iterdir()}
        for name in sorted(set(remove) - staged):
            (out_dir / name).unlink(missing_ok=True)
        for item in sorted(staging.iterdir()):
            os.replace(item, out_dir / item.name)
    finally:
        shutil.rmtree(staging, ignore_errors=True)
