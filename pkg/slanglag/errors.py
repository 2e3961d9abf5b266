# SPDX-License-Identifier: MIT
"""Exception hierarchy and exit codes.

SPDX-License-Identifier: MIT

Every error the CLI can report derives from :class:`SlangLagError`; the class
attribute ``exit_code`` decides the process exit status (1 usage/config,
2 data, 3 internal).
"""

from __future__ import annotations

from dataclasses import dataclass


class SlangLagError(Exception):
    """Base error for the package."""

    exit_code = 3

    def __init__(self, message: str, *, reason: str | None = None) -> None:
        """Create an error.

        Args:
            message: Human readable description.
            reason: Optional machine-readable reason code.

        """
        super().__init__(message)
        self.reason = reason


class ConfigError(SlangLagError):
    """Invalid configuration or missing inputs."""

    exit_code = 1


class DataError(SlangLagError):
    """Input data cannot be processed."""

    exit_code = 2


class RecordError(DataError):
    """A single input record is malformed."""

    def __init__(self, message: str, *, line: int | None = None) -> None:
        """Create a record error located at ``line`` (1-based)."""
        super().__init__(message, reason="malformed_record")
        self.line = line


class ErrorBudgetExceeded(DataError):
    """Too many malformed records in an input file."""


class ShardError(DataError):
    """An event file could not be read."""

    def __init__(self, path: str, message: str) -> None:
        """Create a shard error naming the failing file."""
        super().__init__(f"{path}: {message}", reason="shard_failed")
        self.path = path
        self.detail = message

    def __reduce__(self) -> tuple[type[ShardError], tuple[str, str]]:
        """Pickle with the constructor signature (raised inside worker processes)."""
        return (type(self), (self.path, self.detail))


class InvalidDocumentError(DataError):
    """A document is not valid UTF-8."""


class DegenerateSeriesError(DataError):
    """A series has zero variance or too few points."""


class MissingMonthError(DataError):
    """A month has no observed minutes at all."""


class ImputationError(DataError):
    """A month needs imputation but no neighbour exists."""


class UndefinedTestError(DataError):
    """A significance test is undefined for the given sample size."""


class AnalysisError(DataError):
    """The analysis cannot proceed (e.g. too few selected terms)."""


class TermNotFoundError(DataError):
    """A requested term has not been analysed."""

    def __init__(self, term: str, suggestions: list[str]) -> None:
        """Create a not-found error with nearest-match suggestions."""
        hint = f" Did you mean: {', '.join(suggestions)}?" if suggestions else ""
        super().__init__(f"term '{term}' was not analysed.{hint}", reason="not_found")
        self.term = term
        self.suggestions = suggestions


@dataclass(frozen=True, slots=True)
class RecordIssue:
    """A non-fatal problem collected while reading input."""

    message: str
    line: int | None = None
    term: str | None = None

    def __str__(self) -> str:
        """Location prefix and message."""
        where = f"line {self.line}: " if self.line is not None else ""
        who = f"[{self.term}] " if self.term else ""
        return f"{where}{who}{self.message}"
