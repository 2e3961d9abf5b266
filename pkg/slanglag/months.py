# SPDX-License-Identifier: MIT
"""Calendar-month helpers.

Months are carried as ``"YYYY-MM"`` strings throughout the package: they sort
correctly as text, serialise to CSV unchanged, and convert to a dense integer
index for arithmetic.

SPDX-License-Identifier: MIT
"""

from __future__ import annotations

import calendar
import re
from collections.abc import Iterator
from datetime import date, datetime
from typing import Annotated

from pydantic import AfterValidator, BaseModel, ConfigDict, model_validator

MIN_YEAR = 1999
MINUTES_PER_DAY = 60 * 24

_MONTH_RE = re.compile(r"^(\d{4})-(\d{2})$")


def parse_month(value: str) -> tuple[int, int]:
    """Split a ``"YYYY-MM"`` string into ``(year, month)``.

    Raises:
        ValueError: If the string is not a valid calendar month.

    """
    m = _MONTH_RE.match(value.strip())
    if not m:
        raise ValueError(f"invalid month '{value}' (expected YYYY-MM)")
    year, month = int(m.group(1)), int(m.group(2))
    if year < MIN_YEAR or not 1 <= month <= 12:
        raise ValueError(f"invalid month '{value}'")
    return year, month


def check_month(value: str) -> str:
    """Validate and canonicalise a month string (pydantic ``AfterValidator``)."""
    year, month = parse_month(value)
    return f"{year:04d}-{month:02d}"


Month = Annotated[str, AfterValidator(check_month)]


def month_index(value: str) -> int:
    """Return a dense index (``year * 12 + month - 1``) for arithmetic."""
    year, month = parse_month(value)
    return year * 12 + month - 1


def month_from_index(index: int) -> str:
    """Inverse of :func:`month_index`."""
    year, rem = divmod(index, 12)
    return f"{year:04d}-{rem + 1:02d}"


def shift_month(value: str, offset: int) -> str:
    """Return the month ``offset`` months after ``value`` (negative goes back)."""
    return month_from_index(month_index(value) + offset)


def days_in_month(value: str) -> int:
    """Number of days in the month, leap years included."""
    year, month = parse_month(value)
    return calendar.monthrange(year, month)[1]


def expected_minutes(value: str) -> int:
    """``60 * 24 * n_days`` for the month."""
    return MINUTES_PER_DAY * days_in_month(value)


def month_of(moment: date | datetime) -> str:
    """Return the calendar month containing a date or datetime."""
    return f"{moment.year:04d}-{moment.month:02d}"


def month_span(start: str, end: str) -> list[str]:
    """All months from ``start`` to ``end`` inclusive (empty if ``end < start``)."""
    lo, hi = month_index(start), month_index(end)
    return [month_from_index(i) for i in range(lo, hi + 1)]


def month_days(value: str) -> Iterator[str]:
    """Yield every ISO day (``YYYY-MM-DD``) in the month."""
    for day in range(1, days_in_month(value) + 1):
        yield f"{value}-{day:02d}"


class MonthRange(BaseModel):
    """Inclusive window of calendar months, e.g. ``2012-01:2019-09``."""

    model_config = ConfigDict(frozen=True)

    start: Month
    end: Month

    @model_validator(mode="after")
    def _ordered(self) -> MonthRange:
        if self.start >= self.end:
            raise ValueError(f"window start {self.start} must precede end {self.end}")
        return self

    @classmethod
    def parse(cls, text: str) -> MonthRange:
        """Parse ``"YYYY-MM:YYYY-MM"``."""
        start, sep, end = text.partition(":")
        if not sep:
            raise ValueError(f"invalid window '{text}' (expected YYYY-MM:YYYY-MM)")
        return cls(start=start.strip(), end=end.strip())

    def months(self) -> list[str]:
        """All months of the window in order."""
        return month_span(self.start, self.end)

    def __contains__(self, month: object) -> bool:
        """True for a month string inside the window."""
        return isinstance(month, str) and self.start <= month <= self.end

    def __len__(self) -> int:
        """Number of months."""
        return month_index(self.end) - month_index(self.start) + 1

    def __str__(self) -> str:
        """``start:end``, the form :meth:`parse` reads."""
        return f"{self.start}:{self.end}"
