# SPDX-License-Identifier: MIT
"""Pydantic models and shared enums.

SPDX-License-Identifier: MIT
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import StrEnum

from pydantic import BaseModel, ConfigDict, Field, field_validator

from slanglag.months import Month


def normalize_term(text: str) -> str:
    """Lowercase (Unicode-aware) and collapse runs of whitespace to one space."""
    return " ".join(text.split()).lower()


class _FrozenModel(BaseModel):
    """Base model: immutable, unknown keys rejected."""

    model_config = ConfigDict(frozen=True, extra="forbid")


class Category(StrEnum):
    """Correlation group of a term."""

    POSITIVE = "positive"
    NEGATIVE = "negative"
    NONE = "none"


class Platform(StrEnum):
    """Which side a series comes from."""

    UD = "ud"
    TWITTER = "twitter"


class Provenance(StrEnum):
    """How a monthly value came to be."""

    OBSERVED = "observed"
    CORRECTED = "corrected"
    IMPUTED = "imputed"
    # Transient: zero observed minutes, awaiting imputation.
    MISSING = "missing"


class ExclusionReason(StrEnum):
    """Why a term dropped out of a pipeline stage."""

    BELOW_MIN_OCCURRENCES = "below_min_occurrences"
    INSUFFICIENT_OVERLAP = "insufficient_overlap"
    NO_ACTIVITY = "no_activity"
    DEGENERATE_SERIES = "degenerate_series"
    ALL_LAGS_OMITTED = "all_lags_omitted"
    UNDEFINED_TEST = "undefined_test"
    IMPUTATION_IMPOSSIBLE = "imputation_impossible"
    TOO_SHORT = "too_short"


class TermRecord(_FrozenModel):
    """A dictionary headword with its tags, definition events, votes and activity log."""

    term: str
    tags: frozenset[str] = frozenset()
    definition_months: tuple[Month, ...] = ()
    upvotes: int = Field(default=0, ge=0)
    downvotes: int = Field(default=0, ge=0)
    activity: dict[Month, int] | None = None

    @field_validator("term")
    @classmethod
    def _normalize(cls, v: str) -> str:
        v = normalize_term(v)
        if not v:
            raise ValueError("term is empty after normalization")
        return v

    @field_validator("tags", mode="before")
    @classmethod
    def _strip_tags(cls, v: object) -> object:
        if isinstance(v, list | tuple | set | frozenset):
            return frozenset(str(t).strip() for t in v if str(t).strip())
        return v

    @field_validator("activity")
    @classmethod
    def _non_negative(cls, v: dict[str, int] | None) -> dict[str, int] | None:
        if v is not None and any(count < 0 for count in v.values()):
            raise ValueError("activity counts must be non-negative")
        return v

    def merged_with(self, other: TermRecord) -> TermRecord:
        """Merge a duplicate headword (caller resolves activity conflicts first)."""
        return TermRecord(
            term=self.term,
            tags=self.tags | other.tags,
            definition_months=self.definition_months + other.definition_months,
            upvotes=self.upvotes + other.upvotes,
            downvotes=self.downvotes + other.downvotes,
            activity=self.activity if self.activity is not None else other.activity,
        )


class SelectionCriteria(_FrozenModel):
    """Thresholds deciding which terms are matched and analysed."""

    min_occurrences: int = Field(default=10_000, ge=0)
    min_overlap_months: int = Field(default=12, ge=2)
    min_term_length: int = Field(default=3, ge=1)
    stopwords: frozenset[str] = frozenset()

    @field_validator("stopwords")
    @classmethod
    def _normalize_stopwords(cls, v: frozenset[str]) -> frozenset[str]:
        return frozenset(normalize_term(w) for w in v if w.strip())


@dataclass(frozen=True, slots=True, order=True)
class Exclusion:
    """A term dropped at a stage.

    ``stage`` is ``selection``, ``series``, ``correlation`` or ``trends:<platform>``.
    """

    term_id: str
    stage: str
    reason: ExclusionReason

    def row(self) -> tuple[str, str, str]:
        """``exclusions.csv`` row."""
        return (self.term_id, self.stage, str(self.reason))
