# SPDX-License-Identifier: MIT
"""Run configuration from CLI flags, environment and a ``slanglag.env`` file.

SPDX-License-Identifier: MIT

Priority: CLI flags > ``SLANGLAG_*`` environment variables > config file >
defaults. The config file is dotenv-formatted and uses the same
``SLANGLAG_*`` keys as the environment.
"""

from __future__ import annotations

import glob
import hashlib
import json
import logging
from pathlib import Path
from typing import Annotated, Any, Literal

from dotenv import dotenv_values
from pydantic import Field, ValidationError, field_serializer, field_validator, model_validator
from pydantic_settings import BaseSettings, NoDecode, SettingsConfigDict

from slanglag.errors import ConfigError
from slanglag.ingest import EventFormat
from slanglag.models import SelectionCriteria
from slanglag.months import MonthRange

logger = logging.getLogger(__name__)

ENV_PREFIX = "SLANGLAG_"
CONFIG_FILENAME = "slanglag.env"
# Runtime knobs that must not change results; left out of the config hash.
_UNHASHED = frozenset({"threads", "out"})


def find_config_file(explicit: Path | None = None) -> Path | None:
    """Locate the config file.

    Search order:
    1. ``explicit`` (``--config``); must exist
    2. ``slanglag.env`` in the current directory or any parent
    3. ``~/.config/slanglag/slanglag.env``

    Returns ``None`` when nothing is found.

    Raises:
        ConfigError: If ``explicit`` does not exist.

    """
    if explicit is not None:
        if not explicit.is_file():
            raise ConfigError(f"config file not found: {explicit}")
        return explicit

    cwd = Path.cwd()
    for directory in [cwd, *cwd.parents]:
        candidate = directory / CONFIG_FILENAME
        if candidate.is_file():
            return candidate

    xdg_config = Path.home() / ".config" / "slanglag" / CONFIG_FILENAME
    return xdg_config if xdg_config.is_file() else None


def _split_keys(v: object) -> object:
    if isinstance(v, str):
        return tuple(k.strip() for k in v.split(",") if k.strip())
    return v


class RunConfig(BaseSettings):
    """Every knob of a pipeline run."""

    model_config = SettingsConfigDict(
        env_prefix=ENV_PREFIX,
        env_file_encoding="utf-8",
        extra="ignore",
        frozen=True,
    )

    window: Annotated[MonthRange, NoDecode] = MonthRange(start="2012-01", end="2019-09")
    events: str | None = None
    dictionary: Path | None = None
    stopwords: Path | None = None
    lexicon: Path | None = None
    out: Path = Path("out")

    min_occurrences: int = Field(default=10_000, ge=0)
    min_overlap_months: int = Field(default=12, ge=2)
    min_term_length: int = Field(default=3, ge=1)

    k_min: int = -3
    k_max: int = 3
    alpha: float = Field(default=0.01, ge=0.0, le=1.0)
    alpha_trend: float = Field(default=0.001, ge=0.0, le=1.0)
    pelt_penalty: float | None = Field(default=None, gt=0.0)
    pelt_cost: Literal["l2", "linear"] = "l2"
    ccf_mode: Literal["pearson", "global-moments"] = "pearson"
    count_per_doc: bool = False
    lang: str = "en"
    threads: int = Field(default=1, ge=1)
    error_budget: float = Field(default=0.01, ge=0.0, le=1.0)
    max_missing_days: int = Field(default=14, ge=0)
    pmi_min_support: int = Field(default=5, ge=1)
    pmi_log_base: str = "e"

    time_keys: Annotated[tuple[str, ...], NoDecode] = ("created_at", "ts", "timestamp_ms")
    text_key: str = "text"
    lang_key: str = "lang"
    time_format: Literal["auto", "iso", "epoch", "twitter"] = "auto"

    seed: int = 0
    permutations: int = Field(default=0, ge=0)

    @field_validator("window", mode="before")
    @classmethod
    def _parse_window(cls, v: object) -> object:
        return MonthRange.parse(v) if isinstance(v, str) else v

    @field_validator("time_keys", mode="before")
    @classmethod
    def _parse_time_keys(cls, v: object) -> object:
        return _split_keys(v)

    @field_validator("pmi_log_base")
    @classmethod
    def _check_base(cls, v: str) -> str:
        if v not in ("e", "2", "10"):
            try:
                if float(v) <= 1:
                    raise ValueError
            except ValueError:
                raise ValueError("pmi_log_base must be e, 2, 10 or a number > 1") from None
        return v

    @field_serializer("window")
    def _dump_window(self, window: MonthRange) -> str:
        return str(window)

    @model_validator(mode="after")
    def _check_lags(self) -> RunConfig:
        if self.k_min > self.k_max:
            raise ValueError(f"k_min ({self.k_min}) must not exceed k_max ({self.k_max})")
        return self

    # -------------------------------------------------------------------------

    def require(self, *names: str) -> None:
        """Check that the named input paths are configured and exist.

        Raises:
            ConfigError: Naming the first missing input.

        """
        for name in names:
            value = getattr(self, name)
            if value is None:
                raise ConfigError(
                    f"{name} is not configured (--{name} or {ENV_PREFIX}{name.upper()})"
                )
            if not Path(value).exists():
                raise ConfigError(f"{name} not found: {value}")

    def event_files(self) -> list[Path]:
        """Expand the ``events`` glob into a sorted file list.

        Raises:
            ConfigError: If no glob is configured or nothing matches.

        """
        if not self.events:
            raise ConfigError("no input files: events glob is not configured")
        files = sorted(Path(p) for p in glob.glob(self.events, recursive=True) if Path(p).is_file())
        if not files:
            raise ConfigError(f"no input files match '{self.events}'")
        return files

    def event_format(self) -> EventFormat:
        """Field names and time format of event lines."""
        return EventFormat(
            time_keys=self.time_keys,
            text_key=self.text_key,
            lang_key=self.lang_key,
            time_format=self.time_format,
        )

    def criteria(self, stopwords: frozenset[str] = frozenset()) -> SelectionCriteria:
        """Selection thresholds as a :class:`SelectionCriteria`."""
        return SelectionCriteria(
            min_occurrences=self.min_occurrences,
            min_overlap_months=self.min_overlap_months,
            min_term_length=self.min_term_length,
            stopwords=stopwords,
        )

    def snapshot(self) -> dict[str, Any]:
        """JSON-ready settings that determine the results."""
        data = self.model_dump(mode="json")
        return {k: data[k] for k in sorted(data) if k not in _UNHASHED}

    def config_hash(self) -> str:
        """SHA-256 of the canonical JSON snapshot."""
        canonical = json.dumps(self.snapshot(), sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(canonical.encode("utf-8")).hexdigest()


def _warn_unknown_keys(path: Path) -> None:
    known = {f"{ENV_PREFIX}{name}".upper() for name in RunConfig.model_fields}
    for key in dotenv_values(path):
        if key.upper() not in known:
            logger.warning("%s: unknown setting %s ignored", path, key)


def _format_validation(exc: ValidationError) -> str:
    parts = []
    for err in exc.errors():
        where = ".".join(str(p) for p in err["loc"])
        parts.append(f"{where}: {err['msg']}" if where else err["msg"])
    return "; ".join(parts)


def load_config(config_path: Path | None = None, **overrides: Any) -> RunConfig:
    """Build the run configuration.

    Args:
        config_path: Explicit config file (``--config``); discovered when ``None``.
        **overrides: CLI flag values; ``None`` means "not given".

    Raises:
        ConfigError: On a missing explicit file or invalid values.

    """
    env_file = find_config_file(config_path)
    if env_file is not None:
        logger.debug("using config file %s", env_file)
        _warn_unknown_keys(env_file)
    given = {k: v for k, v in overrides.items() if v is not None}
    try:
        return RunConfig(_env_file=env_file, **given)  # type: ignore[call-arg]
    except ValidationError as e:
        raise ConfigError(f"invalid configuration: {_format_validation(e)}") from e
