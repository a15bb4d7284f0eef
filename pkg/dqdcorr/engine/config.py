"""Configuration loading for dqdcorr."""

import logging
import os
import re
from pathlib import Path
from typing import Any

import yaml
from pydantic import BaseModel, ConfigDict, Field, ValidationError, field_validator

from .errors import InvalidParameterError

logger = logging.getLogger(__name__)

SETTINGS_FILE = "dqdcorr.yaml"
WORKERS_ENV = "DQDCORR_WORKERS"
LOG_LEVELS = ("DEBUG", "INFO", "WARNING", "ERROR", "CRITICAL")


class Settings(BaseModel):
    """Run settings. Physics inputs are never read from here, only from flags."""

    model_config = ConfigDict(extra="forbid")

    workers: int | None = Field(default=None, ge=1)  # None: os.cpu_count()
    log_level: str = "WARNING"
    sweep_points: int = Field(default=400, ge=2)
    validation_points: int = Field(default=8000, ge=1)
    validation_seed: int = 0
    threshold_tol: float = Field(default=1e-4, gt=0)

    @field_validator("log_level")
    @classmethod
    def _known_level(cls, value: str) -> str:
        # An unset ${VAR} interpolates to "".
        level = value.upper() or "WARNING"
        if level not in LOG_LEVELS:
            raise ValueError(f"log_level must be one of {', '.join(LOG_LEVELS)}")
        return level


def load_yaml(file_path: Path) -> dict[str, Any]:
    """Load a YAML file, returning empty dict if not found."""
    if not file_path.exists():
        return {}
    with open(file_path) as f:
        return yaml.safe_load(f) or {}


def interpolate_env_vars(value: str) -> str:
    """Replace ${VAR} patterns with environment variable values."""

    def replace(match: re.Match[str]) -> str:
        var_name = match.group(1)
        return os.environ.get(var_name, "")

    return re.sub(r"\$\{([^}]+)\}", replace, value)


def load_settings(config_path: Path | str | None = None, cwd: Path | str | None = None) -> Settings:
    """Load settings from ``config_path`` or ``dqdcorr.yaml`` in ``cwd``.

    An explicit ``config_path`` must exist. ``DQDCORR_WORKERS`` overrides the
    file's ``workers``.

    Raises:
        InvalidParameterError: missing explicit file, malformed YAML, or an
            invalid setting.
    """
    if config_path is not None:
        path = Path(config_path)
        if not path.exists():
            raise InvalidParameterError(f"Config file not found: {path}")
    else:
        path = Path(cwd or Path.cwd()) / SETTINGS_FILE

    try:
        data = load_yaml(path)
    except yaml.YAMLError as e:
        raise InvalidParameterError(f"Malformed config file {path}: {e}") from e
    if not isinstance(data, dict):
        raise InvalidParameterError(f"Config file {path} must contain a mapping")

    # Interpolate env vars in string values
    data = {k: interpolate_env_vars(v) if isinstance(v, str) else v for k, v in data.items()}

    try:
        settings = Settings(**data)
    except ValidationError as e:
        raise InvalidParameterError(f"Invalid settings in {path}: {e}") from e

    env_workers = os.environ.get(WORKERS_ENV)
    if env_workers:
        try:
            settings = Settings(**{**data, "workers": env_workers})
        except ValidationError as e:
            raise InvalidParameterError(f"Invalid {WORKERS_ENV}={env_workers!r}: {e}") from e

    if data:
        logger.debug(f"Loaded settings from {path}: {settings!r}")
    return settings


def resolve_workers(explicit: int | None, settings: Settings | None = None) -> int:
    """Worker count: explicit flag, then settings/env, then ``os.cpu_count()``."""
    if explicit is not None:
        if explicit < 1:
            raise InvalidParameterError(f"workers must be >= 1, got {explicit}")
        return explicit
    if settings is None:
        settings = load_settings()
    if settings.workers is not None:
        return settings.workers
    return os.cpu_count() or 1
