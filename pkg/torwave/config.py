"""
Environment-driven settings.

Values are read once per call to ``load_settings`` so tests can patch the
environment with ``monkeypatch.setenv``.
"""

import os
from dataclasses import dataclass

from .errors import ValidationError

ENV_WORKERS = "TORWAVE_WORKERS"
ENV_LOG_LEVEL = "TORWAVE_LOG_LEVEL"
ENV_CHUNK_SIZE = "TORWAVE_CHUNK_SIZE"


@dataclass(frozen=True)
class Settings:
    workers: int = 1
    log_level: str = "WARNING"
    chunk_size: int = 256


def _int_from_env(name: str, default: int) -> int:
    raw = os.environ.get(name)
    if raw is None or raw.strip() == "":
        return default
    try:
        value = int(raw)
    except ValueError:
        raise ValidationError(f"{name} must be an integer, got {raw!r}") from None
    if value < 1:
        raise ValidationError(f"{name} must be >= 1, got {value}")
    return value


def load_settings() -> Settings:
    """
    Build settings from the process environment.

    Returns:
        Settings with defaults for any variable that is unset
    """
    return Settings(
        workers=_int_from_env(ENV_WORKERS, 1),
        log_level=os.environ.get(ENV_LOG_LEVEL, "WARNING").upper(),
        chunk_size=_int_from_env(ENV_CHUNK_SIZE, 256),
    )
