"""Flat key = value configuration files.

A config file pins paths and thresholds for reproducible benchmark runs;
command-line flags override config values, which override the defaults.
The ``SEVASR_CONFIG`` environment variable supplies a config path when the
``--config`` flag is absent.
"""

from __future__ import annotations

import os
from dataclasses import dataclass, fields
from pathlib import Path

from .alignment import DEFAULT_SPLIT_THRESHOLD
from .classifier import DEFAULT_LEX_THRESHOLD

ENV_VAR = "SEVASR_CONFIG"


class ConfigError(ValueError):
    """Raised for unreadable config files or out-of-range values."""


@dataclass
class Settings:
    corpus: str | None = None
    lexicon: str | None = None
    suffixes: str | None = None
    alignments: str | None = None
    suggestions: str | None = None
    log: str | None = None
    labels: str | None = None
    ui_dir: str | None = None
    split_threshold: float = DEFAULT_SPLIT_THRESHOLD
    lex_threshold: float = DEFAULT_LEX_THRESHOLD
    weight: float = 1.0
    alpha: float = 0.05
    port: int = 8765
    host: str = "127.0.0.1"

    def validate(self) -> None:
        if not 0.0 <= self.split_threshold <= 1.0:
            raise ConfigError("split_threshold must be in [0, 1]")
        if not 0.0 <= self.lex_threshold <= 1.0:
            raise ConfigError("lex_threshold must be in [0, 1]")
        if self.weight < 0:
            raise ConfigError("weight must be >= 0")
        if not 0.0 < self.alpha < 1.0:
            raise ConfigError("alpha must be in (0, 1)")
        if not 0 <= self.port <= 65535:
            raise ConfigError("port must be a valid TCP port")


_FLOAT_KEYS = {"split_threshold", "lex_threshold", "weight", "alpha"}
_INT_KEYS = {"port"}


def load_config_file(path: str | Path) -> dict[str, str]:
    """Parse ``key = value`` lines; blank lines and ``#`` comments skipped."""
    values: dict[str, str] = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, line in enumerate(fh, start=1):
            stripped = line.strip()
            if not stripped or stripped.startswith("#"):
                continue
            if "=" not in stripped:
                raise ConfigError(f"{path}:{lineno}: expected 'key = value'")
            key, _, value = stripped.partition("=")
            values[key.strip()] = value.strip()
    return values


def build_settings(config_path: str | None, **overrides) -> Settings:
    """Defaults, then config-file values, then non-None flag overrides."""
    path = config_path or os.environ.get(ENV_VAR)
    settings = Settings()
    known = {f.name for f in fields(Settings)}
    if path:
        for key, raw in load_config_file(path).items():
            if key not in known:
                raise ConfigError(f"unknown config key {key!r}")
            try:
                if key in _FLOAT_KEYS:
                    setattr(settings, key, float(raw))
                elif key in _INT_KEYS:
                    setattr(settings, key, int(raw))
                else:
                    setattr(settings, key, raw)
            except ValueError as exc:
                raise ConfigError(f"bad value for {key!r}: {raw!r}") from exc
    for key, value in overrides.items():
        if value is not None:
            setattr(settings, key, value)
    settings.validate()
    return settings
