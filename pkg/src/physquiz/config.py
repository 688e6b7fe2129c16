"""Runtime settings with layered precedence.

Effective settings are assembled from four layers, strongest first:
command-line flags, ``PHYSQUIZ_*`` environment variables, a JSON config
file, and built-in defaults.  Every consumer receives a plain frozen
``Settings`` object; nothing reads the environment after load time.
"""

from __future__ import annotations

import json
import os
from dataclasses import dataclass, fields, replace
from fractions import Fraction
from pathlib import Path
from typing import Any, Mapping

ENV_PREFIX = "PHYSQUIZ_"


class ConfigError(Exception):
    pass


@dataclass(frozen=True)
class Settings:
    store: str = "fixture"  # "fixture" or "live"
    fixture: str = "bundled"  # snapshot path, or "bundled"
    api_url: str = "https://www.wikidata.org/w/api.php"
    cache_dir: str | None = None
    cache_ttl_seconds: int = 86400
    tolerance: Fraction = Fraction(1, 100)
    range_lo: int = 1
    range_hi: int = 10
    template_path: str | None = None
    heuristic_derivatives: bool = True
    session_ttl_seconds: int = 3600
    host: str = "127.0.0.1"
    port: int = 8000
    frontend_dir: str | None = None

    @property
    def value_range(self) -> tuple[int, int]:
        return (self.range_lo, self.range_hi)

    def validate(self) -> "Settings":
        if self.store not in ("fixture", "live"):
            raise ConfigError(f"store must be 'fixture' or 'live', not {self.store!r}")
        if not 1 <= self.range_lo <= self.range_hi:
            raise ConfigError(
                f"value range must satisfy 1 <= lo <= hi, got ({self.range_lo}, {self.range_hi})"
            )
        if self.tolerance < 0:
            raise ConfigError("tolerance must be non-negative")
        if self.session_ttl_seconds <= 0:
            raise ConfigError("session ttl must be positive")
        return self


_FIELD_NAMES = {f.name for f in fields(Settings)}

_TRUE_WORDS = frozenset({"1", "true", "yes", "on"})
_FALSE_WORDS = frozenset({"0", "false", "no", "off"})


def _coerce(name: str, raw: Any) -> Any:
    kind = Settings.__dataclass_fields__[name].type
    if raw is None:
        return None
    if "Fraction" in kind:
        # str round-trip keeps decimal literals exact (0.01 -> 1/100)
        return Fraction(str(raw))
    if kind.startswith("int"):
        return int(raw)
    if kind.startswith("bool"):
        if isinstance(raw, bool):
            return raw
        word = str(raw).strip().lower()
        if word in _TRUE_WORDS:
            return True
        if word in _FALSE_WORDS:
            return False
        raise ConfigError(f"{name}: cannot read {raw!r} as a boolean")
    return str(raw)


def _apply(base: Settings, layer: Mapping[str, Any]) -> Settings:
    updates = {}
    for name, raw in layer.items():
        if name not in _FIELD_NAMES:
            raise ConfigError(f"unknown setting {name!r}")
        if raw is None:
            continue
        try:
            updates[name] = _coerce(name, raw)
        except (ValueError, ZeroDivisionError) as err:
            raise ConfigError(f"{name}: {err}") from None
    return replace(base, **updates) if updates else base


def _read_config_file(path: Path) -> Mapping[str, Any]:
    try:
        raw = json.loads(path.read_text(encoding="utf-8"))
    except OSError as err:
        raise ConfigError(f"cannot read config file {path}: {err}") from None
    except json.JSONDecodeError as err:
        raise ConfigError(f"config file {path} is not valid JSON: {err}") from None
    if not isinstance(raw, dict):
        raise ConfigError(f"config file {path} must hold a JSON object")
    return raw


def _env_layer(env: Mapping[str, str]) -> Mapping[str, Any]:
    layer = {}
    for key, value in env.items():
        if not key.startswith(ENV_PREFIX) or key == ENV_PREFIX + "CONFIG":
            continue
        name = key[len(ENV_PREFIX) :].lower()
        if name in _FIELD_NAMES:
            layer[name] = value
    return layer


def load_settings(
    cli: Mapping[str, Any] | None = None,
    env: Mapping[str, str] | None = None,
    config_path: str | Path | None = None,
) -> Settings:
    """Assemble settings; precedence cli > env > config file > defaults.

    ``config_path`` defaults to the PHYSQUIZ_CONFIG environment variable;
    with neither present no file is read.
    """
    if env is None:
        env = os.environ
    settings = Settings()
    if config_path is None:
        config_path = env.get(ENV_PREFIX + "CONFIG")
    if config_path:
        settings = _apply(settings, _read_config_file(Path(config_path)))
    settings = _apply(settings, _env_layer(env))
    if cli:
        settings = _apply(settings, cli)
    return settings.validate()
