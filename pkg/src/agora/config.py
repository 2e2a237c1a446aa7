"""TOML configuration with environment-variable overrides.

Every key has a default; unknown keys or sections are rejected so typos fail
loudly. An environment variable ``AGORA_<SECTION>_<KEY>`` overrides the file
value (e.g. ``AGORA_COLLECT_PAGE_SIZE=50``).
"""

from __future__ import annotations

import os
from dataclasses import dataclass, field, fields
from pathlib import Path
from typing import Any, Mapping

try:
    import tomllib
except ModuleNotFoundError:  # Python 3.10
    import tomli as tomllib

from .errors import ConfigError


@dataclass
class StoreConfig:
    path: str = "./agora-store"


@dataclass
class ApiConfig:
    base_url: str = "https://api.twitter.com"
    token_env: str = "AGORA_BEARER_TOKEN"


@dataclass
class CollectConfig:
    page_size: int = 100
    max_retries: int = 5


@dataclass
class PolarizeConfig:
    k_top_fraction: float = 0.05
    walks: int = 100_000


@dataclass
class LayoutConfig:
    width: float = 1000.0
    height: float = 1000.0
    iterations: int = 50
    force_constant: float = 1.0
    seed: int = 0
    use_weights: bool = False


@dataclass
class ShareConfig:
    listen_addr: str = "127.0.0.1:8745"
    token_env: str = "AGORA_SHARE_TOKEN"
    data_dir: str = "./agora-shared"
    viewer_dist: str = ""  # built viewer assets; empty = packaged default


@dataclass
class AppConfig:
    store: StoreConfig = field(default_factory=StoreConfig)
    api: ApiConfig = field(default_factory=ApiConfig)
    collect: CollectConfig = field(default_factory=CollectConfig)
    polarize: PolarizeConfig = field(default_factory=PolarizeConfig)
    layout: LayoutConfig = field(default_factory=LayoutConfig)
    share: ShareConfig = field(default_factory=ShareConfig)


def _coerce(value: Any, target_type: type, where: str) -> Any:
    try:
        if target_type is bool:
            if isinstance(value, bool):
                return value
            if isinstance(value, str):
                if value.lower() in ("1", "true", "yes", "on"):
                    return True
                if value.lower() in ("0", "false", "no", "off"):
                    return False
            raise ValueError(f"not a boolean: {value!r}")
        if target_type is int:
            if isinstance(value, bool):
                raise ValueError("boolean where integer expected")
            return int(value)
        if target_type is float:
            return float(value)
        return str(value)
    except (TypeError, ValueError) as err:
        raise ConfigError(f"bad value for {where}: {err}") from err


def load_config(
    path: str | Path | None = None, env: Mapping[str, str] | None = None
) -> AppConfig:
    """Build the configuration from defaults, an optional file, and env overrides."""
    env = os.environ if env is None else env
    config = AppConfig()
    data: dict[str, Any] = {}
    if path is not None:
        path = Path(path)
        if not path.exists():
            raise ConfigError(f"config file not found: {path}")
        try:
            data = tomllib.loads(path.read_text(encoding="utf-8"))
        except tomllib.TOMLDecodeError as err:
            raise ConfigError(f"invalid TOML in {path}: {err}") from err

    section_fields = {f.name: f for f in fields(config)}
    for section_name, section_data in data.items():
        if section_name not in section_fields:
            raise ConfigError(f"unknown config section [{section_name}]")
        if not isinstance(section_data, dict):
            raise ConfigError(f"[{section_name}] must be a table")
        section = getattr(config, section_name)
        known = {f.name: f.type for f in fields(section)}
        for key, value in section_data.items():
            if key not in known:
                raise ConfigError(f"unknown config key {section_name}.{key}")
            current = getattr(section, key)
            setattr(
                section, key, _coerce(value, type(current), f"{section_name}.{key}")
            )

    for section_name, section_field in section_fields.items():
        section = getattr(config, section_name)
        for f in fields(section):
            env_key = f"AGORA_{section_name.upper()}_{f.name.upper()}"
            if env_key in env:
                current = getattr(section, f.name)
                setattr(section, f.name, _coerce(env[env_key], type(current), env_key))
    return config
