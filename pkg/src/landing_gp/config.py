"""Flat key=value configuration files, labeled seed derivation and run digests."""

from __future__ import annotations

import hashlib
import logging
from collections.abc import Mapping
from pathlib import Path

from dotenv import dotenv_values

logger = logging.getLogger(__name__)


class ConfigError(ValueError):
    """Invalid configuration value or file."""


def load_config_file(path: str | Path) -> dict[str, str]:
    """
    Read a flat ``key=value`` config file (dotenv syntax, ``#`` comments).

    Keys are the field names of the config dataclasses (GeneratorConfig, OptimizerConfig,
    ForestConfig); each dataclass picks the keys it knows about via ``from_mapping``.
    """
    path = Path(path)
    if not path.is_file():
        raise ConfigError(f"config file {path} does not exist")
    values = dotenv_values(path)
    result: dict[str, str] = {}
    for key, value in values.items():
        if value is None:
            raise ConfigError(f"config key {key!r} in {path} has no value")
        result[key.strip()] = value.strip()
    logger.info(f"Loaded {len(result)} config keys from {path}")
    return result


def parse_float(mapping: Mapping[str, str], key: str, default: float) -> float:
    if key not in mapping:
        return default
    try:
        return float(mapping[key])
    except ValueError as exc:
        raise ConfigError(f"{key}={mapping[key]!r} is not a number") from exc


def parse_int(mapping: Mapping[str, str], key: str, default: int) -> int:
    if key not in mapping:
        return default
    try:
        return int(mapping[key])
    except ValueError as exc:
        raise ConfigError(f"{key}={mapping[key]!r} is not an integer") from exc


def parse_range(mapping: Mapping[str, str], key: str, default: tuple[float, float]) -> tuple[float, float]:
    """Ranges are written ``low,high``."""
    if key not in mapping:
        return default
    parts = [p.strip() for p in mapping[key].split(",")]
    if len(parts) != 2:
        raise ConfigError(f"{key}={mapping[key]!r} must be written as low,high")
    try:
        return float(parts[0]), float(parts[1])
    except ValueError as exc:
        raise ConfigError(f"{key}={mapping[key]!r} is not a numeric range") from exc


def parse_bool(mapping: Mapping[str, str], key: str, default: bool) -> bool:
    if key not in mapping:
        return default
    value = mapping[key].lower()
    if value in ("1", "true", "yes", "on"):
        return True
    if value in ("0", "false", "no", "off"):
        return False
    raise ConfigError(f"{key}={mapping[key]!r} is not a boolean")


def derive_seed(seed: int, *labels: object) -> int:
    """
    Derive an independent 64-bit seed from the root seed and a label path.

    ``derive_seed(42, "hyperfit", 3)`` always gives the same value, and different label
    paths give unrelated streams, so every random consumer hangs off one ``--seed``.
    """
    text = ":".join([str(seed), *(str(label) for label in labels)])
    return int.from_bytes(hashlib.sha256(text.encode()).digest()[:8], "little")


def digest_text(text: str) -> str:
    return hashlib.sha256(text.encode()).hexdigest()


def digest_mapping(mapping: Mapping[str, object]) -> str:
    """Order-independent digest of a flat configuration."""
    return digest_text("\n".join(f"{key}={mapping[key]}" for key in sorted(mapping)))
