"""Utility functions for configuration, logging, and common operations."""

import copy
import hashlib
import json
import logging
from pathlib import Path
from typing import Any, Dict, List, Optional

import yaml

from .exceptions import ConfigError

SCHEMA_VERSION = 1


def get_project_root() -> Path:
    """Get the project root directory."""
    return Path(__file__).parent.parent.parent


def _read_yaml(path: Path) -> Dict[str, Any]:
    """Read a YAML mapping, converting parser errors into ConfigError."""
    if not path.exists():
        raise FileNotFoundError(f"Configuration file not found: {path}")

    with open(path, "r", encoding="utf-8") as f:
        try:
            data = yaml.safe_load(f)
        except yaml.YAMLError as e:
            mark = getattr(e, "problem_mark", None)
            problem = getattr(e, "problem", None) or str(e)
            if mark is not None:
                raise ConfigError(f"{path}: {problem}", line=mark.line + 1, column=mark.column + 1) from e
            raise ConfigError(f"{path}: {problem}") from e

    if data is None:
        return {}
    if not isinstance(data, dict):
        raise ConfigError(f"{path}: top level must be a mapping, got {type(data).__name__}")
    return data


def deep_merge(base: Dict[str, Any], override: Dict[str, Any], path: str = "") -> Dict[str, Any]:
    """Merge ``override`` into a copy of ``base``, rejecting unknown keys.

    Args:
        base: Defaults; its key set is the schema
        override: User values
        path: Dotted prefix used in error messages

    Returns:
        Merged dictionary

    Raises:
        ConfigError: If ``override`` contains a key absent from ``base``
    """
    merged = copy.deepcopy(base)
    for key, value in override.items():
        dotted = f"{path}.{key}" if path else str(key)
        if key not in base:
            raise ConfigError(f"Unknown configuration key: {dotted}")
        if isinstance(base[key], dict) and base[key]:
            if not isinstance(value, dict):
                raise ConfigError(f"Configuration key {dotted} must be a mapping")
            merged[key] = deep_merge(base[key], value, dotted)
        else:
            merged[key] = copy.deepcopy(value)
    return merged


def load_config(
    config_path: Optional[str] = None,
    defaults_path: Optional[str] = None,
) -> Dict[str, Any]:
    """Load the run configuration merged over the packaged defaults.

    Args:
        config_path: Optional path to a user config file. If not provided,
                     the defaults are returned unchanged
        defaults_path: Optional path to the defaults file. If not provided,
                       uses config/config.yaml

    Returns:
        Configuration dictionary

    Raises:
        FileNotFoundError: If either file does not exist
        ConfigError: On YAML syntax errors, unknown keys or a schema mismatch
    """
    if defaults_path is None:
        defaults_path = get_project_root() / "config" / "config.yaml"
    defaults = _read_yaml(Path(defaults_path))

    if config_path is None:
        config = defaults
    else:
        config = deep_merge(defaults, _read_yaml(Path(config_path)))

    version = config.get("schema_version")
    if version != SCHEMA_VERSION:
        raise ConfigError(f"Unsupported schema_version {version!r}; expected {SCHEMA_VERSION}")
    return config


def config_hash(config: Dict[str, Any]) -> str:
    """Short SHA-256 digest of the canonical JSON form of a config."""
    canonical = json.dumps(config, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(canonical.encode("utf-8")).hexdigest()[:16]


def setup_logging(
    level: str = "INFO",
    log_format: Optional[str] = None,
    log_file: Optional[str] = None
) -> logging.Logger:
    """Set up logging configuration.

    Args:
        level: Logging level (DEBUG, INFO, WARNING, ERROR, CRITICAL)
        log_format: Optional custom log format
        log_file: Optional log file path

    Returns:
        Configured logger
    """
    if log_format is None:
        log_format = "%(asctime)s - %(name)s - %(levelname)s - %(message)s"

    logging.basicConfig(
        level=getattr(logging, level.upper()),
        format=log_format,
        handlers=[]
    )

    logger = logging.getLogger("src")
    logger.setLevel(getattr(logging, level.upper()))
    logger.handlers.clear()

    console_handler = logging.StreamHandler()
    console_handler.setFormatter(logging.Formatter(log_format))
    logger.addHandler(console_handler)

    if log_file:
        file_handler = logging.FileHandler(log_file)
        file_handler.setFormatter(logging.Formatter(log_format))
        logger.addHandler(file_handler)

    return logger


def format_bitstring(bits: int, n: int) -> str:
    """Render a basis index as a ket, qubit 0 leftmost.

    Examples:
        >>> format_bitstring(6, 4)
        '|0110>'
    """
    return "|" + format(bits, f"0{n}b") + ">"


def parse_bitstring(text: str) -> List[int]:
    """Parse an occupation string such as ``"0110"`` or ``"|0110>"``."""
    stripped = text.strip().strip("|<>")
    if not stripped or any(ch not in "01" for ch in stripped):
        raise ValueError(f"Invalid occupation string: {text!r}")
    return [int(ch) for ch in stripped]
