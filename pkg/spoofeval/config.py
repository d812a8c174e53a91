"""Configuration management: named constants and presets, environment
variable loading and versioned YAML run-config files."""

import dataclasses
import hashlib
import json
import os
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Type, TypeVar, Union

import yaml

from spoofeval.exceptions import ConfigurationError

T = TypeVar("T")


def load_env_file():
    """Load environment variables from .env file if it exists."""
    env_file = Path(__file__).parent.parent / ".env"
    if env_file.exists():
        with open(env_file, "r") as f:
            for line in f:
                line = line.strip()
                if line and not line.startswith("#") and "=" in line:
                    key, value = line.split("=", 1)
                    if key not in os.environ:  # Don't override existing env vars
                        os.environ[key] = value


def get_env(name: str, default: Optional[str] = None) -> Optional[str]:
    """Get environment variable with optional default."""
    return os.environ.get(name, default)


# Load .env file on import
load_env_file()

# Core Configuration Constants
DEFAULT_OUT_DIR = "./spoofeval_runs"
"""str: Default directory for command outputs."""

ENV_OUT_DIR = "SPOOFEVAL_OUT_DIR"
"""str: Environment variable overriding the default output directory."""

ENV_JOBS = "SPOOFEVAL_JOBS"
"""str: Environment variable overriding the default worker count."""

DEFAULT_MAX_WORKERS = 4
"""int: Default number of parallel workers for per-item work."""

SAMPLE_RATE = 16000
"""int: Sample rate used throughout feature extraction and simulation."""

# Feature extraction
LOG_FLOOR = 1e-10
"""float: Floor applied to spectral energies before the logarithm."""

# t-DCF challenge defaults from the evaluation plan; validate before claiming
# official numbers
CHALLENGE_DEFAULT_COSTS = {
    "pi_tar": 0.9405,
    "pi_non": 0.0095,
    "pi_spoof": 0.05,
    "c_miss_cm": 1.0,
    "c_fa_cm": 10.0,
    "c_miss_asv": 1.0,
    "c_fa_asv": 10.0,
}

PRIOR_SUM_TOLERANCE = 1e-12

HIGH_PENALTY_BETA = 20.0
"""float: Attacks whose beta reaches this value are flagged in reports."""

MAX_MISSING_LISTED = 10
"""int: Number of missing trial ids quoted in join errors."""

# Reports
REPORT_SCHEMA_VERSION = 1
TDCF_DECIMALS = 4
EER_PERCENT_DECIMALS = 2
DEFAULT_TOP_N = 10

# GMM back-end
DEFAULT_GMM_COMPONENTS = 512
VARIANCE_FLOOR_FACTOR = 0.01
EMPTY_COMPONENT_MASS = 1e-8
INIT_SUBSAMPLE = 20000
# surplus k-means++ centres: jitter in units of the per-dimension std
INIT_JITTER = 1e-3
# absolute lower bound under the relative variance floor (constant dimensions)
MIN_VARIANCE = 1e-10
DEFAULT_BLOCK_SIZE = 4096

# PA simulation
PEAK_LEVEL = 0.95
SPEED_OF_SOUND = 343.0
MIN_SOURCE_DISTANCE = 0.05
WALL_CLEARANCE = 0.1
MAX_REFLECTION_ORDER = 30
OMITTED_ENERGY_DB = -60.0
SINC_HALF_WIDTH = 40
DEVICE_FILTER_ORDER = 6

# Run-config files
RUN_CONFIG_VERSION = 1
RUN_CONFIG_SECTIONS = ("cqcc", "lfcc", "gmm", "cost", "evaluation", "categories")


def load_run_config(path: Union[str, Path, None]) -> Dict[str, Dict[str, Any]]:
    """Load and validate a versioned YAML run configuration.

    Only section names and the version are checked here; keys inside a
    section are checked by the dataclass that consumes it.

    Raises:
        ConfigurationError: unreadable file, wrong version or unknown section
    """
    if path is None:
        return {}
    try:
        with open(path, "r", encoding="utf-8") as f:
            raw = yaml.safe_load(f) or {}
    except (OSError, yaml.YAMLError) as e:
        raise ConfigurationError(f"cannot read config '{path}': {e}") from e

    if not isinstance(raw, dict):
        raise ConfigurationError(f"config '{path}' must be a mapping")

    version = raw.pop("version", RUN_CONFIG_VERSION)
    if version != RUN_CONFIG_VERSION:
        raise ConfigurationError(
            f"config '{path}' has version {version}, expected {RUN_CONFIG_VERSION}"
        )

    sections: Dict[str, Dict[str, Any]] = {}
    for name, body in raw.items():
        if name not in RUN_CONFIG_SECTIONS:
            raise ConfigurationError(f"unknown config key '{name}' in '{path}'")
        if body is None:
            body = {}
        if not isinstance(body, dict):
            raise ConfigurationError(f"config section '{name}' must be a mapping")
        sections[name] = dict(body)
    return sections


def build_config(
    cls: Type[T], mapping: Optional[Mapping[str, Any]], section: str, **overrides
) -> T:
    """Instantiate a config dataclass from a section mapping.

    Values in ``overrides`` that are not None win over the mapping.

    Raises:
        ConfigurationError: on a key the dataclass does not define
    """
    known = {f.name for f in dataclasses.fields(cls)}
    values = dict(mapping or {})
    for key in values:
        if key not in known:
            raise ConfigurationError(f"unknown config key '{section}.{key}'")
    values.update({k: v for k, v in overrides.items() if v is not None})
    try:
        return cls(**values)
    except (TypeError, ValueError) as e:
        raise ConfigurationError(f"invalid '{section}' configuration: {e}") from e


def config_hash(mapping: Any) -> str:
    """Return the sha256 hex digest of a mapping's canonical JSON form."""
    if dataclasses.is_dataclass(mapping):
        mapping = dataclasses.asdict(mapping)
    payload = json.dumps(mapping, sort_keys=True, separators=(",", ":"), default=str)
    return hashlib.sha256(payload.encode("utf-8")).hexdigest()
