"""Physical-access category labels and the category range table."""

import copy
import itertools
from dataclasses import asdict, dataclass
from importlib import resources
from pathlib import Path
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import yaml

from spoofeval.data.protocol import TrialRecord
from spoofeval.exceptions import ConfigurationError, SimulationError

ACOUSTIC_LEVELS = ("a", "b", "c")
REPLAY_LEVELS = ("A", "B", "C")

Range = Tuple[float, float]

# tables whose ranges must not decrease from level to level
_ORDERED_TABLES = {
    "room_size": ACOUSTIC_LEVELS,
    "reverberation": ACOUSTIC_LEVELS,
    "talker_to_mic": ACOUSTIC_LEVELS,
    "attacker_to_talker": REPLAY_LEVELS,
}
_TABLE_KEYS = set(_ORDERED_TABLES) | {
    "aspect_ratio",
    "room_height",
    "device_quality",
    "version",
}


@dataclass(frozen=True)
class PaCategoryLabel:
    """Acoustic triple plus, for replay trials, the replay pair."""

    room_size: str
    reverberation: str
    talker_to_mic: str
    attacker_to_talker: Optional[str] = None
    device_quality: Optional[str] = None

    def __post_init__(self):
        for name in ("room_size", "reverberation", "talker_to_mic"):
            if getattr(self, name) not in ACOUSTIC_LEVELS:
                raise SimulationError(
                    f"invalid {name} category {getattr(self, name)!r}"
                )
        replay = (self.attacker_to_talker, self.device_quality)
        if replay != (None, None) and not all(r in REPLAY_LEVELS for r in replay):
            raise SimulationError(f"invalid replay category {replay!r}")

    @property
    def acoustic(self) -> str:
        return f"{self.room_size}{self.reverberation}{self.talker_to_mic}"

    @property
    def replay(self) -> Optional[str]:
        if self.attacker_to_talker is None:
            return None
        return f"{self.attacker_to_talker}{self.device_quality}"

    @property
    def is_replay(self) -> bool:
        return self.attacker_to_talker is not None

    @classmethod
    def parse(cls, acoustic: str, replay: Optional[str] = None) -> "PaCategoryLabel":
        """Build from tokens such as ``"abc"`` and ``"BA"``."""
        if len(acoustic) != 3 or (replay is not None and len(replay) != 2):
            raise SimulationError(f"malformed category '{acoustic}' / '{replay}'")
        if replay is None:
            return cls(*acoustic)
        return cls(*acoustic, *replay)

    def __str__(self) -> str:
        if self.replay is None:
            return self.acoustic
        return f"{self.acoustic}:{self.replay}"


def enumerate_categories() -> List[PaCategoryLabel]:
    """Every acoustic triple combined with every replay pair."""
    return [
        PaCategoryLabel(*acoustic, *replay)
        for acoustic in itertools.product(ACOUSTIC_LEVELS, repeat=3)
        for replay in itertools.product(REPLAY_LEVELS, repeat=2)
    ]


def category_for_trial(trial: TrialRecord) -> PaCategoryLabel:
    """Acoustic triple from the system column, replay pair from the attack."""
    replay = None if trial.is_bonafide else trial.attack_label
    try:
        return PaCategoryLabel.parse(trial.system_id, replay)
    except SimulationError as e:
        raise SimulationError(f"trial '{trial.trial_id}': {e}") from e


@dataclass(frozen=True)
class DeviceRange:
    low: Range
    high: Range
    drive: Range


@dataclass(frozen=True)
class CategoryTable:
    room_size: Dict[str, Range]
    aspect_ratio: Range
    room_height: Range
    reverberation: Dict[str, Range]
    talker_to_mic: Dict[str, Range]
    attacker_to_talker: Dict[str, Range]
    device_quality: Dict[str, DeviceRange]

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)

    @classmethod
    def from_mapping(cls, mapping: Mapping[str, Any]) -> "CategoryTable":
        """Validate a parsed category mapping.

        Raises:
            ConfigurationError: unknown key, missing level, bad range or
                a violated ordering between levels
        """
        for key in mapping:
            if key not in _TABLE_KEYS:
                raise ConfigurationError(f"unknown config key 'categories.{key}'")
        try:
            tables = {
                name: _level_table(mapping[name], levels, name)
                for name, levels in _ORDERED_TABLES.items()
            }
            devices = {
                level: _device_range(mapping["device_quality"][level], level)
                for level in REPLAY_LEVELS
            }
            aspect = _range(mapping["aspect_ratio"], "aspect_ratio")
            height = _range(mapping["room_height"], "room_height")
        except KeyError as e:
            raise ConfigurationError(f"category table is missing {e}") from e
        if aspect[0] < 1.0:
            raise ConfigurationError("categories.aspect_ratio must be at least 1")

        for name, levels in _ORDERED_TABLES.items():
            _check_increasing([tables[name][lv] for lv in levels], name)
        _check_devices(devices)
        return cls(
            aspect_ratio=aspect,
            room_height=height,
            device_quality=devices,
            **tables,
        )


def _range(value: Any, name: str) -> Range:
    if isinstance(value, (int, float)):
        lo = hi = float(value)
    elif isinstance(value, (list, tuple)) and len(value) == 2:
        lo, hi = float(value[0]), float(value[1])
    else:
        raise ConfigurationError(
            f"categories.{name} must be a number or [low, high], got {value!r}"
        )
    if lo > hi or lo < 0:
        raise ConfigurationError(f"categories.{name} has invalid range {value!r}")
    return lo, hi


def _level_table(body: Mapping[str, Any], levels, name: str) -> Dict[str, Range]:
    unknown = set(body) - set(levels)
    if unknown:
        raise ConfigurationError(
            f"unknown config key 'categories.{name}.{sorted(unknown)[0]}'"
        )
    table = {lv: _range(body[lv], f"{name}.{lv}") for lv in levels}
    for lv, (lo, _) in table.items():
        if lo <= 0:
            raise ConfigurationError(f"categories.{name}.{lv} must be positive")
    return table


def _device_range(body: Mapping[str, Any], level: str) -> DeviceRange:
    unknown = set(body) - {"low", "high", "drive"}
    if unknown:
        raise ConfigurationError(
            f"unknown config key 'categories.device_quality.{level}."
            f"{sorted(unknown)[0]}'"
        )
    device = DeviceRange(
        low=_range(body["low"], f"device_quality.{level}.low"),
        high=_range(body["high"], f"device_quality.{level}.high"),
        drive=_range(body["drive"], f"device_quality.{level}.drive"),
    )
    if not device.low[1] < device.high[0]:
        raise ConfigurationError(
            f"categories.device_quality.{level}: low edge must stay below high edge"
        )
    return device


def _check_increasing(ranges: List[Range], name: str) -> None:
    for prev, cur in zip(ranges, ranges[1:]):
        if cur[0] < prev[0] or cur[1] < prev[1]:
            raise ConfigurationError(
                f"categories.{name} ranges must not decrease across levels"
            )


def _check_devices(devices: Dict[str, DeviceRange]) -> None:
    """Better quality means a wider passband and a lower drive."""
    for better, worse in zip(REPLAY_LEVELS, REPLAY_LEVELS[1:]):
        b, w = devices[better], devices[worse]
        if not (b.low[1] <= w.low[0] and b.high[0] >= w.high[1]):
            raise ConfigurationError(
                f"device quality {better} passband must contain that of {worse}"
            )
        if not b.drive[1] <= w.drive[0]:
            raise ConfigurationError(
                f"device quality {better} drive must not exceed that of {worse}"
            )


def _merge(base: Dict[str, Any], override: Mapping[str, Any]) -> Dict[str, Any]:
    out = copy.deepcopy(base)
    for key, value in override.items():
        if isinstance(value, Mapping) and isinstance(out.get(key), dict):
            out[key] = _merge(out[key], value)
        else:
            out[key] = copy.deepcopy(value)
    return out


def default_category_mapping() -> Dict[str, Any]:
    text = (
        resources.files("spoofeval.simulation")
        .joinpath("default_categories.yaml")
        .read_text(encoding="utf-8")
    )
    return yaml.safe_load(text)


def load_category_table(
    path: Union[str, Path, None] = None,
    overrides: Optional[Mapping[str, Any]] = None,
) -> CategoryTable:
    """Default table, overridden by a YAML file and then by a mapping.

    Raises:
        ConfigurationError: unreadable file or invalid merged table
    """
    mapping = default_category_mapping()
    if path is not None:
        try:
            with open(path, "r", encoding="utf-8") as f:
                mapping = _merge(mapping, yaml.safe_load(f) or {})
        except (OSError, yaml.YAMLError) as e:
            raise ConfigurationError(f"cannot read category table '{path}': {e}") from e
    if overrides:
        mapping = _merge(mapping, overrides)
    return CategoryTable.from_mapping(mapping)
