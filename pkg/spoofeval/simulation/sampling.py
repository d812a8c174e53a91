"""Drawing concrete acoustic configurations from a category."""

import hashlib
from dataclasses import dataclass
from enum import Enum
from typing import Any, Dict, Optional, Tuple

import numpy as np

from spoofeval.config import (
    MIN_SOURCE_DISTANCE,
    SAMPLE_RATE,
    WALL_CLEARANCE,
    config_hash,
)
from spoofeval.exceptions import SimulationError
from spoofeval.simulation.categories import CategoryTable, PaCategoryLabel
from spoofeval.simulation.device import ReplayDeviceSpec
from spoofeval.simulation.room import Position, RoomSpec

MAX_PLACEMENT_TRIES = 10000


class SeedSpace(Enum):
    """Disjoint random streams for known (train/dev) and unknown (eval)
    acoustic conditions."""

    KNOWN = 0
    UNKNOWN = 1


@dataclass(frozen=True)
class PaConfig:
    category: PaCategoryLabel
    room: RoomSpec
    talker_pos: Position
    mic_pos: Position
    attacker_pos: Optional[Position]
    device: Optional[ReplayDeviceSpec]
    rng_seed: int
    seed_space: SeedSpace = SeedSpace.KNOWN

    def to_dict(self) -> Dict[str, Any]:
        return {
            "category": str(self.category),
            "room": {
                "dims": list(self.room.dims),
                "t60": self.room.t60,
                "speed_of_sound": self.room.speed_of_sound,
            },
            "talker_pos": list(self.talker_pos),
            "mic_pos": list(self.mic_pos),
            "attacker_pos": (
                None if self.attacker_pos is None else list(self.attacker_pos)
            ),
            "device": None if self.device is None else self.device.to_dict(),
            "rng_seed": self.rng_seed,
            "seed_space": self.seed_space.name,
        }

    @property
    def hash(self) -> str:
        """Hash of the concrete acoustic parameters (seed excluded)."""
        payload = self.to_dict()
        payload.pop("rng_seed")
        payload.pop("seed_space")
        return config_hash(payload)


def trial_seed(master_seed: int, trial_id: str) -> int:
    """Per-trial seed, independent of rendering order."""
    digest = hashlib.sha256(f"{master_seed}:{trial_id}".encode("utf-8")).digest()
    return int.from_bytes(digest[:8], "little")


def make_rng(seed: int, space: SeedSpace) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence([space.value, seed]))


def _uniform(rng: np.random.Generator, bounds: Tuple[float, float]) -> float:
    lo, hi = bounds
    return float(rng.uniform(lo, hi)) if hi > lo else float(lo)


def _inside(rng: np.random.Generator, dims: np.ndarray) -> np.ndarray:
    return rng.uniform(WALL_CLEARANCE, dims - WALL_CLEARANCE)


def _direction(rng: np.random.Generator) -> np.ndarray:
    while True:
        v = rng.standard_normal(3)
        norm = np.linalg.norm(v)
        if norm > 0:
            return v / norm


def _placed(room: RoomSpec, mic: np.ndarray, attacker: Optional[np.ndarray]) -> bool:
    if not room.contains(mic, WALL_CLEARANCE):
        return False
    if attacker is None:
        return True
    return (
        room.contains(attacker, WALL_CLEARANCE)
        and np.linalg.norm(attacker - mic) >= MIN_SOURCE_DISTANCE
    )


def sample_config(
    category: PaCategoryLabel,
    seed: int,
    table: CategoryTable,
    space: SeedSpace = SeedSpace.KNOWN,
    sample_rate: int = SAMPLE_RATE,
) -> PaConfig:
    """Concrete configuration for a category, deterministic in (category, seed,
    table, space).

    Draw order: floor area, aspect ratio, height, T60, talker-to-mic and
    attacker-to-talker distances, placement, device parameters.
    """
    rng = make_rng(seed, space)
    area = _uniform(rng, table.room_size[category.room_size])
    aspect = _uniform(rng, table.aspect_ratio)
    height = _uniform(rng, table.room_height)
    length = float(np.sqrt(area * aspect))
    room = RoomSpec(
        dims=(length, area / length, height),
        t60=_uniform(rng, table.reverberation[category.reverberation]),
    )
    dims = np.array(room.dims)

    mic_distance = _uniform(rng, table.talker_to_mic[category.talker_to_mic])
    attacker_distance = None
    if category.is_replay:
        attacker_distance = _uniform(
            rng, table.attacker_to_talker[category.attacker_to_talker]
        )

    # rejection sampling: redraw the whole placement until every point fits
    for _ in range(MAX_PLACEMENT_TRIES):
        talker = _inside(rng, dims)
        mic = talker + mic_distance * _direction(rng)
        attacker = None
        if attacker_distance is not None:
            attacker = talker + attacker_distance * _direction(rng)
        if _placed(room, mic, attacker):
            break
    else:
        raise SimulationError(f"category {category} does not fit room {room.dims}")

    device = None
    if category.is_replay:
        ranges = table.device_quality[category.device_quality]
        low = _uniform(rng, ranges.low)
        high = min(_uniform(rng, ranges.high), sample_rate / 2.0)
        device = ReplayDeviceSpec(
            quality=category.device_quality,
            low=low,
            high=high,
            nonlinearity_drive=_uniform(rng, ranges.drive),
        )

    return PaConfig(
        category=category,
        room=room,
        talker_pos=tuple(float(v) for v in talker),
        mic_pos=tuple(float(v) for v in mic),
        attacker_pos=None if attacker is None else tuple(float(v) for v in attacker),
        device=device,
        rng_seed=seed,
        seed_space=space,
    )
