"""Shoebox rooms and image-source impulse responses.

Images of a source at ``s`` in a room of size ``L`` sit at
``(1 - 2q) * s + 2 n L`` per axis with ``q`` in {0, 1} and integer ``n``;
such an image has met ``|n - q| + |n|`` walls on that axis. Each contributes
``r ** reflections / (4 pi d)`` at delay ``d / c``, rendered as an 81-tap
Hann-windowed sinc, so every arrival is shifted by ``SINC_HALF_WIDTH``
samples.
"""

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence, Tuple

import numpy as np

from spoofeval.config import (
    MAX_REFLECTION_ORDER,
    MIN_SOURCE_DISTANCE,
    OMITTED_ENERGY_DB,
    SAMPLE_RATE,
    SINC_HALF_WIDTH,
    SPEED_OF_SOUND,
)
from spoofeval.exceptions import SimulationError
from spoofeval.logging_config import get_logger

logger = get_logger("simulation")

Position = Tuple[float, float, float]


@dataclass(frozen=True)
class RoomSpec:
    dims: Position
    t60: float
    speed_of_sound: float = SPEED_OF_SOUND

    def __post_init__(self):
        dims = tuple(float(d) for d in self.dims)
        if len(dims) != 3 or any(d <= 0 for d in dims):
            raise ValueError(f"room dims must be three positive lengths, got {dims}")
        if not self.t60 > 0:
            raise ValueError(f"t60 must be positive, got {self.t60}")
        object.__setattr__(self, "dims", dims)

    @property
    def volume(self) -> float:
        length, width, height = self.dims
        return length * width * height

    @property
    def surface(self) -> float:
        length, width, height = self.dims
        return 2.0 * (length * width + length * height + width * height)

    @property
    def reflection_coefficient(self) -> float:
        """Uniform wall pressure reflection coefficient from Eyring's formula."""
        exponent = (
            24.0 * np.log(10.0) * self.volume
            / (self.speed_of_sound * self.surface * self.t60)
        )
        return float(np.sqrt(np.exp(-exponent)))

    def contains(self, point: Sequence[float], clearance: float = 0.0) -> bool:
        p = np.asarray(point, dtype=float)
        upper = np.array(self.dims) - clearance
        return bool(np.all(p >= clearance) and np.all(p <= upper))


def auto_max_order(reflection: float) -> int:
    """Smallest order whose omitted image energy falls below OMITTED_ENERGY_DB.

    Shell energy decays roughly as ``r ** (2 * order)``, capped at
    MAX_REFLECTION_ORDER.
    """
    if reflection <= 0.0:
        return 0
    if reflection >= 1.0:
        return MAX_REFLECTION_ORDER
    needed = (OMITTED_ENERGY_DB / 10.0) * np.log(10.0) / (2.0 * np.log(reflection))
    return int(min(max(np.ceil(needed) - 1, 0), MAX_REFLECTION_ORDER))


def image_sources(
    room: RoomSpec, source: Sequence[float], max_order: int
) -> Tuple[np.ndarray, np.ndarray]:
    """Image positions (n x 3) and reflection counts with order <= max_order."""
    dims = np.array(room.dims)
    src = np.asarray(source, dtype=float)
    span = np.arange(-max_order, max_order + 1)
    n = np.array(list(itertools.product(span, repeat=3)), dtype=float)
    q = np.array(list(itertools.product((0, 1), repeat=3)), dtype=float)
    n = np.repeat(n, len(q), axis=0)
    q = np.tile(q, (len(span) ** 3, 1))
    counts = (np.abs(n - q) + np.abs(n)).sum(axis=1).astype(int)
    keep = counts <= max_order
    positions = (1.0 - 2.0 * q[keep]) * src + 2.0 * n[keep] * dims
    return positions, counts[keep]


def image_arrivals(
    room: RoomSpec,
    source: Sequence[float],
    mic: Sequence[float],
    max_order: int,
    reflection: float,
) -> Tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Distances, gains and reflection counts of the audible images."""
    positions, counts = image_sources(room, source, max_order)
    distances = np.linalg.norm(positions - np.asarray(mic, dtype=float), axis=1)
    with np.errstate(divide="ignore"):
        gains = np.where(counts == 0, 1.0, reflection**counts) / (
            4.0 * np.pi * distances
        )
    audible = gains != 0.0
    return distances[audible], gains[audible], counts[audible]


def sinc_taps(fraction: np.ndarray) -> np.ndarray:
    """Windowed-sinc taps at offsets -W..W for each fractional delay."""
    offsets = np.arange(-SINC_HALF_WIDTH, SINC_HALF_WIDTH + 1)
    x = offsets[None, :] - np.asarray(fraction, dtype=float)[:, None]
    window = 0.5 * (1.0 + np.cos(np.pi * x / (SINC_HALF_WIDTH + 1)))
    return window * np.sinc(x)


def rir_image_method(
    room: RoomSpec,
    source: Sequence[float],
    mic: Sequence[float],
    max_order: Optional[int] = None,
    sample_rate: int = SAMPLE_RATE,
    reflection: Optional[float] = None,
) -> np.ndarray:
    """Room impulse response from ``source`` to ``mic``.

    ``max_order=None`` picks the order automatically; ``reflection``
    overrides the Eyring coefficient.

    Raises:
        SimulationError: positions outside the room or closer than
            MIN_SOURCE_DISTANCE
    """
    for name, p in (("source", source), ("mic", mic)):
        if not room.contains(p):
            raise SimulationError(f"{name} position {tuple(p)} lies outside the room")
    direct = float(np.linalg.norm(np.asarray(source, float) - np.asarray(mic, float)))
    if direct < MIN_SOURCE_DISTANCE:
        raise SimulationError(
            f"source too near mic: {direct:.3f} m < {MIN_SOURCE_DISTANCE} m"
        )
    r = room.reflection_coefficient if reflection is None else float(reflection)
    if max_order is None:
        max_order = auto_max_order(r)
    if max_order < 0:
        raise ValueError(f"max_order must be non-negative, got {max_order}")

    distances, gains, _ = image_arrivals(room, source, mic, max_order, r)
    delays = distances / room.speed_of_sound * sample_rate
    whole = np.floor(delays).astype(int)
    taps = sinc_taps(delays - whole) * gains[:, None]

    length = int(whole.max()) + 2 * SINC_HALF_WIDTH + 1
    rir = np.zeros(length)
    index = whole[:, None] + np.arange(2 * SINC_HALF_WIDTH + 1)[None, :]
    np.add.at(rir, index, taps)
    logger.debug(
        f"Rendered RIR from {len(gains)} images (order {max_order})",
        extra={"images": int(len(gains)), "max_order": max_order, "reflection": r},
    )
    return rir


def schroeder_t60(rir: np.ndarray, sample_rate: int = SAMPLE_RATE) -> float:
    """T60 from a line fit to the Schroeder decay between -5 and -35 dB."""
    energy = np.cumsum(np.asarray(rir, dtype=float)[::-1] ** 2)[::-1]
    if energy[0] <= 0:
        raise SimulationError("cannot estimate T60 of a silent response")
    with np.errstate(divide="ignore"):
        decay = 10.0 * np.log10(energy / energy[0])
    fit = np.flatnonzero((decay <= -5.0) & (decay >= -35.0))
    if fit.size < 2:
        raise SimulationError("response decays too little for a -5..-35 dB fit")
    slope, _ = np.polyfit(fit / sample_rate, decay[fit], 1)
    return float(-60.0 / slope)
