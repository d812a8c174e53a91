"""Non-linear replay loudspeaker: band-limiting followed by soft clipping."""

from dataclasses import asdict, dataclass
from typing import Any, Dict, Optional

import numpy as np
from scipy import signal

from spoofeval.config import DEVICE_FILTER_ORDER
from spoofeval.data.audio import AudioBuffer

# drives below this are treated as the linear limit
LINEAR_DRIVE = 1e-6


@dataclass(frozen=True)
class ReplayDeviceSpec:
    quality: str
    low: float
    high: float
    nonlinearity_drive: float = 0.0

    def __post_init__(self):
        if not 0 <= self.low < self.high:
            raise ValueError(f"invalid passband ({self.low}, {self.high})")
        if self.nonlinearity_drive < 0:
            raise ValueError("nonlinearity_drive must be non-negative")

    @property
    def passband(self):
        return (self.low, self.high)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def passband_filter(low: float, high: float, sample_rate: int) -> Optional[np.ndarray]:
    """Butterworth SOS for the passband, or None for the full band."""
    nyquist = sample_rate / 2.0
    if high > nyquist:
        raise ValueError(f"passband edge {high} Hz above Nyquist {nyquist} Hz")
    has_low, has_high = low > 0, high < nyquist
    if has_low and has_high:
        return signal.butter(
            DEVICE_FILTER_ORDER,
            [low, high],
            btype="bandpass",
            fs=sample_rate,
            output="sos",
        )
    if has_low:
        return signal.butter(
            DEVICE_FILTER_ORDER, low, btype="highpass", fs=sample_rate, output="sos"
        )
    if has_high:
        return signal.butter(
            DEVICE_FILTER_ORDER, high, btype="lowpass", fs=sample_rate, output="sos"
        )
    return None


def soft_clip(x: np.ndarray, drive: float) -> np.ndarray:
    """``tanh(g x) / tanh(g)``; identity as ``g`` goes to 0."""
    if drive < LINEAR_DRIVE:
        return np.array(x, dtype=float)
    return np.tanh(drive * x) / np.tanh(drive)


def apply_replay_device(audio: AudioBuffer, device: ReplayDeviceSpec) -> AudioBuffer:
    sos = passband_filter(device.low, device.high, audio.sample_rate)
    x = audio.samples
    if sos is not None:
        padlen = min(3 * (2 * len(sos) + 1), x.size - 1)
        x = signal.sosfiltfilt(sos, x, padlen=padlen)
    return audio.with_samples(soft_clip(x, device.nonlinearity_drive))
