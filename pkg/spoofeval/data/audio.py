"""Audio buffers and 16-bit PCM mono WAV I/O."""

from dataclasses import dataclass
from pathlib import Path
from typing import Union

import numpy as np
import soundfile as sf

from spoofeval.exceptions import AudioError
from spoofeval.logging_config import get_logger

logger = get_logger("data")


@dataclass(frozen=True, eq=False)
class AudioBuffer:
    """Mono waveform with its sample rate.

    Samples are expected in [-1, 1] when written to disk; analysis code
    accepts any finite amplitude.
    """

    samples: np.ndarray
    sample_rate: int

    def __post_init__(self):
        samples = np.asarray(self.samples, dtype=float)
        if samples.ndim != 1:
            raise ValueError(f"audio must be mono, got shape {samples.shape}")
        if samples.size == 0:
            raise ValueError("audio must be non-empty")
        if not np.all(np.isfinite(samples)):
            raise ValueError("audio contains non-finite samples")
        if int(self.sample_rate) <= 0:
            raise ValueError(f"sample rate must be positive, got {self.sample_rate}")
        object.__setattr__(self, "samples", samples)
        object.__setattr__(self, "sample_rate", int(self.sample_rate))

    def __len__(self) -> int:
        return self.samples.size

    @property
    def duration(self) -> float:
        return self.samples.size / self.sample_rate

    def with_samples(self, samples: np.ndarray) -> "AudioBuffer":
        return AudioBuffer(samples=samples, sample_rate=self.sample_rate)


def read_wav(path: Union[str, Path]) -> AudioBuffer:
    """Read a mono WAV file as float samples in [-1, 1].

    Raises:
        AudioError: unreadable or unusable audio
    """
    try:
        samples, rate = sf.read(str(path), dtype="float64", always_2d=False)
    except (RuntimeError, sf.LibsndfileError) as e:
        raise AudioError(f"cannot read audio '{path}': {e}") from e
    if samples.ndim != 1:
        raise AudioError(f"audio '{path}' is not mono ({samples.shape[1]} ch)")
    try:
        return AudioBuffer(samples=samples, sample_rate=rate)
    except ValueError as e:
        raise AudioError(f"invalid audio '{path}': {e}") from e


def write_wav(path: Union[str, Path], audio: AudioBuffer) -> None:
    """Write 16-bit PCM mono WAV; samples outside [-1, 1] are clipped."""
    samples = audio.samples
    peak = float(np.max(np.abs(samples)))
    if peak > 1.0:
        logger.warning(
            f"Clipping audio with peak {peak:.3f} when writing {path}",
            extra={"path": str(path), "peak": peak},
        )
        samples = np.clip(samples, -1.0, 1.0)
    sf.write(str(path), samples, audio.sample_rate, subtype="PCM_16", format="WAV")
