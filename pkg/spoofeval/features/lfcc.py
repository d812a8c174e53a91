"""Linear frequency cepstral coefficients."""

import numpy as np
from scipy import fft, signal

from spoofeval.config import LOG_FLOOR
from spoofeval.data.audio import AudioBuffer
from spoofeval.exceptions import InputTooShortError
from spoofeval.features.base import FeatureMatrix, LfccConfig
from spoofeval.features.deltas import stack_deltas
from spoofeval.logging_config import get_logger

logger = get_logger("features")


def filter_centres(n_filters: int, sample_rate: int) -> np.ndarray:
    return np.linspace(0.0, sample_rate / 2.0, n_filters + 2)[1:-1]


def linear_filterbank(n_filters: int, fft_size: int, sample_rate: int) -> np.ndarray:
    """Triangular filters, n_filters x (fft_size // 2 + 1).

    Filter ``j`` rises from edge ``j`` to edge ``j + 1`` and falls to edge
    ``j + 2`` of ``linspace(0, fs / 2, n_filters + 2)``.
    """
    edges = np.linspace(0.0, sample_rate / 2.0, n_filters + 2)
    bin_freqs = np.arange(fft_size // 2 + 1) * sample_rate / fft_size
    centre = filter_centres(n_filters, sample_rate)[:, None]
    lo, hi = edges[:-2, None], edges[2:, None]
    rising = (bin_freqs - lo) / (centre - lo)
    falling = (hi - bin_freqs) / (hi - centre)
    return np.maximum(0.0, np.minimum(rising, falling))


def frame_signal(x: np.ndarray, length: int, shift: int) -> np.ndarray:
    """Non-padded frames, ``1 + (len - length) // shift`` of them."""
    n_frames = 1 + (x.size - length) // shift
    starts = np.arange(n_frames)[:, None] * shift
    return x[starts + np.arange(length)[None, :]]


def log_filterbank_energies(audio: AudioBuffer, cfg: LfccConfig) -> np.ndarray:
    """Log filterbank energies, frames x n_filters.

    Raises:
        InputTooShortError: audio shorter than one frame
    """
    fs = audio.sample_rate
    length, shift = cfg.frame_samples(fs)
    if len(audio) < length:
        raise InputTooShortError(
            f"input too short: {len(audio)} samples, one LFCC frame needs {length}"
        )
    frames = frame_signal(audio.samples, length, shift)
    frames = frames * signal.windows.hamming(length, sym=True)
    power = np.abs(fft.rfft(frames, n=cfg.fft_size, axis=1)) ** 2
    energies = power @ linear_filterbank(cfg.n_filters, cfg.fft_size, fs).T
    return np.log(np.maximum(energies, LOG_FLOOR))


def lfcc(audio: AudioBuffer, cfg: LfccConfig = LfccConfig()) -> FeatureMatrix:
    """LFCC features with optional delta and acceleration blocks."""
    log_energies = log_filterbank_energies(audio, cfg)
    statics = fft.dct(log_energies, type=2, norm="ortho", axis=1)[:, : cfg.n_cepstral]
    values = stack_deltas(statics, cfg.delta_window) if cfg.use_deltas else statics
    logger.debug(
        f"Extracted LFCC {values.shape[0]}x{values.shape[1]}",
        extra={"frames": values.shape[0], "dims": values.shape[1]},
    )
    return FeatureMatrix(values)
