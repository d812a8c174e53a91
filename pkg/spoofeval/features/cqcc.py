"""Constant-Q transform and constant Q cepstral coefficients.

Bin ``k`` has centre frequency ``f_k = f_min * 2**(k / B)`` and a symmetric
Hann window of ``N_k = round(Q * fs / f_k)`` samples, ``Q = 1 / (2**(1/B) - 1)``.
Frame ``j`` is centred on sample ``j * hop``; samples outside the signal are
zero.
"""

from typing import Tuple

import numpy as np
from scipy import fft, signal
from scipy.interpolate import CubicSpline

from spoofeval.config import LOG_FLOOR
from spoofeval.data.audio import AudioBuffer
from spoofeval.exceptions import ConfigurationError, InputTooShortError
from spoofeval.features.base import CqccConfig, FeatureMatrix
from spoofeval.features.deltas import stack_deltas
from spoofeval.logging_config import get_logger

logger = get_logger("features")


def quality_factor(bins_per_octave: int) -> float:
    return 1.0 / (2.0 ** (1.0 / bins_per_octave) - 1.0)


def cqt_frequencies(f_min: float, f_max: float, bins_per_octave: int) -> np.ndarray:
    """Geometric bin centres from ``f_min`` up to (excluding) ``f_max``."""
    n_bins = int(round(bins_per_octave * np.log2(f_max / f_min)))
    return f_min * 2.0 ** (np.arange(n_bins) / bins_per_octave)


def window_lengths(
    freqs: np.ndarray, sample_rate: int, bins_per_octave: int
) -> np.ndarray:
    q = quality_factor(bins_per_octave)
    return np.maximum(np.round(q * sample_rate / freqs).astype(int), 1)


def min_input_samples(cfg: CqccConfig, sample_rate: int) -> int:
    """Shortest input ``cqt`` accepts: the window length of the lowest bin.

    With the default range (``f_min = fs / 1024``, 96 bins per octave) this is
    about 8.8 s whatever the sample rate.
    """
    f_min, _ = cfg.frequency_range(sample_rate)
    return int(window_lengths(np.array([f_min]), sample_rate, cfg.bins_per_octave)[0])


def bin_kernel(freq: float, length: int, sample_rate: int) -> np.ndarray:
    """Analysis atom of one bin, normalised by the window sum.

    The phase is referenced to the window centre.
    """
    window = signal.windows.hann(length, sym=True) if length > 1 else np.ones(1)
    n = np.arange(length) - (length - 1) / 2.0
    return window * np.exp(2j * np.pi * freq * n / sample_rate) / window.sum()


def frame_count(n_samples: int, hop: int) -> int:
    return 1 + (n_samples - 1) // hop


def cqt(audio: AudioBuffer, cfg: CqccConfig) -> np.ndarray:
    """Complex constant-Q transform, bins x frames.

    Raises:
        InputTooShortError: audio shorter than the lowest bin's window
    """
    fs = audio.sample_rate
    f_min, f_max = cfg.frequency_range(fs)
    freqs = cqt_frequencies(f_min, f_max, cfg.bins_per_octave)
    if freqs.size == 0:
        raise ConfigurationError("cqcc frequency range holds no bins")
    lengths = window_lengths(freqs, fs, cfg.bins_per_octave)
    x = audio.samples
    needed = min_input_samples(cfg, fs)
    if x.size < needed:
        raise InputTooShortError(
            f"input too short: {x.size} samples, lowest CQT bin needs {needed} "
            f"({needed / fs:.2f} s; raise cqcc.f_min for shorter input)"
        )

    n_frames = frame_count(x.size, cfg.hop)
    out = np.empty((freqs.size, n_frames), dtype=complex)
    for k, (freq, length) in enumerate(zip(freqs, lengths)):
        atom = bin_kernel(freq, int(length), fs)
        left = int(length) // 2
        padded = np.pad(x, (left, int(length)))
        # correlate conjugates its second argument: sum_n x[t + n] * conj(atom[n])
        corr = signal.correlate(padded, atom, mode="valid", method="fft")
        out[k] = corr[: (n_frames - 1) * cfg.hop + 1 : cfg.hop]
    return out


def log_power(spectrum: np.ndarray) -> np.ndarray:
    return np.log(np.maximum(np.abs(spectrum) ** 2, LOG_FLOOR))


def linear_axis(
    f_min: float, f_max: float, freqs: np.ndarray, points_per_octave: int
) -> np.ndarray:
    """Uniformly spaced resampling grid spanning the geometric bin centres."""
    n_points = max(int(round(points_per_octave * np.log2(f_max / f_min))), 2)
    return np.linspace(freqs[0], freqs[-1], n_points)


def cepstra(log_spectrum: np.ndarray, n_cepstral: int, include_c0: bool) -> np.ndarray:
    """Orthonormal DCT-II over the frequency axis (axis 0), frames x coeffs out."""
    coeffs = fft.dct(log_spectrum, type=2, norm="ortho", axis=0)
    start = 0 if include_c0 else 1
    if start + n_cepstral > coeffs.shape[0]:
        raise ConfigurationError(
            f"{n_cepstral} cepstra requested from {coeffs.shape[0]} spectral points"
        )
    return coeffs[start : start + n_cepstral].T


def cqcc_statics(audio: AudioBuffer, cfg: CqccConfig) -> Tuple[np.ndarray, np.ndarray]:
    """Static CQCCs (frames x n_cepstral) and the linear frequency grid."""
    f_min, f_max = cfg.frequency_range(audio.sample_rate)
    freqs = cqt_frequencies(f_min, f_max, cfg.bins_per_octave)
    if freqs.size < 2:
        raise ConfigurationError("cqcc needs at least two CQT bins")
    spectrum = log_power(cqt(audio, cfg))
    grid = linear_axis(f_min, f_max, freqs, cfg.resample_points_per_octave)
    resampled = CubicSpline(freqs, spectrum, axis=0)(grid)
    return cepstra(resampled, cfg.n_cepstral, cfg.include_c0), grid


def cqcc(audio: AudioBuffer, cfg: CqccConfig = CqccConfig()) -> FeatureMatrix:
    """CQCC features with optional delta and acceleration blocks."""
    statics, _ = cqcc_statics(audio, cfg)
    values = stack_deltas(statics, cfg.delta_window) if cfg.use_deltas else statics
    logger.debug(
        f"Extracted CQCC {values.shape[0]}x{values.shape[1]}",
        extra={"frames": values.shape[0], "dims": values.shape[1]},
    )
    return FeatureMatrix(values)
