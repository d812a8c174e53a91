"""Rendering bona fide and replayed presentations through a PaConfig."""

import numpy as np
from scipy import signal

from spoofeval.config import PEAK_LEVEL
from spoofeval.data.audio import AudioBuffer
from spoofeval.exceptions import SimulationError
from spoofeval.simulation.device import apply_replay_device
from spoofeval.simulation.room import rir_image_method
from spoofeval.simulation.sampling import PaConfig


def peak_normalize(samples: np.ndarray, level: float = PEAK_LEVEL) -> np.ndarray:
    peak = np.max(np.abs(samples))
    if peak == 0:
        return np.array(samples, dtype=float)
    return samples * (level / peak)


def convolve(audio: AudioBuffer, rir: np.ndarray) -> AudioBuffer:
    return audio.with_samples(signal.fftconvolve(audio.samples, rir, mode="full"))


def simulate_bonafide(speech: AudioBuffer, cfg: PaConfig) -> AudioBuffer:
    """Talker to ASV microphone through the room."""
    rir = rir_image_method(
        cfg.room, cfg.talker_pos, cfg.mic_pos, sample_rate=speech.sample_rate
    )
    return speech.with_samples(peak_normalize(convolve(speech, rir).samples))


def simulate_replay(speech: AudioBuffer, cfg: PaConfig) -> AudioBuffer:
    """Talker to attacker's recorder, replay device, loudspeaker to microphone.

    The recorder is ideal; the device carries all degradation.
    """
    if cfg.attacker_pos is None or cfg.device is None:
        raise SimulationError(f"category {cfg.category} has no replay configuration")
    fs = speech.sample_rate
    recording = rir_image_method(
        cfg.room, cfg.talker_pos, cfg.attacker_pos, sample_rate=fs
    )
    captured = convolve(speech, recording)
    # recordings are level-normalised before replay so the drive acts on full scale
    captured = captured.with_samples(peak_normalize(captured.samples))
    replayed = apply_replay_device(captured, cfg.device)
    playback = rir_image_method(cfg.room, cfg.attacker_pos, cfg.mic_pos, sample_rate=fs)
    received = convolve(replayed, playback)
    return speech.with_samples(peak_normalize(received.samples))


def spectral_flatness(samples: np.ndarray, sample_rate: int, band=None) -> float:
    """Geometric over arithmetic mean of the Welch power spectrum in ``band``."""
    freqs, power = signal.welch(
        samples, fs=sample_rate, nperseg=min(1024, len(samples))
    )
    if band is not None:
        keep = (freqs >= band[0]) & (freqs <= band[1])
        power = power[keep]
    power = np.maximum(power, np.finfo(float).tiny)
    return float(np.exp(np.mean(np.log(power))) / np.mean(power))
