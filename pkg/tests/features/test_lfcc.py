import numpy as np
import pytest

from spoofeval.data.audio import AudioBuffer
from spoofeval.exceptions import ConfigurationError, InputTooShortError
from spoofeval.features.base import LfccConfig
from spoofeval.features.lfcc import (
    filter_centres,
    frame_signal,
    lfcc,
    linear_filterbank,
    log_filterbank_energies,
)


def reference_lfcc(x, fs, length, shift, fft_size, n_filters, n_cepstral):
    """Frame-by-frame LFCC written out with explicit loops."""
    edges = np.linspace(0.0, fs / 2.0, n_filters + 2)
    bank = np.zeros((n_filters, fft_size // 2 + 1))
    for j in range(n_filters):
        lo, centre, hi = edges[j], edges[j + 1], edges[j + 2]
        for b in range(bank.shape[1]):
            f = b * fs / fft_size
            if lo < f <= centre:
                bank[j, b] = (f - lo) / (centre - lo)
            elif centre < f < hi:
                bank[j, b] = (hi - f) / (hi - centre)
    n = np.arange(n_filters)
    basis = np.array(
        [np.cos(np.pi * k * (2 * n + 1) / (2 * n_filters)) for k in range(n_cepstral)]
    )
    basis[0] *= np.sqrt(1.0 / n_filters)
    basis[1:] *= np.sqrt(2.0 / n_filters)
    rows = []
    for start in range(0, x.size - length + 1, shift):
        frame = x[start : start + length] * np.hamming(length)
        power = np.abs(np.fft.rfft(frame, n=fft_size)) ** 2
        log_energies = np.log(np.maximum(bank @ power, 1e-10))
        rows.append(basis @ log_energies)
    return np.array(rows)


class TestFilterbank:
    def test_shape_and_support(self):
        bank = linear_filterbank(20, 512, 16000)
        bin_freqs = np.arange(257) * 16000 / 512
        edges = np.linspace(0.0, 8000.0, 22)

        assert bank.shape == (20, 257)
        assert np.all(bank >= 0.0)
        for j in range(20):
            outside = (bin_freqs <= edges[j]) | (bin_freqs >= edges[j + 2])
            assert np.all(bank[j, outside] == 0.0)

    def test_centres_are_linear(self):
        centres = filter_centres(20, 16000)

        np.testing.assert_allclose(np.diff(centres), 8000.0 / 21)


class TestFraming:
    def test_frame_count_without_padding(self):
        frames = frame_signal(np.arange(1000.0), 320, 160)

        assert frames.shape == (1 + (1000 - 320) // 160, 320)
        assert frames[1, 0] == 160.0


class TestLfcc:
    def test_default_shape(self, tone):
        features = lfcc(tone)

        assert features.frames == 1 + (16000 - 320) // 160
        assert features.dims == 60

    def test_tone_energy_in_nearest_filter(self, tone):
        energies = log_filterbank_energies(tone, LfccConfig())

        # 1 kHz lies between the centres at 762 Hz and 1143 Hz, closer to the latter
        assert int(np.argmax(energies.mean(axis=0))) == 2

    def test_silence_hits_log_floor(self):
        audio = AudioBuffer(samples=np.zeros(1600), sample_rate=16000)

        energies = log_filterbank_energies(audio, LfccConfig())

        np.testing.assert_allclose(energies, np.log(1e-10))

    def test_input_too_short(self):
        audio = AudioBuffer(samples=np.ones(100), sample_rate=16000)

        with pytest.raises(InputTooShortError, match="one LFCC frame needs 320"):
            lfcc(audio)

    def test_no_deltas(self, tone):
        assert lfcc(tone, LfccConfig(use_deltas=False, n_cepstral=13)).dims == 13

    def test_matches_reference_computation(self, rng):
        audio = AudioBuffer(samples=rng.uniform(-0.5, 0.5, 2400), sample_rate=16000)
        cfg = LfccConfig(use_deltas=False)

        expected = reference_lfcc(audio.samples, 16000, 320, 160, 512, 20, 20)

        np.testing.assert_allclose(lfcc(audio, cfg).values, expected, atol=1e-8)


class TestLfccConfig:
    def test_frame_samples(self):
        assert LfccConfig().frame_samples(16000) == (320, 160)

    def test_frame_longer_than_fft(self):
        with pytest.raises(ConfigurationError, match="exceeds fft_size"):
            LfccConfig(frame_length=50.0).frame_samples(16000)

    @pytest.mark.parametrize(
        "kwargs",
        [{"frame_shift": 30.0}, {"n_cepstral": 21}, {"fft_size": 1}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            LfccConfig(**kwargs)
