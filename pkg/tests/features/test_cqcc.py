import numpy as np
import pytest

from spoofeval.data.audio import AudioBuffer
from spoofeval.exceptions import ConfigurationError, InputTooShortError
from spoofeval.features import FeatureKind, extract
from spoofeval.features.base import CqccConfig
from spoofeval.features.cqcc import (
    bin_kernel,
    cqcc,
    cqt,
    cqt_frequencies,
    min_input_samples,
    quality_factor,
    window_lengths,
)

# the default range starts near 15.6 Hz, whose window needs several seconds
SHORT = CqccConfig(bins_per_octave=24, f_min=250.0, f_max=8000.0)


def naive_bin(x, freq, length, fs, centre):
    """One CQT coefficient by direct summation around ``centre``."""
    atom = bin_kernel(freq, length, fs)
    start = centre - length // 2
    total = 0j
    for n in range(length):
        t = start + n
        if 0 <= t < x.size:
            total += x[t] * np.conj(atom[n])
    return total


class TestCqtGeometry:
    def test_bins_are_geometric(self):
        freqs = cqt_frequencies(250.0, 8000.0, 24)

        assert freqs.size == 120
        assert freqs[0] == 250.0
        assert freqs[48] == pytest.approx(1000.0)
        np.testing.assert_allclose(freqs[1:] / freqs[:-1], 2 ** (1 / 24))

    def test_window_lengths_follow_quality_factor(self):
        freqs = np.array([250.0, 1000.0])

        lengths = window_lengths(freqs, 16000, 24)

        q = quality_factor(24)
        assert list(lengths) == [round(q * 64), round(q * 16)]

    def test_kernel_normalised_by_window_sum(self):
        atom = bin_kernel(1000.0, 101, 16000)

        assert atom.size == 101
        assert abs(atom[50]) == pytest.approx(np.max(np.abs(atom)))


class TestCqt:
    def test_matches_direct_summation(self, rng):
        x = rng.normal(size=4000)
        audio = AudioBuffer(samples=x, sample_rate=16000)
        cfg = CqccConfig(bins_per_octave=12, f_min=500.0, f_max=8000.0, hop=160)
        freqs = cqt_frequencies(500.0, 8000.0, 12)
        lengths = window_lengths(freqs, 16000, 12)

        spectrum = cqt(audio, cfg)

        assert spectrum.shape == (freqs.size, 1 + 3999 // 160)
        for k in (0, 20, freqs.size - 1):
            for j in (0, 12, spectrum.shape[1] - 1):
                expected = naive_bin(x, freqs[k], int(lengths[k]), 16000, j * 160)
                assert spectrum[k, j] == pytest.approx(expected, abs=1e-9)

    def test_tone_peaks_at_its_bin(self, tone):
        spectrum = np.abs(cqt(tone, SHORT))

        middle = spectrum[:, spectrum.shape[1] // 2]
        assert int(np.argmax(middle)) == 48
        assert middle[48] == pytest.approx(0.25, rel=0.02)

    def test_input_too_short(self):
        audio = AudioBuffer(samples=np.ones(1000), sample_rate=16000)

        with pytest.raises(InputTooShortError, match="input too short"):
            cqt(audio, SHORT)

    def test_default_range_needs_long_input(self, tone):
        with pytest.raises(InputTooShortError):
            cqt(tone, CqccConfig())

    def test_default_minimum_duration(self):
        needed = min_input_samples(CqccConfig(), 16000)

        assert needed == round(quality_factor(96) * 1024)
        assert 8.8 < needed / 16000 < 8.9

    def test_too_short_message_names_duration(self, tone):
        with pytest.raises(InputTooShortError, match=r"\(8\.83 s; raise cqcc.f_min"):
            cqt(tone, CqccConfig())


class TestCqcc:
    def test_shape_with_deltas(self, tone):
        features = cqcc(tone, SHORT)

        assert features.dims == 90
        assert features.frames == 100

    def test_statics_only(self, tone):
        cfg = CqccConfig(
            bins_per_octave=24, f_min=250.0, f_max=8000.0, use_deltas=False
        )

        assert cqcc(tone, cfg).dims == 30

    def test_too_many_cepstra(self, tone):
        cfg = CqccConfig(bins_per_octave=24, f_min=250.0, f_max=8000.0, n_cepstral=100)

        with pytest.raises(ConfigurationError, match="100 cepstra"):
            cqcc(tone, cfg)

    def test_extract_dispatch(self, tone):
        features = extract(tone, FeatureKind.CQCC, SHORT)

        np.testing.assert_array_equal(features.values, cqcc(tone, SHORT).values)

    def test_gain_moves_only_c0(self, rng):
        audio = AudioBuffer(samples=rng.normal(0.0, 0.1, 8000), sample_rate=16000)
        cfg = CqccConfig(
            bins_per_octave=24, f_min=250.0, f_max=8000.0, use_deltas=False
        )

        base = cqcc(audio, cfg).values
        louder = cqcc(audio.with_samples(4.0 * audio.samples), cfg).values

        # 80 resample points; log power shifts by 2 ln 4 at each
        np.testing.assert_allclose(
            louder[:, 0] - base[:, 0], 2.0 * np.log(4.0) * np.sqrt(80), rtol=1e-9
        )
        np.testing.assert_allclose(louder[:, 1:], base[:, 1:], atol=1e-8)

    def test_silence_is_finite(self):
        audio = AudioBuffer(samples=np.zeros(4000), sample_rate=16000)

        features = cqcc(audio, SHORT)

        assert np.all(np.isfinite(features.values))
        # a flat log spectrum has no shape beyond c0
        np.testing.assert_allclose(features.values[:, 1:30], 0.0, atol=1e-8)


class TestCqccConfig:
    def test_resolved_defaults(self):
        assert CqccConfig().frequency_range(16000) == (8000.0 / 512, 8000.0)

    def test_range_above_nyquist(self):
        with pytest.raises(ConfigurationError, match="invalid for sample rate"):
            CqccConfig(f_max=9000.0).frequency_range(16000)

    @pytest.mark.parametrize(
        "kwargs",
        [{"hop": 0}, {"bins_per_octave": 0}, {"f_min": -1.0}, {"delta_window": 0}],
    )
    def test_invalid(self, kwargs):
        with pytest.raises(ConfigurationError):
            CqccConfig(**kwargs)

    def test_from_mapping_rejects_unknown_key(self):
        with pytest.raises(ConfigurationError, match="cqcc.window"):
            CqccConfig.from_mapping({"window": "hann"})
