"""Feature matrices, front-end configurations and the feature container."""

from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Any, Dict, Mapping, Optional, Sequence, Tuple, Union

import numpy as np
import pandas as pd

from spoofeval.config import build_config
from spoofeval.data.containers import read_container, write_container
from spoofeval.exceptions import ConfigurationError, ContainerFormatError

FEATURE_MAGIC = b"SPFEAT\0\0"


@dataclass(frozen=True, eq=False)
class FeatureMatrix:
    """Frames x dims array of finite feature values."""

    values: np.ndarray

    def __post_init__(self):
        values = np.asarray(self.values, dtype=float)
        if values.ndim != 2:
            raise ValueError(f"features must be 2-D, got shape {values.shape}")
        if not np.all(np.isfinite(values)):
            raise ValueError("features contain non-finite values")
        object.__setattr__(self, "values", values)

    @property
    def frames(self) -> int:
        return self.values.shape[0]

    @property
    def dims(self) -> int:
        return self.values.shape[1]

    @classmethod
    def concatenate(cls, matrices: Sequence["FeatureMatrix"]) -> "FeatureMatrix":
        """Stack the frames of several matrices of equal dims."""
        return cls(np.vstack([m.values for m in matrices]))


@dataclass(frozen=True)
class CqccConfig:
    """CQCC front-end parameters.

    ``f_max=None`` means the Nyquist frequency and ``f_min=None`` means
    ``f_max / 2**9``, both resolved against the audio sample rate.

    The lowest bin's window sets the shortest usable input: about 8.8 s for
    the defaults. Typical utterances of a few seconds need ``f_min`` raised,
    e.g. to 250 Hz (0.14 s at 24 bins per octave).
    """

    bins_per_octave: int = 96
    f_min: Optional[float] = None
    f_max: Optional[float] = None
    hop: int = 160
    n_cepstral: int = 30
    resample_points_per_octave: int = 16
    include_c0: bool = True
    delta_window: int = 2
    use_deltas: bool = True

    def __post_init__(self):
        if self.bins_per_octave < 1:
            raise ConfigurationError("cqcc.bins_per_octave must be positive")
        if self.hop < 1:
            raise ConfigurationError("cqcc.hop must be positive")
        if self.n_cepstral < 1 or self.resample_points_per_octave < 1:
            raise ConfigurationError(
                "cqcc.n_cepstral and cqcc.resample_points_per_octave must be positive"
            )
        if self.delta_window < 1:
            raise ConfigurationError("cqcc.delta_window must be positive")
        if self.f_min is not None and self.f_min <= 0:
            raise ConfigurationError("cqcc.f_min must be positive")
        if (
            self.f_min is not None
            and self.f_max is not None
            and not self.f_min < self.f_max
        ):
            raise ConfigurationError("cqcc.f_min must be below cqcc.f_max")

    def frequency_range(self, sample_rate: int) -> Tuple[float, float]:
        """Resolved ``(f_min, f_max)`` for a sample rate."""
        nyquist = sample_rate / 2.0
        f_max = nyquist if self.f_max is None else float(self.f_max)
        f_min = f_max / 2**9 if self.f_min is None else float(self.f_min)
        if not 0 < f_min < f_max <= nyquist:
            raise ConfigurationError(
                f"cqcc frequency range ({f_min}, {f_max}) invalid for "
                f"sample rate {sample_rate}"
            )
        return f_min, f_max

    @property
    def output_dims(self) -> int:
        return self.n_cepstral * (3 if self.use_deltas else 1)

    @classmethod
    def from_mapping(cls, mapping: Optional[Mapping[str, Any]], **overrides):
        return build_config(cls, mapping, "cqcc", **overrides)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


@dataclass(frozen=True)
class LfccConfig:
    """LFCC front-end parameters; frame length and shift in milliseconds."""

    frame_length: float = 20.0
    frame_shift: float = 10.0
    fft_size: int = 512
    n_filters: int = 20
    n_cepstral: int = 20
    delta_window: int = 2
    use_deltas: bool = True

    def __post_init__(self):
        if not 0 < self.frame_shift <= self.frame_length:
            raise ConfigurationError(
                "lfcc.frame_shift must be positive and not exceed lfcc.frame_length"
            )
        if not 1 <= self.n_cepstral <= self.n_filters:
            raise ConfigurationError("lfcc.n_cepstral must be in [1, lfcc.n_filters]")
        if self.fft_size < 2:
            raise ConfigurationError("lfcc.fft_size must be at least 2")
        if self.delta_window < 1:
            raise ConfigurationError("lfcc.delta_window must be positive")

    def frame_samples(self, sample_rate: int) -> Tuple[int, int]:
        """``(frame_length, frame_shift)`` in samples."""
        length = int(round(self.frame_length * sample_rate / 1000.0))
        shift = int(round(self.frame_shift * sample_rate / 1000.0))
        if length > self.fft_size:
            raise ConfigurationError(
                f"lfcc frame of {length} samples exceeds fft_size {self.fft_size}"
            )
        return length, max(shift, 1)

    @property
    def output_dims(self) -> int:
        return self.n_cepstral * (3 if self.use_deltas else 1)

    @classmethod
    def from_mapping(cls, mapping: Optional[Mapping[str, Any]], **overrides):
        return build_config(cls, mapping, "lfcc", **overrides)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def write_features(path: Union[str, Path], m: FeatureMatrix) -> None:
    write_container(path, FEATURE_MAGIC, (m.frames, m.dims), m.values)


def read_features(path: Union[str, Path]) -> FeatureMatrix:
    """Read a feature container.

    Raises:
        ContainerFormatError: malformed header or payload
    """
    (frames, dims), payload = read_container(path, FEATURE_MAGIC, 2)
    if payload.size != frames * dims:
        raise ContainerFormatError(
            f"{path}: expected {frames}x{dims} values, found {payload.size}"
        )
    try:
        return FeatureMatrix(payload.reshape(frames, dims))
    except ValueError as e:
        raise ContainerFormatError(f"{path}: {e}") from e


def features_to_csv(path: Union[str, Path], m: FeatureMatrix) -> None:
    """Debug export, one row per frame."""
    frame = pd.DataFrame(m.values, columns=[f"c{i}" for i in range(m.dims)])
    frame.to_csv(path, index_label="frame", float_format="%.10g")


MANIFEST_COLUMNS = ("utterance_id", "feature_file", "frames", "dims", "config_hash")


def write_feature_manifest(
    path: Union[str, Path], rows: Sequence[Mapping[str, Any]]
) -> None:
    pd.DataFrame(list(rows), columns=list(MANIFEST_COLUMNS)).to_csv(path, index=False)


def read_feature_manifest(path: Union[str, Path]) -> Dict[str, Path]:
    """Utterance id to feature file, relative paths resolved against the
    manifest directory.

    Raises:
        ConfigurationError: unreadable manifest or missing columns
    """
    path = Path(path)
    try:
        frame = pd.read_csv(path, dtype={"utterance_id": str, "feature_file": str})
    except (OSError, pd.errors.ParserError, pd.errors.EmptyDataError) as e:
        raise ConfigurationError(f"cannot read feature manifest '{path}': {e}") from e
    missing = {"utterance_id", "feature_file"} - set(frame.columns)
    if missing:
        raise ConfigurationError(
            f"feature manifest '{path}' lacks columns {sorted(missing)}"
        )
    return {
        uid: (path.parent / f) if not Path(f).is_absolute() else Path(f)
        for uid, f in zip(frame["utterance_id"], frame["feature_file"])
    }
