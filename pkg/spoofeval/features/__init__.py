"""CQCC and LFCC front-ends."""

from enum import Enum
from typing import Union

from spoofeval.data.audio import AudioBuffer
from spoofeval.features.base import (  # noqa: F401
    CqccConfig,
    FeatureMatrix,
    LfccConfig,
    features_to_csv,
    read_features,
    write_features,
)
from spoofeval.features.cqcc import cqcc, cqt  # noqa: F401
from spoofeval.features.deltas import append_deltas  # noqa: F401
from spoofeval.features.lfcc import lfcc  # noqa: F401


class FeatureKind(Enum):
    CQCC = "cqcc"
    LFCC = "lfcc"


def extract(
    audio: AudioBuffer, kind: FeatureKind, cfg: Union[CqccConfig, LfccConfig]
) -> FeatureMatrix:
    """Run the front-end named by ``kind``."""
    if kind is FeatureKind.CQCC:
        return cqcc(audio, cfg)
    return lfcc(audio, cfg)
