"""Regression deltas over the time axis."""

import numpy as np

from spoofeval.features.base import FeatureMatrix


def deltas(values: np.ndarray, window: int) -> np.ndarray:
    """Regression deltas of a frames x dims array with edge frames replicated.

    ``d_t = sum_{n=1..W} n * (c_{t+n} - c_{t-n}) / (2 * sum_{n=1..W} n^2)``
    """
    if window < 1:
        raise ValueError(f"delta window must be positive, got {window}")
    values = np.asarray(values, dtype=float)
    n_frames = values.shape[0]
    padded = np.pad(values, ((window, window), (0, 0)), mode="edge")
    out = np.zeros_like(values)
    for n in range(1, window + 1):
        out += n * (
            padded[window + n : window + n + n_frames]
            - padded[window - n : window - n + n_frames]
        )
    return out / (2.0 * sum(n * n for n in range(1, window + 1)))


def stack_deltas(values: np.ndarray, window: int) -> np.ndarray:
    """Statics, deltas and accelerations side by side."""
    d1 = deltas(values, window)
    return np.hstack((values, d1, deltas(d1, window)))


def append_deltas(m: FeatureMatrix, window: int) -> FeatureMatrix:
    """Append delta and delta-delta blocks; output dims are 3 x input dims."""
    return FeatureMatrix(stack_deltas(m.values, window))
