"""DET plots on normal-deviate (probit) axes."""

from pathlib import Path
from typing import Mapping, Union

import matplotlib

matplotlib.use("Agg")

import matplotlib.pyplot as plt  # noqa: E402
import numpy as np  # noqa: E402
from scipy.stats import norm  # noqa: E402

from spoofeval.metrics.det import DetCurve  # noqa: E402

TICK_PERCENT = (0.1, 0.2, 0.5, 1, 2, 5, 10, 20, 40)
# rates of exactly 0 or 1 sit at infinity on a probit axis
RATE_CLIP = 1e-4


def probit(rates: np.ndarray) -> np.ndarray:
    return norm.ppf(np.clip(rates, RATE_CLIP, 1.0 - RATE_CLIP))


def plot_det(curves: Mapping[str, DetCurve], path: Union[str, Path]) -> Path:
    """Write an SVG with one DET line per curve, false alarms on x."""
    plt.rcParams["svg.hashsalt"] = "spoofeval"
    fig, ax = plt.subplots(figsize=(6, 6))
    for label, curve in curves.items():
        ax.plot(probit(curve.p_fa), probit(curve.p_miss), label=label, linewidth=1.0)
    ticks = norm.ppf(np.array(TICK_PERCENT) / 100.0)
    labels = [f"{t:g}" for t in TICK_PERCENT]
    ax.set_xticks(ticks)
    ax.set_xticklabels(labels)
    ax.set_yticks(ticks)
    ax.set_yticklabels(labels)
    limit = norm.ppf([RATE_CLIP, 0.5])
    ax.set_xlim(*limit)
    ax.set_ylim(*limit)
    ax.set_xlabel("False alarm rate [%]")
    ax.set_ylabel("Miss rate [%]")
    ax.grid(True, linewidth=0.3)
    ax.legend(loc="upper right", fontsize="small")
    path = Path(path)
    fig.savefig(path, format="svg", metadata={"Date": None})
    plt.close(fig)
    return path
