"""Detection error trade-off curves and equal error rates.

Score convention: higher means more bona fide (or more target-like). At a
threshold ``s`` a miss is a positive score strictly below ``s`` and a false
alarm is a negative score at or above ``s``.
"""

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence, Tuple

import numpy as np
import pandas as pd

from spoofeval.exceptions import DegenerateClassError


def as_scores(values: Sequence[float], name: str) -> np.ndarray:
    """Validate one class of scores as a non-empty finite 1-D array."""
    arr = np.asarray(values, dtype=float).ravel()
    if arr.size == 0:
        raise DegenerateClassError(f"degenerate class: no {name} scores")
    if not np.all(np.isfinite(arr)):
        raise DegenerateClassError(f"non-finite {name} scores")
    return arr


@dataclass(frozen=True, eq=False)
class DetCurve:
    """Distinct empirical operating points ordered by threshold.

    ``thresholds[i]`` is the highest threshold producing point ``i``; the
    point is produced by every threshold in ``(lower[i], thresholds[i]]``.
    The last threshold is ``+inf`` (the ``p_miss = 1, p_fa = 0`` point).
    """

    thresholds: np.ndarray
    lower: np.ndarray
    miss_counts: np.ndarray
    fa_counts: np.ndarray
    n_positive: int
    n_negative: int

    @property
    def p_miss(self) -> np.ndarray:
        return self.miss_counts / self.n_positive

    @property
    def p_fa(self) -> np.ndarray:
        return self.fa_counts / self.n_negative

    def __len__(self) -> int:
        return self.thresholds.size

    def midpoints(self) -> np.ndarray:
        """Finite representative threshold of each point: the centre of its
        threshold interval, or its finite end when the other is infinite."""
        lo, hi = self.lower, self.thresholds
        finite_lo, finite_hi = np.isfinite(lo), np.isfinite(hi)
        with np.errstate(invalid="ignore"):
            centre = 0.5 * (lo + hi)
        return np.where(finite_lo & finite_hi, centre, np.where(finite_hi, hi, lo))


def det_curve(
    bonafide_scores: Sequence[float], spoof_scores: Sequence[float]
) -> DetCurve:
    """Enumerate all distinct operating points over every threshold.

    Candidate thresholds are the distinct pooled scores plus the -inf/+inf
    sentinels; runs of identical operating points collapse onto one point.

    Raises:
        DegenerateClassError: when either class is empty
    """
    pos = np.sort(as_scores(bonafide_scores, "bonafide"))
    neg = np.sort(as_scores(spoof_scores, "spoof"))

    candidates = np.concatenate(
        ([-np.inf], np.unique(np.concatenate((pos, neg))), [np.inf])
    )
    miss = np.searchsorted(pos, candidates, side="left")
    fa = neg.size - np.searchsorted(neg, candidates, side="left")

    # keep the last threshold of every run of equal points
    keep = np.ones(candidates.size, dtype=bool)
    keep[:-1] = (miss[1:] != miss[:-1]) | (fa[1:] != fa[:-1])

    thresholds = candidates[keep]
    lower = np.concatenate(([-np.inf], thresholds[:-1]))
    return DetCurve(
        thresholds=thresholds,
        lower=lower,
        miss_counts=miss[keep],
        fa_counts=fa[keep],
        n_positive=pos.size,
        n_negative=neg.size,
    )


def eer(curve: DetCurve) -> Tuple[float, float]:
    """Equal error rate and its threshold.

    The crossing of ``p_miss`` and ``p_fa`` is taken on the straight segment
    between adjacent operating points. The rate is computed in exact rational
    arithmetic from the counts, so symmetric cases come out exact. The
    threshold interpolates the points' interval midpoints.
    """
    miss, fa = curve.miss_counts, curve.fa_counts
    n_pos, n_neg = curve.n_positive, curve.n_negative
    # miss/n_pos - fa/n_neg, scaled to integers; strictly increasing
    diff = miss * n_neg - fa * n_pos
    i = int(np.searchsorted(diff, 0, side="left"))
    mids = curve.midpoints()

    if diff[i] == 0:
        return float(Fraction(int(miss[i]), n_pos)), float(mids[i])

    d0, d1 = int(diff[i - 1]), int(diff[i])
    t = Fraction(-d0, d1 - d0)
    m0, m1 = Fraction(int(miss[i - 1]), n_pos), Fraction(int(miss[i]), n_pos)
    rate = m0 + t * (m1 - m0)
    threshold = mids[i - 1] + float(t) * (mids[i] - mids[i - 1])
    return float(rate), float(threshold)


def compute_eer(
    bonafide_scores: Sequence[float], spoof_scores: Sequence[float]
) -> Tuple[float, float]:
    """Convenience wrapper: EER of two score lists."""
    return eer(det_curve(bonafide_scores, spoof_scores))


def det_curve_frame(curve: DetCurve) -> pd.DataFrame:
    """DET curve as a ``threshold,p_miss,p_fa`` table, one row per point."""
    return pd.DataFrame(
        {
            "threshold": curve.thresholds,
            "p_miss": curve.p_miss,
            "p_fa": curve.p_fa,
        }
    )
