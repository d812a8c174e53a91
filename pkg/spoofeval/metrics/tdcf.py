"""Tandem detection cost: cost model, ASV operating point and error rates,
the attack-specific weight beta and the minimum normalized t-DCF."""

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Mapping, Optional, Sequence

import numpy as np

from spoofeval.config import (
    CHALLENGE_DEFAULT_COSTS,
    PRIOR_SUM_TOLERANCE,
    build_config,
)
from spoofeval.exceptions import (
    AttackFreeError,
    ConfigurationError,
    MissingAttackError,
    TandemConfigurationError,
)
from spoofeval.metrics.det import as_scores, det_curve, eer

POOLED = "pooled"


class Normalization(Enum):
    """How the minimum t-DCF is normalized.

    BETA is ``beta * P_miss + P_fa``. MIN_C1_C2 divides the raw cost
    ``C1 * P_miss + C2 * P_fa`` by ``min(C1, C2)``, as other toolkits do.
    """

    BETA = "beta"
    MIN_C1_C2 = "min_c1_c2"


@dataclass(frozen=True)
class CostModel:
    """Priors and detection costs parameterizing the t-DCF."""

    pi_tar: float
    pi_non: float
    pi_spoof: float
    c_miss_cm: float
    c_fa_cm: float
    c_miss_asv: float
    c_fa_asv: float

    def __post_init__(self):
        priors = (self.pi_tar, self.pi_non, self.pi_spoof)
        costs = (self.c_miss_cm, self.c_fa_cm, self.c_miss_asv, self.c_fa_asv)
        if any(p < 0 for p in priors):
            raise ConfigurationError(f"priors must be non-negative, got {priors}")
        if abs(sum(priors) - 1.0) > PRIOR_SUM_TOLERANCE:
            raise ConfigurationError(f"priors must sum to 1, got {sum(priors)!r}")
        if any(c < 0 for c in costs):
            raise ConfigurationError(f"costs must be non-negative, got {costs}")
        if not any(c > 0 for c in costs):
            raise ConfigurationError("at least one cost must be positive")

    @classmethod
    def challenge_defaults(cls) -> "CostModel":
        """The challenge evaluation-plan preset (overridable)."""
        return cls(**CHALLENGE_DEFAULT_COSTS)

    @classmethod
    def from_mapping(cls, mapping: Optional[Mapping[str, Any]]) -> "CostModel":
        """Challenge defaults overridden by a ``cost`` config section."""
        values = dict(CHALLENGE_DEFAULT_COSTS)
        values.update(mapping or {})
        return build_config(cls, values, "cost")

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class AsvErrorRates:
    threshold: float
    p_miss_asv: float
    p_fa_asv: float
    p_miss_spoof_asv: float

    def to_dict(self) -> Dict[str, float]:
        return asdict(self)


@dataclass(frozen=True)
class TdcfResult:
    beta: float
    min_tdcf: float
    argmin_threshold: float
    attack_label: str = POOLED
    p_miss_cm: float = 0.0
    p_fa_cm: float = 0.0

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def asv_operating_point(target: Sequence[float], nontarget: Sequence[float]) -> float:
    """ASV threshold at the target/nontarget EER crossing.

    Raises:
        DegenerateClassError: when either list is empty
    """
    _, threshold = eer(det_curve(target, nontarget))
    return threshold


def asv_error_rates(
    threshold: float,
    target: Sequence[float],
    nontarget: Sequence[float],
    spoof: Sequence[float],
    attack: str = POOLED,
) -> AsvErrorRates:
    """ASV miss, false alarm and spoof miss rates at one shared threshold.

    Raises:
        MissingAttackError: empty spoof list for the requested attack
        DegenerateClassError: empty target or nontarget list
    """
    if not np.isfinite(threshold):
        raise ValueError(f"ASV threshold must be finite, got {threshold}")
    tar = as_scores(target, "target")
    non = as_scores(nontarget, "nontarget")
    spf = np.asarray(spoof, dtype=float).ravel()
    if spf.size == 0:
        raise MissingAttackError(f"no ASV spoof scores for attack '{attack}'")
    return AsvErrorRates(
        threshold=float(threshold),
        p_miss_asv=float(np.mean(tar < threshold)),
        p_fa_asv=float(np.mean(non >= threshold)),
        p_miss_spoof_asv=float(np.mean(spf < threshold)),
    )


def tandem_coefficients(cost: CostModel, rates: AsvErrorRates):
    """Return ``(C1, C2)`` of the tandem cost ``C1 * P_miss + C2 * P_fa``."""
    c1 = (
        cost.pi_tar * (cost.c_miss_cm - cost.c_miss_asv * rates.p_miss_asv)
        - cost.pi_non * cost.c_fa_asv * rates.p_fa_asv
    )
    c2 = cost.c_fa_cm * cost.pi_spoof * (1.0 - rates.p_miss_spoof_asv)
    return c1, c2


def beta(cost: CostModel, rates: AsvErrorRates) -> float:
    """Attack-specific weight on CM misses, ``beta = C1 / C2``.

    Raises:
        AttackFreeError: C2 == 0, the ASV already rejects every spoof trial
        TandemConfigurationError: C1 <= 0
    """
    c1, c2 = tandem_coefficients(cost, rates)
    if c2 == 0:
        raise AttackFreeError("attack-free condition: β undefined")
    if c1 <= 0:
        raise TandemConfigurationError(
            f"invalid tandem configuration: C1={c1:.6g} <= 0 "
            "(rejecting every trial is optimal)"
        )
    return c1 / c2


def min_tdcf(
    cm_bonafide: Sequence[float],
    cm_spoof: Sequence[float],
    beta: float,
    attack_label: str = POOLED,
    normalization: Normalization = Normalization.BETA,
) -> TdcfResult:
    """Minimum over all thresholds of ``beta * P_miss + P_fa``.

    Both trivial operating points are included, so the result never exceeds
    ``min(1, beta)``. Ties go to the lowest threshold.

    Raises:
        DegenerateClassError: when either class is empty
    """
    if not beta > 0:
        raise ValueError(f"beta must be positive, got {beta}")
    curve = det_curve(cm_bonafide, cm_spoof)
    p_miss, p_fa = curve.p_miss, curve.p_fa
    costs = beta * p_miss + p_fa
    best = int(np.argmin(costs))
    value = float(costs[best])
    if normalization is Normalization.MIN_C1_C2:
        value /= min(1.0, beta)
    return TdcfResult(
        beta=float(beta),
        min_tdcf=value,
        argmin_threshold=float(curve.midpoints()[best]),
        attack_label=attack_label,
        p_miss_cm=float(p_miss[best]),
        p_fa_cm=float(p_fa[best]),
    )
