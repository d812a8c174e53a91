"""Tandem (CM + ASV) evaluation, pooled and decomposed by attack."""

from dataclasses import dataclass, field
from enum import Enum
from typing import Any, Dict, Iterable, List, Mapping, Optional, Tuple

import numpy as np

from spoofeval.checks import CheckResult, raise_for_failures, run_checks
from spoofeval.config import DEFAULT_TOP_N, HIGH_PENALTY_BETA, build_config
from spoofeval.data.records import Key
from spoofeval.data.scores import ScoreSet
from spoofeval.exceptions import AttackFreeError
from spoofeval.logging_config import get_logger
from spoofeval.metrics.det import compute_eer
from spoofeval.metrics.tdcf import (
    POOLED,
    AsvErrorRates,
    CostModel,
    Normalization,
    TdcfResult,
    asv_error_rates,
    asv_operating_point,
    beta,
    min_tdcf,
)
from spoofeval.runner.execute import run_ordered

logger = get_logger("metrics")


class PooledBeta(Enum):
    """How the pooled beta is obtained.

    POOLED_RATES computes beta from the ASV spoof miss rate over all spoof
    trials; MEAN_ATTACK averages the per-attack betas.
    """

    POOLED_RATES = "pooled_rates"
    MEAN_ATTACK = "mean_attack"


@dataclass(frozen=True)
class EvaluationOptions:
    """The ``evaluation`` config section; command-line flags override it."""

    normalization: str = Normalization.BETA.value
    pooled_beta: str = PooledBeta.POOLED_RATES.value
    high_penalty_beta: float = HIGH_PENALTY_BETA
    known_attacks: Optional[Tuple[str, ...]] = None
    top_n: int = DEFAULT_TOP_N

    def __post_init__(self):
        Normalization(self.normalization)
        PooledBeta(self.pooled_beta)
        if not self.high_penalty_beta > 0:
            raise ValueError("high_penalty_beta must be positive")
        if self.top_n < 1:
            raise ValueError("top_n must be at least 1")
        if self.known_attacks is not None:
            object.__setattr__(self, "known_attacks", tuple(self.known_attacks))

    @classmethod
    def from_mapping(
        cls, mapping: Optional[Mapping[str, Any]], **overrides
    ) -> "EvaluationOptions":
        return build_config(cls, mapping, "evaluation", **overrides)

    def tandem_kwargs(self) -> Dict[str, Any]:
        """Keyword arguments for evaluate_tandem."""
        return {
            "normalization": Normalization(self.normalization),
            "pooled_beta": PooledBeta(self.pooled_beta),
            "known_attacks": self.known_attacks,
            "high_penalty_beta": self.high_penalty_beta,
        }


@dataclass(frozen=True)
class AttackEvaluation:
    """All numbers reported for one decomposition (one attack or pooled).

    ``tdcf`` is None when beta is undefined for the attack: the ASV already
    rejects all of its spoof trials. ``undefined_reason`` then says why.
    """

    attack_label: str
    tdcf: Optional[TdcfResult]
    cm_eer: float
    cm_eer_threshold: float
    asv_rates: AsvErrorRates
    asv_spoof_eer: float
    n_bonafide: int
    n_spoof: int
    high_penalty: bool = False
    known: Optional[bool] = None
    undefined_reason: Optional[str] = None

    @property
    def defined(self) -> bool:
        return self.tdcf is not None

    @property
    def beta(self) -> Optional[float]:
        return self.tdcf.beta if self.defined else None

    @property
    def min_tdcf(self) -> Optional[float]:
        return self.tdcf.min_tdcf if self.defined else None

    def to_dict(self) -> Dict[str, Any]:
        return {
            "attack_label": self.attack_label,
            "beta": self.beta,
            "beta_undefined": not self.defined,
            "undefined_reason": self.undefined_reason,
            "min_tdcf": self.min_tdcf,
            "argmin_threshold": self.tdcf.argmin_threshold if self.defined else None,
            "cm_eer": self.cm_eer,
            "cm_eer_threshold": self.cm_eer_threshold,
            "asv_rates": self.asv_rates.to_dict(),
            "asv_spoof_eer": self.asv_spoof_eer,
            "n_bonafide": self.n_bonafide,
            "n_spoof": self.n_spoof,
            "high_penalty": self.high_penalty,
            "known": self.known,
        }


@dataclass(frozen=True)
class TandemReport:
    pooled: AttackEvaluation
    attacks: Tuple[AttackEvaluation, ...]
    asv_threshold: float
    asv_eer: float
    cost: CostModel
    normalization: Normalization = Normalization.BETA
    pooled_beta: PooledBeta = PooledBeta.POOLED_RATES
    checks: Tuple[CheckResult, ...] = field(default_factory=tuple)

    def results(self) -> Dict[str, TdcfResult]:
        """Map from attack label and ``"pooled"`` to the t-DCF result."""
        out = {a.attack_label: a.tdcf for a in self.attacks if a.defined}
        out[POOLED] = self.pooled.tdcf
        return out

    def by_label(self, label: str) -> AttackEvaluation:
        if label == POOLED:
            return self.pooled
        for a in self.attacks:
            if a.attack_label == label:
                return a
        raise KeyError(label)

    @property
    def undefined_attacks(self) -> List[str]:
        return [a.attack_label for a in self.attacks if not a.defined]

    @property
    def high_penalty_attacks(self) -> List[str]:
        return [a.attack_label for a in self.attacks if a.high_penalty]

    def to_dict(self) -> Dict[str, Any]:
        return {
            "asv_threshold": self.asv_threshold,
            "asv_eer": self.asv_eer,
            "cost": self.cost.to_dict(),
            "normalization": self.normalization.value,
            "pooled_beta": self.pooled_beta.value,
            "pooled": self.pooled.to_dict(),
            "attacks": [a.to_dict() for a in self.attacks],
            "checks": [c.to_dict() for c in self.checks],
        }


def _evaluate(
    label: str,
    bonafide: np.ndarray,
    cm_spoof: np.ndarray,
    rates: AsvErrorRates,
    weight: Optional[float],
    target: np.ndarray,
    asv_spoof: np.ndarray,
    normalization: Normalization,
    high_penalty_beta: float,
    known: Optional[bool],
    undefined_reason: Optional[str] = None,
) -> AttackEvaluation:
    cm_eer, cm_threshold = compute_eer(bonafide, cm_spoof)
    asv_spoof_eer, _ = compute_eer(target, asv_spoof)
    tdcf = None
    if weight is not None:
        tdcf = min_tdcf(bonafide, cm_spoof, weight, label, normalization)
    return AttackEvaluation(
        attack_label=label,
        tdcf=tdcf,
        cm_eer=cm_eer,
        cm_eer_threshold=cm_threshold,
        asv_rates=rates,
        asv_spoof_eer=asv_spoof_eer,
        n_bonafide=int(bonafide.size),
        n_spoof=int(cm_spoof.size),
        high_penalty=weight is not None and weight >= high_penalty_beta,
        known=known,
        undefined_reason=undefined_reason,
    )


def evaluate_tandem(
    cm: ScoreSet,
    asv: ScoreSet,
    cost: Optional[CostModel] = None,
    *,
    asv_dev: Optional[ScoreSet] = None,
    normalization: Normalization = Normalization.BETA,
    pooled_beta: PooledBeta = PooledBeta.POOLED_RATES,
    known_attacks: Optional[Iterable[str]] = None,
    high_penalty_beta: float = HIGH_PENALTY_BETA,
    max_workers: int = 1,
) -> TandemReport:
    """Evaluate a CM against an ASV system, pooled and per attack.

    The ASV threshold is the target/nontarget EER point of ``asv_dev`` when
    given, else of ``asv``. Per-attack results use attack-restricted spoof
    scores for both beta and the CM trade-off; bona fide CM scores are shared.
    Attacks are merged in sorted label order. An attack whose spoof trials
    the ASV rejects entirely has no beta; it is reported without a t-DCF and
    left out of the mean-attack pooled beta.

    Raises:
        MissingAttackError: attack present in cm but absent in asv
        DegenerateClassError: a required class has no scores
        TandemConfigurationError: C1 <= 0, or beta undefined for the pooled set
    """
    cost = cost or CostModel.challenge_defaults()
    check_results = run_checks(cm, reference=asv) + run_checks(asv)
    if asv_dev is not None:
        # only target and nontarget scores are needed from the development set
        check_results += run_checks(asv_dev, skip=("CLASS_PRESENCE",))
    raise_for_failures(check_results)

    target = asv.scores(Key.TARGET)
    nontarget = asv.scores(Key.NONTARGET)
    asv_eer, _ = compute_eer(target, nontarget)
    if asv_dev is not None:
        threshold = asv_operating_point(
            asv_dev.scores(Key.TARGET), asv_dev.scores(Key.NONTARGET)
        )
    else:
        threshold = asv_operating_point(target, nontarget)

    bonafide = cm.scores(Key.BONAFIDE)
    attacks = cm.attacks()
    known = set(known_attacks) if known_attacks is not None else None

    def _attack(label: str) -> AttackEvaluation:
        cm_spoof = cm.scores(Key.SPOOF, label)
        asv_spoof = asv.scores(Key.SPOOF, label)
        rates = asv_error_rates(threshold, target, nontarget, asv_spoof, label)
        try:
            weight, reason = beta(cost, rates), None
        except AttackFreeError as e:
            weight, reason = None, str(e)
        return _evaluate(
            label,
            bonafide,
            cm_spoof,
            rates,
            weight,
            target,
            asv_spoof,
            normalization,
            high_penalty_beta,
            None if known is None else label in known,
            reason,
        )

    per_attack = tuple(run_ordered(_attack, attacks, max_workers=max_workers))

    # pooled ASV spoof scores cover the attacks the CM is evaluated on
    asv_spoof_all = np.concatenate([asv.scores(Key.SPOOF, a) for a in attacks])
    pooled_rates = asv_error_rates(threshold, target, nontarget, asv_spoof_all)
    if pooled_beta is PooledBeta.MEAN_ATTACK:
        defined = [a.beta for a in per_attack if a.defined]
        if not defined:
            raise AttackFreeError(
                "attack-free condition: β undefined for every attack"
            )
        pooled_weight = float(np.mean(defined))
    else:
        pooled_weight = beta(cost, pooled_rates)
    pooled = _evaluate(
        POOLED,
        bonafide,
        cm.scores(Key.SPOOF),
        pooled_rates,
        pooled_weight,
        target,
        asv_spoof_all,
        normalization,
        high_penalty_beta,
        None,
    )

    for a in per_attack:
        if not a.defined:
            logger.warning(
                f"Attack {a.attack_label}: {a.undefined_reason}",
                extra={"attack": a.attack_label},
            )
        if a.high_penalty:
            logger.warning(
                f"Attack {a.attack_label} has high-penalty beta {a.beta:.2f}",
                extra={"attack": a.attack_label, "beta": a.beta},
            )
    logger.info(
        f"Evaluated {len(per_attack)} attacks: pooled min t-DCF "
        f"{pooled.min_tdcf:.4f}, CM EER {100 * pooled.cm_eer:.2f}%",
        extra={
            "attack_count": len(per_attack),
            "min_tdcf": pooled.min_tdcf,
            "cm_eer": pooled.cm_eer,
            "asv_threshold": threshold,
        },
    )
    return TandemReport(
        pooled=pooled,
        attacks=per_attack,
        asv_threshold=threshold,
        asv_eer=asv_eer,
        cost=cost,
        normalization=normalization,
        pooled_beta=pooled_beta,
        checks=tuple(check_results),
    )
