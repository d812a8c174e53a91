"""Built-in sanity checks for CM and ASV score sets.

Record-level validity (finite scores, key domain, unique trial ids) is
enforced when score files are parsed; these checks look at a set as a whole.
"""

from collections import Counter
from typing import Optional

import numpy as np

from spoofeval.checks.base import Check, CheckResult, Severity
from spoofeval.checks.registry import register
from spoofeval.data.records import Key, ScoreKind
from spoofeval.data.scores import ScoreSet
from spoofeval.exceptions import DegenerateClassError, MissingAttackError

BOTH = (ScoreKind.CM.value, ScoreKind.ASV.value)

# classes a score set must contain before any metric is computed
REQUIRED_KEYS = {
    ScoreKind.CM.value: (Key.BONAFIDE, Key.SPOOF),
    ScoreKind.ASV.value: (Key.TARGET, Key.NONTARGET, Key.SPOOF),
}

# (accepted class, rejected class) whose medians should be ordered
POLARITY_KEYS = {
    ScoreKind.CM.value: (Key.BONAFIDE, Key.SPOOF),
    ScoreKind.ASV.value: (Key.TARGET, Key.NONTARGET),
}


@register(kinds=BOTH, check_id="CLASS_PRESENCE")
class ClassPresenceCheck(Check):
    """Every class a metric needs has at least one score."""

    exception = DegenerateClassError

    def evaluate(self, scores, reference=None) -> CheckResult:
        present = Counter(r.key for r in scores)
        missing = [k.value for k in REQUIRED_KEYS[self.kind] if present[k] == 0]
        ok = not missing
        message = (
            "all classes present"
            if ok
            else f"degenerate class: no {', '.join(missing)} scores"
        )
        return self.create_result(
            success=ok,
            message=message,
            observed=float(len(missing)),
            expected=0,
            severity=self.severity_from_success(ok),
        )


@register(kinds=BOTH, check_id="SCORE_POLARITY")
class ScorePolarityCheck(Check):
    """Higher scores favour bona fide (CM) or target (ASV) trials.

    A submission with negated scores parses cleanly but ranks near the bottom.
    """

    def evaluate(self, scores, reference=None) -> CheckResult:
        accepted, rejected = POLARITY_KEYS[self.kind]
        high, low = scores.scores(accepted), scores.scores(rejected)
        if high.size == 0 or low.size == 0:
            return self.create_result(
                success=True, message="polarity not checked: class missing"
            )
        gap = float(np.median(high) - np.median(low))
        ok = gap >= 0.0
        message = (
            f"{accepted.value} median above {rejected.value} median"
            if ok
            else f"{accepted.value} median {-gap:.4g} below {rejected.value} "
            f"median; scores may be negated"
        )
        return self.create_result(
            success=ok,
            message=message,
            observed=gap,
            expected=">= 0",
            severity=self.severity_from_success(ok, Severity.WARNING),
        )


@register(kinds=BOTH, check_id="CONSTANT_SCORES")
class ConstantScoreCheck(Check):
    """The set holds more than one distinct score value."""

    def evaluate(self, scores, reference=None) -> CheckResult:
        values = np.array([r.score for r in scores], dtype=float)
        distinct = int(np.unique(values).size)
        ok = distinct != 1 or values.size < 2
        message = (
            f"{distinct} distinct scores"
            if ok
            else f"all {values.size} scores equal {values[0]:.6g}"
        )
        return self.create_result(
            success=ok,
            message=message,
            observed=float(distinct),
            expected="> 1",
            severity=self.severity_from_success(ok, Severity.WARNING),
        )


@register(kinds=(ScoreKind.CM.value,), check_id="ATTACK_COVERAGE")
class AttackCoverageCheck(Check):
    """Every CM attack also has ASV spoof scores."""

    exception = MissingAttackError
    requires_reference = True

    def evaluate(
        self, scores: ScoreSet, reference: Optional[ScoreSet] = None
    ) -> CheckResult:
        missing = sorted(set(scores.attacks()) - set(reference.attacks()))
        ok = not missing
        if ok:
            message = f"{len(scores.attacks())} attacks covered by ASV scores"
        else:
            message = (
                f"attack '{missing[0]}' present in CM scores but absent in ASV scores"
            )
            if len(missing) > 1:
                message += f" (and {len(missing) - 1} more)"
        return self.create_result(
            success=ok,
            message=message,
            observed=float(len(missing)),
            expected=0,
            severity=Severity.ERROR if not ok else Severity.INFO,
        )
