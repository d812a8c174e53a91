"""Base classes for score-set checks: Check, CheckResult and Severity."""

from dataclasses import asdict, dataclass
from enum import Enum
from typing import Any, Dict, Optional, Type

from spoofeval.data.scores import ScoreSet
from spoofeval.exceptions import SpoofEvalError


class Severity(Enum):
    """Severity levels: INFO, WARNING, ERROR."""

    INFO = "INFO"
    WARNING = "WARNING"
    ERROR = "ERROR"


@dataclass
class CheckResult:
    check_id: str
    kind: str
    success: bool
    message: str = ""
    observed: Optional[float] = None
    expected: Optional[Any] = None
    severity: Severity = None
    check_class: Optional[str] = None

    def __post_init__(self):
        """Auto-set severity based on success if not explicitly provided."""
        if self.severity is None:
            self.severity = Severity.INFO if self.success else Severity.WARNING

    def to_dict(self):
        d = asdict(self)
        d["severity"] = self.severity.value if self.severity else None
        return d


class Check:
    """One sanity check over a ScoreSet.

    Subclasses implement ``evaluate``. ``exception`` is the error type raised
    for an ERROR-severity failure by ``raise_for_failures``.
    """

    exception: Type[SpoofEvalError] = SpoofEvalError
    requires_reference = False

    def __init__(self, check_id: str, kind: str, **params: Any) -> None:
        self.check_id = check_id
        self.kind = kind
        self.params: Dict[str, Any] = params

    def evaluate(
        self, scores: ScoreSet, reference: Optional[ScoreSet] = None
    ) -> CheckResult:
        raise NotImplementedError

    def create_result(
        self,
        success: bool,
        message: str = "",
        observed: Optional[float] = None,
        expected: Optional[Any] = None,
        severity: Optional[Severity] = None,
    ) -> CheckResult:
        """Factory method for CheckResult with common fields pre-filled."""
        return CheckResult(
            check_id=self.check_id,
            kind=self.kind,
            success=success,
            message=message,
            observed=observed,
            expected=expected,
            severity=severity,
            check_class=self.__class__.__name__,
        )

    @staticmethod
    def severity_from_success(
        success: bool, error_severity: Severity = Severity.ERROR
    ) -> Severity:
        return Severity.INFO if success else error_severity
