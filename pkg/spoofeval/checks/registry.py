"""Check registration and lookup."""

from typing import Any, Dict, Iterable, List, Optional, Sequence, Tuple, Type

from spoofeval.checks.base import Check, CheckResult, Severity
from spoofeval.data.scores import ScoreSet
from spoofeval.logging_config import get_logger

logger = get_logger("checks")

# Internal registry: (check_id, kind, check_cls, defaults)
_REGISTRY: List[Tuple[str, str, Type[Check], Dict[str, Any]]] = []


def register(*, kinds: Sequence[str], check_id: str = None, **default_params):
    """Decorator registering a check for one or more score kinds."""

    def _decorator(check_cls: Type[Check]):
        cid = check_id or check_cls.__name__
        for kind in kinds:
            _REGISTRY.append((cid, kind, check_cls, dict(default_params)))
        return check_cls

    return _decorator


def checks_for(kind: str) -> Iterable[Check]:
    """Instantiate all checks registered for a score kind."""
    for cid, k, cls, params in _REGISTRY:
        if k == kind:
            yield cls(cid, k, **params)


def list_registered() -> List[Dict[str, Any]]:
    return [
        {"check_id": cid, "kind": kind, "check_class": cls.__name__, "params": params}
        for cid, kind, cls, params in _REGISTRY
    ]


def run_checks(
    scores: ScoreSet,
    reference: Optional[ScoreSet] = None,
    skip: Iterable[str] = (),
) -> List[CheckResult]:
    """Run every check registered for the score set's kind.

    Checks that need a reference set are skipped when none is given, as are
    the check ids in ``skip``.
    """
    skip = set(skip)
    results = []
    for check in checks_for(scores.kind.value):
        if check.check_id in skip:
            continue
        if check.requires_reference and reference is None:
            continue
        result = check.evaluate(scores, reference)
        if not result.success:
            logger.warning(
                f"Check {check.check_id} failed: {result.message}",
                extra={"check_id": check.check_id, "kind": check.kind},
            )
        results.append(result)
    return results


def raise_for_failures(results: Iterable[CheckResult]) -> None:
    """Raise the registered exception of the first ERROR-severity failure."""
    by_id = {(cid, kind): cls for cid, kind, cls, _ in _REGISTRY}
    for result in results:
        if not result.success and result.severity is Severity.ERROR:
            cls = by_id.get((result.check_id, result.kind), Check)
            raise cls.exception(result.message)
