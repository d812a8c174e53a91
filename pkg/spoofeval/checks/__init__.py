"""Score-set sanity checks run before any metric is computed."""

from spoofeval.checks import score_checks  # noqa: F401  (registers built-ins)
from spoofeval.checks.base import Check, CheckResult, Severity  # noqa: F401
from spoofeval.checks.registry import (  # noqa: F401
    checks_for,
    list_registered,
    raise_for_failures,
    register,
    run_checks,
)
