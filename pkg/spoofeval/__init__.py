"""Evaluation toolkit for speaker verification spoofing countermeasures:
tandem t-DCF and EER scoring, CQCC/LFCC-GMM baselines and replay
simulation."""

__version__ = "0.1.0"

from spoofeval.context import RunContext, RunContextFactory  # noqa: F401
from spoofeval.data import (  # noqa: F401
    Key,
    ScoreKind,
    ScoreSet,
    TrialRecord,
    join,
    parse_protocol,
    parse_scores,
)
from spoofeval.metrics import (  # noqa: F401
    CostModel,
    TandemReport,
    compute_eer,
    evaluate_tandem,
    min_tdcf,
)

__all__ = [
    "__version__",
    "RunContext",
    "RunContextFactory",
    "Key",
    "ScoreKind",
    "ScoreSet",
    "TrialRecord",
    "join",
    "parse_protocol",
    "parse_scores",
    "CostModel",
    "TandemReport",
    "compute_eer",
    "evaluate_tandem",
    "min_tdcf",
]
