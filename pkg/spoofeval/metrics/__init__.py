"""DET/EER, tandem detection cost and tandem evaluation."""

from spoofeval.metrics.det import (  # noqa: F401
    DetCurve,
    compute_eer,
    det_curve,
    det_curve_frame,
    eer,
)
from spoofeval.metrics.tandem import (  # noqa: F401
    AttackEvaluation,
    EvaluationOptions,
    PooledBeta,
    TandemReport,
    evaluate_tandem,
)
from spoofeval.metrics.tdcf import (  # noqa: F401
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
