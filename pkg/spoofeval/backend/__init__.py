"""GMM back-end classifier."""

from spoofeval.backend.gmm import (  # noqa: F401
    GmmModel,
    TrainConfig,
    avg_log_likelihood,
    llr_score,
    train_em,
    train_em_with_log,
)
from spoofeval.backend.serialize import (  # noqa: F401
    read_gmm,
    write_gmm,
    write_gmm_json,
)
