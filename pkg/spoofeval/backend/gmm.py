"""Diagonal-covariance GMMs: EM training and log-likelihood-ratio scoring."""

from dataclasses import asdict, dataclass
from typing import Any, Dict, List, Mapping, Optional, Tuple, Union

import numpy as np
from scipy.special import logsumexp
from sklearn.cluster import kmeans_plusplus

from spoofeval.config import (
    DEFAULT_BLOCK_SIZE,
    DEFAULT_GMM_COMPONENTS,
    EMPTY_COMPONENT_MASS,
    INIT_JITTER,
    INIT_SUBSAMPLE,
    MIN_VARIANCE,
    VARIANCE_FLOOR_FACTOR,
    build_config,
)
from spoofeval.exceptions import (
    ConfigurationError,
    DimensionMismatchError,
    TrainingError,
)
from spoofeval.features.base import FeatureMatrix
from spoofeval.logging_config import get_logger
from spoofeval.runner.execute import run_ordered

logger = get_logger("backend")

LOG_2PI = np.log(2.0 * np.pi)

Frames = Union[FeatureMatrix, np.ndarray]


@dataclass(frozen=True, eq=False)
class GmmModel:
    weights: np.ndarray
    means: np.ndarray
    variances: np.ndarray

    def __post_init__(self):
        weights = np.asarray(self.weights, dtype=float).ravel()
        means = np.atleast_2d(np.asarray(self.means, dtype=float))
        variances = np.atleast_2d(np.asarray(self.variances, dtype=float))
        if means.shape != variances.shape or means.shape[0] != weights.size:
            raise ValueError(
                f"inconsistent GMM shapes: weights {weights.shape}, "
                f"means {means.shape}, variances {variances.shape}"
            )
        if np.any(weights < 0) or abs(weights.sum() - 1.0) > 1e-12:
            raise ValueError("GMM weights must lie on the simplex")
        if not np.all(variances > 0):
            raise ValueError("GMM variances must be positive")
        object.__setattr__(self, "weights", weights)
        object.__setattr__(self, "means", means)
        object.__setattr__(self, "variances", variances)

    @property
    def n_components(self) -> int:
        return self.weights.size

    @property
    def dims(self) -> int:
        return self.means.shape[1]

    def component_log_densities(self, x: np.ndarray) -> np.ndarray:
        """``log w_k + log N(x; mu_k, diag var_k)``, frames x components."""
        precision = 1.0 / self.variances
        mahalanobis = (
            (x**2) @ precision.T
            - 2.0 * x @ (self.means * precision).T
            + np.sum(self.means**2 * precision, axis=1)
        )
        log_norm = -0.5 * (self.dims * LOG_2PI + np.sum(np.log(self.variances), axis=1))
        with np.errstate(divide="ignore"):
            log_w = np.log(self.weights)
        return log_w + log_norm - 0.5 * mahalanobis

    def log_likelihoods(self, frames: Frames) -> np.ndarray:
        """Per-frame mixture log-likelihood."""
        x = _as_frames(frames)
        if x.shape[1] != self.dims:
            raise DimensionMismatchError(
                f"features have {x.shape[1]} dims, model expects {self.dims}"
            )
        return logsumexp(self.component_log_densities(x), axis=1)

    def to_dict(self) -> Dict[str, Any]:
        return {
            "n_components": self.n_components,
            "dims": self.dims,
            "weights": self.weights.tolist(),
            "means": self.means.tolist(),
            "variances": self.variances.tolist(),
        }

    @classmethod
    def from_dict(cls, data: Mapping[str, Any]) -> "GmmModel":
        return cls(
            weights=np.array(data["weights"]),
            means=np.array(data["means"]),
            variances=np.array(data["variances"]),
        )


@dataclass(frozen=True)
class TrainConfig:
    n_components: int = DEFAULT_GMM_COMPONENTS
    max_iterations: int = 100
    log_likelihood_tolerance: float = 1e-4
    variance_floor_factor: float = VARIANCE_FLOOR_FACTOR
    seed: int = 0
    block_size: int = DEFAULT_BLOCK_SIZE
    init_subsample: int = INIT_SUBSAMPLE

    def __post_init__(self):
        if self.n_components < 1:
            raise ConfigurationError("gmm.n_components must be at least 1")
        if self.max_iterations < 1:
            raise ConfigurationError("gmm.max_iterations must be at least 1")
        if not self.log_likelihood_tolerance > 0:
            raise ConfigurationError("gmm.log_likelihood_tolerance must be positive")
        if self.variance_floor_factor < 0:
            raise ConfigurationError("gmm.variance_floor_factor must be non-negative")
        if self.block_size < 1 or self.init_subsample < 1:
            raise ConfigurationError(
                "gmm.block_size and gmm.init_subsample must be positive"
            )

    @classmethod
    def from_mapping(cls, mapping: Optional[Mapping[str, Any]], **overrides):
        return build_config(cls, mapping, "gmm", **overrides)

    def to_dict(self) -> Dict[str, Any]:
        return asdict(self)


def _as_frames(frames: Frames) -> np.ndarray:
    x = frames.values if isinstance(frames, FeatureMatrix) else frames
    x = np.asarray(x, dtype=float)
    if x.ndim != 2:
        raise ValueError(f"frames must be 2-D, got shape {x.shape}")
    return x


def avg_log_likelihood(model: GmmModel, frames: Frames) -> float:
    """Mean per-frame log-likelihood in nats.

    Raises:
        DimensionMismatchError: feature dims differ from the model's
    """
    return float(np.mean(model.log_likelihoods(frames)))


def llr_score(bonafide_model: GmmModel, spoof_model: GmmModel, frames: Frames) -> float:
    """Bona fide minus spoof average log-likelihood; higher means bona fide."""
    return avg_log_likelihood(bonafide_model, frames) - avg_log_likelihood(
        spoof_model, frames
    )


def _initial_means(x: np.ndarray, cfg: TrainConfig) -> np.ndarray:
    """Seeded k-means++ centres over the sorted distinct frames.

    Working on distinct frames makes the seeding blind to frame replication.
    With fewer distinct frames than components, the surplus centres are
    jittered copies of distinct frames; EM and the empty-component rescue
    sort them out.
    """
    distinct = np.unique(x, axis=0)
    n_distinct = distinct.shape[0]
    rng = np.random.default_rng(cfg.seed)
    if n_distinct > cfg.init_subsample:
        pick = np.sort(rng.choice(n_distinct, cfg.init_subsample, replace=False))
        distinct = distinct[pick]
    n_seeded = min(cfg.n_components, distinct.shape[0])
    centres, _ = kmeans_plusplus(distinct, n_seeded, random_state=cfg.seed)
    if n_seeded == cfg.n_components:
        return centres

    logger.warning(
        f"Only {n_distinct} distinct frames for {cfg.n_components} components; "
        "seeding the rest from jittered copies",
        extra={"distinct_frames": n_distinct, "n_components": cfg.n_components},
    )
    scale = INIT_JITTER * np.sqrt(np.maximum(x.var(axis=0), MIN_VARIANCE))
    surplus = cfg.n_components - n_seeded
    copies = distinct[np.arange(surplus) % n_seeded]
    jitter = rng.normal(0.0, 1.0, copies.shape) * scale
    return np.vstack((centres, copies + jitter))


def _block_statistics(model: GmmModel, block: np.ndarray):
    log_prob = model.component_log_densities(block)
    frame_ll = logsumexp(log_prob, axis=1)
    resp = np.exp(log_prob - frame_ll[:, None])
    return (
        resp.sum(axis=0),
        resp.T @ block,
        resp.T @ (block**2),
        frame_ll,
    )


def _e_step(model: GmmModel, x: np.ndarray, block_size: int, max_workers: int):
    """Sufficient statistics accumulated in fixed block order."""
    starts = list(range(0, x.shape[0], block_size))
    parts = run_ordered(
        lambda s: _block_statistics(model, x[s : s + block_size]),
        starts,
        max_workers=max_workers,
        label=lambda s: f"frames[{s}:]",
    )
    mass = np.zeros(model.n_components)
    first = np.zeros_like(model.means)
    second = np.zeros_like(model.means)
    for n_k, s1, s2, _ in parts:
        mass += n_k
        first += s1
        second += s2
    frame_ll = np.concatenate([p[3] for p in parts])
    return mass, first, second, frame_ll


def _m_step(
    mass: np.ndarray,
    first: np.ndarray,
    second: np.ndarray,
    frame_ll: np.ndarray,
    x: np.ndarray,
    floor: np.ndarray,
) -> Tuple[GmmModel, List[int]]:
    n_frames = x.shape[0]
    empty = mass < EMPTY_COMPONENT_MASS * n_frames
    safe = np.where(empty, 1.0, mass)[:, None]
    means = first / safe
    variances = np.maximum(second / safe - means**2, floor)

    rescued = [int(k) for k in np.flatnonzero(empty)]
    if rescued:
        # reseed at the worst-explained frames, one distinct frame per component
        worst = np.argsort(frame_ll, kind="stable")
        for k, idx in zip(rescued, worst):
            means[k] = x[idx]
            variances[k] = np.maximum(np.var(x, axis=0), floor)
        mass = np.where(empty, 1.0, mass)
    weights = mass / mass.sum()
    return GmmModel(weights=weights, means=means, variances=variances), rescued


def train_em_with_log(
    frames: Frames, cfg: TrainConfig = TrainConfig(), max_workers: int = 1
) -> Tuple[GmmModel, List[float]]:
    """EM training returning the model and the per-iteration average
    log-likelihood history (one entry per evaluated model).

    Raises:
        TrainingError: fewer frames than components, non-finite features
    """
    x = _as_frames(frames)
    n_frames, dims = x.shape
    if dims < 1:
        raise TrainingError("features have no dimensions")
    if n_frames < cfg.n_components:
        raise TrainingError(
            f"{n_frames} frames is fewer than {cfg.n_components} components"
        )
    if not np.all(np.isfinite(x)):
        raise TrainingError("non-finite features in training data")

    # train on centred data; the shift is added back to the means at the end
    offset = x.mean(axis=0)
    xc = x - offset
    global_var = xc.var(axis=0)
    floor = np.maximum(cfg.variance_floor_factor * global_var, MIN_VARIANCE)

    means = _initial_means(xc, cfg)
    model = GmmModel(
        weights=np.full(cfg.n_components, 1.0 / cfg.n_components),
        means=means,
        variances=np.tile(np.maximum(global_var, floor), (cfg.n_components, 1)),
    )

    history: List[float] = []
    for iteration in range(cfg.max_iterations):
        mass, first, second, frame_ll = _e_step(model, xc, cfg.block_size, max_workers)
        ll = float(np.mean(frame_ll))
        if history and ll - history[-1] < cfg.log_likelihood_tolerance:
            history.append(ll)
            break
        history.append(ll)
        model, rescued = _m_step(mass, first, second, frame_ll, xc, floor)
        if rescued:
            logger.warning(
                f"Reseeded {len(rescued)} empty components at iteration {iteration}",
                extra={"iteration": iteration, "components": rescued},
            )
        logger.debug(
            f"EM iteration {iteration}: {ll:.6f} nats/frame",
            extra={"iteration": iteration, "log_likelihood": ll},
        )
    else:
        history.append(float(np.mean(model.log_likelihoods(xc))))

    result = GmmModel(
        weights=model.weights, means=model.means + offset, variances=model.variances
    )
    logger.info(
        f"Trained {cfg.n_components}-component GMM on {n_frames} frames "
        f"in {len(history) - 1} iterations",
        extra={
            "n_components": cfg.n_components,
            "frames": n_frames,
            "dims": dims,
            "log_likelihood": history[-1],
        },
    )
    return result, history


def train_em(
    frames: Frames, cfg: TrainConfig = TrainConfig(), max_workers: int = 1
) -> GmmModel:
    model, _ = train_em_with_log(frames, cfg, max_workers)
    return model
