"""Local surrogate explanations for black-box prospect classifiers.

For one queried prospect the engine perturbs the instance in
standardized feature space, weighs each perturbation by an exponential
proximity kernel, queries the black box for its success probability,
and fits a sparse weighted linear surrogate. The surrogate's
coefficients are the explanation: per-feature local influence on the
predicted probability.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import FEATURE_NAMES, N_FEATURES, Scaler, apply_scaler
from .linsolve import WeightedProblem, weighted_lasso_cd
from .rng import Xoshiro256PP

_MASK64 = (1 << 64) - 1

# Kernel width convention: the squared distance is divided by sigma
# itself (not sigma^2), so the customary width 0.75*sqrt(d) becomes
# sigma = (0.75)^2 * d.
DEFAULT_SIGMA = 0.5625 * N_FEATURES
DEFAULT_N_SAMPLES = 5000
DEFAULT_L1 = 0.001


class ExplainError(ValueError):
    """Raised for invalid explanation inputs or black-box misbehavior."""


@dataclass(frozen=True)
class ExplainConfig:
    """Sampling size, kernel width, L1 strength and base seed.

    n_samples counts the queried instance itself (row 0), so 1 is the
    degenerate minimum; anything below a few thousand gives noisy
    weights. sigma and l1 defaults are workbench conventions, not values
    taken from any particular study.
    """

    n_samples: int = DEFAULT_N_SAMPLES
    sigma: float = DEFAULT_SIGMA
    l1: float = DEFAULT_L1
    seed: int = 0

    def __post_init__(self):
        if self.n_samples < 1:
            raise ExplainError(f"n_samples must be at least 1, got {self.n_samples}")
        if not (math.isfinite(self.sigma) and self.sigma > 0.0):
            raise ExplainError(f"sigma must be a positive real, got {self.sigma}")
        if not (math.isfinite(self.l1) and self.l1 >= 0.0):
            raise ExplainError(f"l1 must be a non-negative real, got {self.l1}")


@dataclass(frozen=True, eq=False)
class Neighborhood:
    """Sampled points around one instance (row 0 is the instance itself),
    their proximity weights and the black box's outputs."""

    samples: np.ndarray
    proximity: np.ndarray
    f_values: np.ndarray

    def __post_init__(self):
        n = self.samples.shape[0]
        if self.samples.ndim != 2 or self.samples.shape[1] != N_FEATURES or n < 1:
            raise ExplainError(f"samples must be (n, {N_FEATURES}), got {self.samples.shape}")
        if self.proximity.shape != (n,) or self.f_values.shape != (n,):
            raise ExplainError("proximity and f_values must match the sample count")
        if self.proximity[0] != 1.0:
            raise ExplainError("the queried instance must carry proximity exactly 1")
        if not ((self.proximity > 0.0) & (self.proximity <= 1.0)).all():
            raise ExplainError("proximity weights must lie in (0, 1]")
        if not ((self.f_values >= 0.0) & (self.f_values <= 1.0)).all():
            raise ExplainError("black-box outputs must lie in [0, 1]")

    def __len__(self) -> int:
        return self.samples.shape[0]


@dataclass(frozen=True)
class Explanation:
    """Fitted surrogate for one instance.

    weights/raw_values follow schema order; fidelity is the proximity-
    weighted squared error of the surrogate against the black box over
    the neighborhood (the L1 penalty is not included).
    """

    instance_id: int
    predicted_probability: float
    feature_names: tuple[str, ...]
    raw_values: tuple[float, ...]
    weights: tuple[float, ...]
    intercept: float
    fidelity: float
    converged: bool
    config: ExplainConfig = field(default_factory=ExplainConfig)

    def __post_init__(self):
        if (
            len(self.feature_names) != N_FEATURES
            or len(self.raw_values) != N_FEATURES
            or len(self.weights) != N_FEATURES
        ):
            raise ExplainError("explanation must carry exactly 6 feature triples")
        if tuple(self.feature_names) != FEATURE_NAMES:
            raise ExplainError("explanation features must follow schema order")
        if not self.fidelity >= 0.0:
            raise ExplainError(f"fidelity must be non-negative, got {self.fidelity}")

    @property
    def triples(self) -> tuple[tuple[str, float, float], ...]:
        """(name, raw value, weight) per feature, in schema order."""
        return tuple(zip(self.feature_names, self.raw_values, self.weights))


def proximity_weight(x, z, sigma: float) -> float:
    """Exponential proximity kernel exp(-||x - z||^2 / sigma), in (0, 1]."""
    if not (math.isfinite(sigma) and sigma > 0.0):
        raise ExplainError(f"sigma must be a positive real, got {sigma}")
    xa = np.asarray(x, dtype=np.float64)
    za = np.asarray(z, dtype=np.float64)
    if xa.shape != za.shape:
        raise ExplainError(f"shape mismatch: {xa.shape} vs {za.shape}")
    if not (np.isfinite(xa).all() and np.isfinite(za).all()):
        raise ExplainError("non-finite input to proximity kernel")
    diff = xa - za
    return math.exp(-float(diff @ diff) / sigma)


def _query_black_box(model, samples: np.ndarray) -> np.ndarray:
    batch = getattr(model, "predict_proba_batch", None)
    if batch is not None:
        values = np.asarray(batch(samples), dtype=np.float64)
    else:
        values = np.array([model.predict_proba(row) for row in samples], dtype=np.float64)
    if values.shape != (samples.shape[0],):
        raise ExplainError(f"black box returned shape {values.shape} for {samples.shape[0]} rows")
    bad = ~np.isfinite(values)
    if bad.any():
        raise ExplainError(f"black box returned a non-finite value at row {int(np.argmax(bad))}")
    outside = (values < 0.0) | (values > 1.0)
    if outside.any():
        row = int(np.argmax(outside))
        raise ExplainError(f"black box returned {values[row]} at row {row}, outside [0, 1]")
    return values


def sample_neighborhood(x, model, cfg: ExplainConfig) -> Neighborhood:
    """Perturb x with unit Gaussian noise per standardized coordinate.

    Row 0 is x itself. Unit variance equals the training data's scale in
    standardized space, so the neighborhood is one "feature scale" wide.
    Deterministic for a fixed cfg.seed.
    """
    xa = np.asarray(x, dtype=np.float64)
    if xa.shape != (N_FEATURES,):
        raise ExplainError(f"expected a length-{N_FEATURES} vector, got shape {xa.shape}")
    if not np.isfinite(xa).all():
        raise ExplainError("non-finite instance coordinates")
    n = cfg.n_samples
    samples = np.empty((n, N_FEATURES))
    samples[0] = xa
    if n > 1:
        rng = Xoshiro256PP(cfg.seed)
        noise = rng.normals((n - 1) * N_FEATURES).reshape(n - 1, N_FEATURES)
        samples[1:] = xa + noise
    sq_dist = ((samples - xa) ** 2).sum(axis=1)
    proximity = np.exp(-sq_dist / cfg.sigma)
    f_values = _query_black_box(model, samples)
    return Neighborhood(samples=samples, proximity=proximity, f_values=f_values)


def fidelity_loss(neighborhood: Neighborhood, g_values) -> float:
    """Proximity-weighted squared error between black box and surrogate."""
    g = np.asarray(g_values, dtype=np.float64)
    if g.shape != neighborhood.f_values.shape:
        raise ExplainError(
            f"surrogate values shape {g.shape} does not match neighborhood size {len(neighborhood)}"
        )
    diff = neighborhood.f_values - g
    return float(neighborhood.proximity @ (diff * diff))


def explain_instance(
    model,
    x_raw,
    scaler: Scaler,
    cfg: ExplainConfig | None = None,
    instance_id: int = 0,
) -> Explanation:
    """Full explanation pipeline for one raw-feature instance.

    The effective sampling seed is cfg.seed + instance_id (mod 2^64), so
    batches of explanations are reproducible regardless of the order the
    instances are processed in.
    """
    if cfg is None:
        cfg = ExplainConfig()
    raw = np.asarray(x_raw, dtype=np.float64)
    if raw.shape != (N_FEATURES,):
        raise ExplainError(f"expected a length-{N_FEATURES} raw vector, got shape {raw.shape}")
    if not np.isfinite(raw).all():
        raise ExplainError("non-finite raw feature value")
    if ((raw < 0.0) | (raw > 1.0)).any():
        raise ExplainError("raw feature values must lie in [0, 1]")
    model_scaler = getattr(model, "scaler", None)
    if model_scaler is not None and model_scaler != scaler:
        raise ExplainError("scaler does not match the scaler stored with the model")

    x_std = apply_scaler(scaler, raw)
    job_cfg = replace(cfg, seed=(cfg.seed + instance_id) & _MASK64)
    neighborhood = sample_neighborhood(x_std, model, job_cfg)
    problem = WeightedProblem(
        design=neighborhood.samples,
        targets=neighborhood.f_values,
        sample_weights=neighborhood.proximity,
        l1=cfg.l1,
    )
    fit = weighted_lasso_cd(problem)
    coef = np.asarray(fit.coefficients)
    surrogate = neighborhood.samples @ coef + fit.intercept
    return Explanation(
        instance_id=instance_id,
        predicted_probability=float(neighborhood.f_values[0]),
        feature_names=FEATURE_NAMES,
        raw_values=tuple(float(v) for v in raw),
        weights=fit.coefficients,
        intercept=fit.intercept,
        fidelity=fidelity_loss(neighborhood, surrogate),
        converged=fit.converged,
        config=cfg,
    )
