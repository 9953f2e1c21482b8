"""Synthetic prospect generator with planted feature importance.

Stands in for confidential drilled-prospect data: each class draws its
six scores from independent truncated normals on [0, 1], parameterized
so that `dhi_index` and `final_pg` separate the classes strongly while
the three data-quality scores barely do. Qualitative analyses run on
this data therefore show the same dominant-feature structure a real
risking dataset exhibits.
"""

from __future__ import annotations

from dataclasses import dataclass, field

from .dataset import FEATURE_NAMES, N_FEATURES, Dataset, ProspectRecord, make_dataset
from .rng import Xoshiro256PP

# (class-1 mean, class-0 mean, shared std) per feature.
DEFAULT_FEATURE_PARAMS = {
    "initial_pg": (0.45, 0.35, 0.15),
    "dhi_index": (0.65, 0.35, 0.12),
    "final_pg": (0.60, 0.30, 0.12),
    "data_quality_1": (0.55, 0.45, 0.20),
    "data_quality_2": (0.55, 0.45, 0.20),
    "data_quality_3": (0.55, 0.45, 0.20),
}
DEFAULT_PRIOR = 0.5

_MAX_REJECTIONS = 10_000


class GeneratorError(ValueError):
    """Raised for invalid generator parameters."""


@dataclass(frozen=True)
class FeatureParams:
    """Class-conditional truncated-normal parameters for one feature."""

    mean_success: float
    mean_failure: float
    std: float

    def __post_init__(self):
        for label, mean in (("success", self.mean_success), ("failure", self.mean_failure)):
            if not 0.0 < mean < 1.0:
                raise GeneratorError(f"{label} mean must be in (0, 1), got {mean}")
        if not 0.0 < self.std <= 0.5:
            raise GeneratorError(f"std must be in (0, 0.5], got {self.std}")


@dataclass(frozen=True)
class GeneratorParams:
    """Full parameter table: per-feature distributions plus class prior.

    The class balance of the original prospect population is unknown, so
    the prior defaults to 0.5; treat that as an assumption, not a fact.
    """

    features: tuple[FeatureParams, ...] = field(
        default_factory=lambda: tuple(
            FeatureParams(*DEFAULT_FEATURE_PARAMS[name]) for name in FEATURE_NAMES
        )
    )
    prior: float = DEFAULT_PRIOR

    def __post_init__(self):
        if len(self.features) != N_FEATURES:
            raise GeneratorError(
                f"expected {N_FEATURES} feature parameter entries, got {len(self.features)}"
            )
        if not 0.0 < self.prior < 1.0:
            raise GeneratorError(f"class-1 prior must be in (0, 1), got {self.prior}")

    def with_feature(self, name: str, params: FeatureParams) -> "GeneratorParams":
        idx = FEATURE_NAMES.index(name)
        feats = list(self.features)
        feats[idx] = params
        return GeneratorParams(features=tuple(feats), prior=self.prior)


def default_params() -> GeneratorParams:
    return GeneratorParams()


def truncated_normal_sample(
    mean: float, std: float, lo: float, hi: float, rng: Xoshiro256PP
) -> float:
    """Normal(mean, std^2) draw restricted to [lo, hi] by rejection.

    Requires lo < hi and an interval with non-negligible mass; under the
    generator's parameter constraints acceptance is always bounded away
    from zero.
    """
    if not lo < hi:
        raise GeneratorError(f"need lo < hi, got [{lo}, {hi}]")
    for _ in range(_MAX_REJECTIONS):
        value = mean + std * rng.normal()
        if lo <= value <= hi:
            return value
    raise RuntimeError(
        f"truncated normal rejection did not accept within {_MAX_REJECTIONS} draws"
    )


def generate(n: int, seed: int, params: GeneratorParams | None = None) -> Dataset:
    """n synthetic prospects, ids 0..n-1, deterministic in (n, seed, params).

    Per record: the class is Bernoulli(prior), then each feature is drawn
    from its class-conditional truncated normal on [0, 1], in schema order.
    """
    if n < 2:
        raise GeneratorError(f"need n >= 2, got {n}")
    if params is None:
        params = GeneratorParams()
    rng = Xoshiro256PP(seed)
    records = []
    for rec_id in range(n):
        outcome = 1 if rng.uniform() < params.prior else 0
        values = []
        for fp in params.features:
            mean = fp.mean_success if outcome == 1 else fp.mean_failure
            values.append(truncated_normal_sample(mean, fp.std, 0.0, 1.0, rng))
        records.append(
            ProspectRecord(id=rec_id, features=tuple(values), outcome=outcome)
        )
    return make_dataset(records)
