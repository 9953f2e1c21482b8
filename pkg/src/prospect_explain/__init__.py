"""prospect-explain: a hydrocarbon-prospect risking workbench.

Generates synthetic prospect data, trains three from-scratch classifier
families, and explains individual predictions with locally weighted
sparse linear surrogates. See the CLI (`prospect-explain`) and the HTTP
service (`prospect_explain.service`) for the two front ends.
"""

__version__ = "0.1.0"

from .dataset import (
    FEATURE_NAMES,
    ClassStats,
    Dataset,
    DatasetError,
    FeatureSchema,
    ProspectRecord,
    Scaler,
    apply_scaler,
    class_feature_stats,
    fit_scaler,
    load_dataset,
    save_dataset,
    split_train_test,
)
from .explain import (
    ExplainConfig,
    Explanation,
    Neighborhood,
    explain_instance,
    fidelity_loss,
    proximity_weight,
    sample_neighborhood,
)
from .linsolve import LinearFit, WeightedProblem, weighted_lasso_cd, weighted_ols_oracle
from .models import (
    LogRegModel,
    MlpModel,
    SvmModel,
    TrainReport,
    accuracy,
    load_model,
    save_model,
    train_logreg,
    train_mlp,
    train_svm,
)
from .synthgen import GeneratorParams, generate, truncated_normal_sample

__all__ = [
    "__version__",
    "FEATURE_NAMES",
    "ClassStats",
    "Dataset",
    "DatasetError",
    "FeatureSchema",
    "ProspectRecord",
    "Scaler",
    "apply_scaler",
    "class_feature_stats",
    "fit_scaler",
    "load_dataset",
    "save_dataset",
    "split_train_test",
    "ExplainConfig",
    "Explanation",
    "Neighborhood",
    "explain_instance",
    "fidelity_loss",
    "proximity_weight",
    "sample_neighborhood",
    "LinearFit",
    "WeightedProblem",
    "weighted_lasso_cd",
    "weighted_ols_oracle",
    "LogRegModel",
    "MlpModel",
    "SvmModel",
    "TrainReport",
    "accuracy",
    "load_model",
    "save_model",
    "train_logreg",
    "train_mlp",
    "train_svm",
    "GeneratorParams",
    "generate",
    "truncated_normal_sample",
]
