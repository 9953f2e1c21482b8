"""End-to-end operations shared by the CLI and the HTTP service.

Everything here works on in-memory objects; the callers decide whether
inputs and outputs live in files (CLI) or request bodies (service).
"""

from __future__ import annotations

from dataclasses import dataclass

from .dataset import Dataset, fit_scaler, split_train_test, standardize_matrix
from .explain import ExplainConfig, Explanation, explain_instance
from .models import (
    ModelError,
    TrainReport,
    accuracy,
    logreg_loss,
    mlp_loss,
    svm_hinge_objective,
    train_logreg,
    train_mlp,
    train_svm,
    with_training_context,
)
from .synthgen import GeneratorParams, generate

TRAIN_REPORT_HEADER = "final_loss\ttrain_accuracy\ttest_accuracy\tepochs"


@dataclass(frozen=True)
class TrainResult:
    model: object
    report: TrainReport
    train: Dataset
    test: Dataset


def synthesize(n: int, seed: int, params: GeneratorParams | None = None) -> Dataset:
    return generate(n, seed, params)


def train_pipeline(
    ds: Dataset,
    kind: str,
    test_fraction: float = 0.5,
    split_seed: int = 0,
    train_seed: int = 0,
) -> TrainResult:
    """Split, standardize on the training side, train, evaluate.

    The returned model carries the scaler and the split bookkeeping
    (seed and test-member ids) so explanation runs can reconstruct the
    exact test set later.
    """
    train, test = split_train_test(ds, test_fraction, split_seed)
    scaler = fit_scaler(train)
    x_train = standardize_matrix(scaler, train.feature_matrix())
    y_train = train.outcome_vector()
    x_test = standardize_matrix(scaler, test.feature_matrix())
    y_test = test.outcome_vector()

    if kind == "logreg":
        model = train_logreg(x_train, y_train, seed=train_seed)
        final_loss = logreg_loss(model, x_train, y_train)
    elif kind == "svm":
        model = train_svm(x_train, y_train, seed=train_seed)
        final_loss = svm_hinge_objective(model, x_train, y_train)
    elif kind == "mlp":
        model = train_mlp(x_train, y_train, seed=train_seed)
        final_loss = mlp_loss(model, x_train, y_train)
    else:
        raise ModelError(f"unknown model kind '{kind}' (expected logreg, svm or mlp)")

    model = with_training_context(
        model, scaler, split_seed, tuple(rec.id for rec in test.records)
    )
    report = TrainReport(
        final_loss=final_loss,
        train_accuracy=accuracy(model, x_train, y_train),
        test_accuracy=accuracy(model, x_test, y_test),
        epochs=model.epochs_run,
    )
    return TrainResult(model=model, report=report, train=train, test=test)


def format_train_report(report: TrainReport) -> str:
    values = "\t".join(
        [
            format(report.final_loss, ".6g"),
            format(report.train_accuracy, ".6g"),
            format(report.test_accuracy, ".6g"),
            str(report.epochs),
        ]
    )
    return TRAIN_REPORT_HEADER + "\n" + values + "\n"


def evaluate_model(model, ds: Dataset) -> float:
    if model.scaler is None:
        raise ModelError("model carries no scaler; cannot standardize evaluation data")
    x = standardize_matrix(model.scaler, ds.feature_matrix())
    return accuracy(model, x, ds.outcome_vector())


def select_explain_ids(model, ds: Dataset, index: int | None, all_test: bool) -> list[int]:
    """Resolve which record ids to explain (one id, or the stored test split)."""
    if all_test:
        if model.test_ids is None:
            raise ModelError(
                "model file carries no test-split ids; retrain or pass an explicit index"
            )
        present = {rec.id for rec in ds.records}
        missing = [i for i in model.test_ids if i not in present]
        if missing:
            raise ModelError(f"test-split id {missing[0]} not present in the dataset")
        return list(model.test_ids)
    if index is None:
        raise ModelError("either an index or the test split must be requested")
    return [ds.record_by_id(index).id]


def explain_records(
    model, ds: Dataset, record_ids, cfg: ExplainConfig
) -> list[Explanation]:
    """Explain the given records; per-record seeds derive from cfg.seed + id."""
    if model.scaler is None:
        raise ModelError("model carries no scaler; cannot explain raw instances")
    out = []
    for rec_id in record_ids:
        rec = ds.record_by_id(rec_id)
        out.append(
            explain_instance(model, rec.features, model.scaler, cfg, instance_id=rec.id)
        )
    return out
