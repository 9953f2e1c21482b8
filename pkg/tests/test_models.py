"""Classifier tests: training behavior, gradients, calibration, persistence."""

import dataclasses
import math

import numpy as np
import pytest

from prospect_explain.dataset import Scaler
from prospect_explain.models import (
    LogRegModel,
    MlpModel,
    ModelError,
    ModelIOError,
    SvmModel,
    TrainReport,
    _descend,
    _fit_logistic,
    _logistic_loss_grads,
    accuracy,
    load_model,
    logreg_gradient,
    logreg_loss,
    mlp_gradient,
    mlp_loss,
    model_to_text,
    parse_model,
    save_model,
    train_logreg,
    train_mlp,
    train_svm,
)
from prospect_explain.rng import Xoshiro256PP

SCALER = Scaler(means=(0.5,) * 6, stds=(0.1,) * 6)


def _separable_two_points():
    x = np.array([[1.0] * 6, [-1.0] * 6])
    y = np.array([1.0, 0.0])
    return x, y


def _random_batch(seed, n=40):
    rng = np.random.default_rng(seed)
    x = rng.standard_normal((n, 6))
    y = (rng.random(n) < 0.5).astype(np.float64)
    if y.min() == y.max():
        y[0] = 1.0 - y[0]
    return x, y


def _rel_err(a, f):
    scale = max(abs(a), abs(f))
    if scale < 1e-10:
        return abs(a - f)
    return abs(a - f) / scale


# ---------------------------------------------------------------------------
# Logistic regression
# ---------------------------------------------------------------------------

def test_logreg_separable_two_points():
    x, y = _separable_two_points()
    model = train_logreg(x, y)
    assert accuracy(model, x, y) == 1.0


def test_logreg_label_flip_negates_parameters():
    x, y = _random_batch(1)
    a = train_logreg(x, y)
    b = train_logreg(x, 1.0 - y)
    np.testing.assert_allclose(b.weights, -a.weights, atol=1e-10)
    assert b.bias == pytest.approx(-a.bias, abs=1e-10)


def test_logreg_rejects_single_class():
    x = np.ones((4, 6))
    with pytest.raises(ModelError, match="both classes"):
        train_logreg(x, np.ones(4))


def test_logreg_training_loss_non_increasing():
    x, y = _random_batch(3, n=60)
    _, _, history = _descend(
        [np.zeros(6), np.zeros(1)], _logistic_loss_grads(x, y, 1e-3), 0.1, 300
    )
    assert len(history) >= 2
    assert (np.diff(history) <= 0.0).all()


def test_logreg_synthetic_test_accuracy(pipelines):
    assert pipelines["logreg"].report.test_accuracy >= 0.85


def test_logreg_gradient_balanced_mirrored_batch():
    x = np.vstack([np.eye(6), -np.eye(6)])
    y = np.array([1.0] * 6 + [0.0] * 6)
    model = LogRegModel(weights=np.zeros(6), bias=0.0)
    _, grad_b = logreg_gradient(model, x, y)
    assert grad_b == pytest.approx(0.0, abs=1e-15)


def test_logreg_gradient_single_example():
    model = LogRegModel(weights=np.zeros(6), bias=0.0)
    _, grad_b = logreg_gradient(model, np.full((1, 6), 0.3), np.array([1.0]))
    assert grad_b == pytest.approx(-0.5, abs=1e-15)


def test_logreg_gradient_empty_batch_rejected():
    model = LogRegModel(weights=np.zeros(6), bias=0.0)
    with pytest.raises(ModelError, match="empty"):
        logreg_gradient(model, np.empty((0, 6)), np.empty(0))


def test_logreg_gradient_matches_finite_differences():
    rng = np.random.default_rng(5)
    x, y = _random_batch(6, n=25)
    h = 1e-5
    for _ in range(10):
        model = LogRegModel(weights=rng.standard_normal(6), bias=float(rng.standard_normal()))
        grad_w, grad_b = logreg_gradient(model, x, y)
        for j in range(6):
            bump = np.zeros(6)
            bump[j] = h
            up = logreg_loss(dataclasses.replace(model, weights=model.weights + bump), x, y)
            down = logreg_loss(dataclasses.replace(model, weights=model.weights - bump), x, y)
            assert _rel_err(grad_w[j], (up - down) / (2 * h)) < 1e-6
        up = logreg_loss(dataclasses.replace(model, bias=model.bias + h), x, y)
        down = logreg_loss(dataclasses.replace(model, bias=model.bias - h), x, y)
        assert _rel_err(grad_b, (up - down) / (2 * h)) < 1e-6


def test_logreg_prediction_monotone_in_positive_weight():
    model = LogRegModel(weights=np.array([0.8, 0.2, 1.5, 0.1, 0.3, 0.05]), bias=-0.2)
    x = np.full(6, 0.1)
    previous = model.predict_proba(x)
    for delta in (0.5, 1.0, 2.0):
        bumped = x.copy()
        bumped[2] = x[2] + delta
        current = model.predict_proba(bumped)
        assert current > previous
        previous = current


# ---------------------------------------------------------------------------
# predict_proba contract
# ---------------------------------------------------------------------------

def test_predict_proba_zero_weights_is_half():
    model = LogRegModel(weights=np.zeros(6), bias=0.0)
    assert model.predict_proba(np.array([0.3, -2.0, 9.0, 0.0, 1.0, -1.0])) == 0.5


def test_predict_proba_log3_is_three_quarters():
    model = LogRegModel(weights=np.array([1.0, 0, 0, 0, 0, 0]), bias=0.0)
    x = np.array([math.log(3.0), 0, 0, 0, 0, 0])
    assert model.predict_proba(x) == pytest.approx(0.75, rel=1e-12)


def test_predict_proba_rejects_bad_input():
    model = LogRegModel(weights=np.zeros(6), bias=0.0)
    with pytest.raises(ModelError):
        model.predict_proba([0.1, 0.2])
    with pytest.raises(ModelError):
        model.predict_proba([np.inf] * 6)


def test_mlp_outputs_stay_in_open_interval():
    x, y = _random_batch(8, n=30)
    model = train_mlp(x, y, epochs=50, seed=0)
    probes = np.random.default_rng(9).standard_normal((10_000, 6)) * 3.0
    p = model.predict_proba_batch(probes)
    assert ((p > 0.0) & (p < 1.0)).all()


def test_scalar_and_batch_queries_agree():
    # single-row and n-row matmuls may take different BLAS kernels, so
    # agreement is to the last ulp rather than bit-exact
    x, y = _random_batch(10, n=30)
    for model in (train_logreg(x, y, epochs=50), train_svm(x, y, epochs=20, seed=1),
                  train_mlp(x, y, epochs=50, seed=2)):
        probes = np.random.default_rng(11).standard_normal((25, 6))
        batch = model.predict_proba_batch(probes)
        scalar = np.array([model.predict_proba(row) for row in probes])
        np.testing.assert_allclose(batch, scalar, rtol=1e-12, atol=1e-15)


# ---------------------------------------------------------------------------
# SVM
# ---------------------------------------------------------------------------

def test_svm_separable_two_points():
    x, y = _separable_two_points()
    model = train_svm(x, y, seed=3)
    assert accuracy(model, x, y) == 1.0
    signs = 2.0 * y - 1.0
    hinge = np.maximum(0.0, 1.0 - signs * (x @ model.weights + model.bias))
    assert hinge.mean() < 0.05


def test_svm_deterministic():
    x, y = _random_batch(12, n=50)
    a = train_svm(x, y, seed=9)
    b = train_svm(x, y, seed=9)
    np.testing.assert_array_equal(a.weights, b.weights)
    assert (a.bias, a.platt_a, a.platt_b) == (b.bias, b.platt_a, b.platt_b)


def test_platt_slope_non_negative_and_symmetric_midpoint():
    margins = np.array([0.5, 1.0, 1.5, 2.0, -0.5, -1.0, -1.5, -2.0])
    labels = np.array([1.0, 1.0, 1.0, 1.0, 0.0, 0.0, 0.0, 0.0])
    a, b, _, _ = _fit_logistic(margins[:, None], labels, np.array([1.0]), 0.0, 0.1, 2000, 1e-3)
    assert a[0] > 0.0
    midpoint = 1.0 / (1.0 + math.exp(-b))
    assert midpoint == pytest.approx(0.5, abs=0.05)


def test_platt_preserves_margin_ranking(pipelines, default_dataset):
    model = pipelines["svm"].model
    from prospect_explain.dataset import standardize_matrix

    x = standardize_matrix(model.scaler, default_dataset.feature_matrix())
    margins = x @ model.weights + model.bias
    probabilities = model.predict_proba_batch(x)
    assert (np.argsort(margins) == np.argsort(probabilities)).all()
    assert model.platt_a > 0.0


def test_svm_decision_follows_margin_sign():
    model = SvmModel(
        weights=np.array([1.0, 0, 0, 0, 0, 0]), bias=-0.5, platt_a=2.0, platt_b=0.1
    )
    assert model.decision(np.array([1.0, 0, 0, 0, 0, 0])) == 1
    assert model.decision(np.array([0.4, 0, 0, 0, 0, 0])) == 0


def test_svm_synthetic_test_accuracy(pipelines):
    assert pipelines["svm"].report.test_accuracy >= 0.85


# ---------------------------------------------------------------------------
# MLP
# ---------------------------------------------------------------------------

def test_mlp_learns_xor_within_five_seeds():
    x = np.array(
        [
            [1.0, 1.0, 0, 0, 0, 0],
            [1.0, -1.0, 0, 0, 0, 0],
            [-1.0, 1.0, 0, 0, 0, 0],
            [-1.0, -1.0, 0, 0, 0, 0],
        ]
    )
    y = np.array([0.0, 1.0, 1.0, 0.0])
    solved = False
    for seed in range(5):
        model = train_mlp(x, y, epochs=5000, seed=seed)
        if accuracy(model, x, y) == 1.0:
            solved = True
            break
    assert solved


def test_mlp_deterministic():
    x, y = _random_batch(14, n=40)
    a = train_mlp(x, y, epochs=100, seed=21)
    b = train_mlp(x, y, epochs=100, seed=21)
    np.testing.assert_array_equal(a.hidden_w, b.hidden_w)
    np.testing.assert_array_equal(a.out_w, b.out_w)
    assert a.out_b == b.out_b


def test_mlp_init_respects_fan_in_bounds():
    x, y = _random_batch(15, n=20)
    model = train_mlp(x, y, epochs=0, seed=4, hidden=8)
    assert np.abs(model.hidden_w).max() <= 1.0 / math.sqrt(6)
    assert np.abs(model.out_w).max() <= 1.0 / math.sqrt(8)


def test_mlp_gradient_matches_finite_differences():
    rng = Xoshiro256PP(33)
    x, y = _random_batch(16, n=15)
    h = 1e-5
    for trial in range(10):
        model = train_mlp(x, y, epochs=0, hidden=4, seed=trial)  # random init only
        grads = mlp_gradient(model, x, y)
        arrays = {
            "hidden_w": (model.hidden_w, grads[0]),
            "hidden_b": (model.hidden_b, grads[1]),
            "out_w": (model.out_w, grads[2]),
        }
        for name, (value, grad) in arrays.items():
            flat_idx = rng.randint_below(value.size)
            bump = np.zeros_like(value).reshape(-1)
            bump[flat_idx] = h
            bump = bump.reshape(value.shape)
            up = mlp_loss(dataclasses.replace(model, **{name: value + bump}), x, y)
            down = mlp_loss(dataclasses.replace(model, **{name: value - bump}), x, y)
            fd = (up - down) / (2 * h)
            assert _rel_err(grad.reshape(-1)[flat_idx], fd) < 1e-5
        up = mlp_loss(dataclasses.replace(model, out_b=model.out_b + h), x, y)
        down = mlp_loss(dataclasses.replace(model, out_b=model.out_b - h), x, y)
        assert _rel_err(grads[3], (up - down) / (2 * h)) < 1e-5


def test_mlp_synthetic_test_accuracy(pipelines):
    assert pipelines["mlp"].report.test_accuracy >= 0.85


# ---------------------------------------------------------------------------
# accuracy
# ---------------------------------------------------------------------------

class _Constant:
    def __init__(self, value):
        self.value = value

    def predict_proba_batch(self, x):
        return np.full(x.shape[0], self.value)


def test_accuracy_constant_models():
    x = np.zeros((10, 6))
    assert accuracy(_Constant(0.9), x, np.ones(10)) == 1.0
    y_half = np.array([1.0] * 5 + [0.0] * 5)
    # exact 0.5 counts as class 1, so only the positive half is right
    assert accuracy(_Constant(0.5), x, y_half) == 0.5


def test_accuracy_empty_rejected():
    with pytest.raises(ModelError, match="empty"):
        accuracy(_Constant(0.9), np.empty((0, 6)), np.empty(0))


def test_train_report_validates_accuracies():
    with pytest.raises(ModelError):
        TrainReport(final_loss=0.1, train_accuracy=1.2, test_accuracy=0.5, epochs=10)


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def _models_with_scaler():
    x, y = _random_batch(17, n=40)
    trained = [
        train_logreg(x, y, epochs=80),
        train_svm(x, y, epochs=30, seed=5),
        train_mlp(x, y, epochs=80, seed=6),
    ]
    return [
        dataclasses.replace(m, scaler=SCALER, split_seed=42, test_ids=(1, 3, 5))
        for m in trained
    ]


@pytest.mark.parametrize("idx", [0, 1, 2], ids=["logreg", "svm", "mlp"])
def test_save_load_save_byte_identical(tmp_path, idx):
    model = _models_with_scaler()[idx]
    first = model_to_text(model)
    path = str(tmp_path / "model.txt")
    save_model(model, path)
    loaded = load_model(path)
    assert model_to_text(loaded) == first
    assert loaded.scaler == SCALER
    assert loaded.split_seed == 42 and loaded.test_ids == (1, 3, 5)


@pytest.mark.parametrize("idx", [0, 1, 2], ids=["logreg", "svm", "mlp"])
def test_loaded_model_predicts_identically(idx):
    model = _models_with_scaler()[idx]
    loaded = parse_model(model_to_text(model))
    probes = np.random.default_rng(19).standard_normal((100, 6))
    np.testing.assert_array_equal(
        model.predict_proba_batch(probes), loaded.predict_proba_batch(probes)
    )


def test_truncated_file_names_missing_section():
    model = _models_with_scaler()[0]
    text = model_to_text(model)
    truncated = text[: text.index("bias:")]
    with pytest.raises(ModelIOError, match="missing section 'bias'"):
        parse_model(truncated)


def test_model_io_error_cases():
    model = _models_with_scaler()[0]
    text = model_to_text(model)
    with pytest.raises(ModelIOError, match="version"):
        parse_model(text.replace(" v1 ", " v9 "))
    with pytest.raises(ModelIOError, match="kind"):
        parse_model(text.replace(" logreg", " forest"))
    bias_value = text.split("bias:\n")[1].split("\n")[0]
    with pytest.raises(ModelIOError, match="non-numeric"):
        parse_model(text.replace(bias_value, "oops", 1))
    wrong_count = text.replace("weights:\n", "weights:\n0.5 0.5\n", 1)
    with pytest.raises(ModelIOError):
        parse_model(wrong_count)
    with pytest.raises(ModelIOError, match="header"):
        parse_model("something else\n")


def test_save_requires_scaler(tmp_path):
    x, y = _random_batch(20, n=20)
    bare = train_logreg(x, y, epochs=10)
    with pytest.raises(ModelIOError, match="scaler"):
        save_model(bare, str(tmp_path / "x.txt"))
