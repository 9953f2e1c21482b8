"""Black-box classifier families: logistic regression, linear SVM, MLP.

All three train on standardized features and expose probability-of-
success queries. Trained models are immutable and safe for unlimited
concurrent readers. Persistence uses a line-oriented text format with
17-significant-digit decimals so parameters round-trip bit-exactly.
"""

from __future__ import annotations

import math
import os
from dataclasses import dataclass, field, replace

import numpy as np

from .dataset import N_FEATURES, Scaler
from .rng import Xoshiro256PP

MODEL_MAGIC = "prospect-explain-model"
MODEL_VERSION = "v1"
MODEL_KINDS = ("logreg", "svm", "mlp")

_GRAD_TOL = 1e-8
_MAX_HALVINGS = 30


class ModelError(ValueError):
    """Raised for invalid training inputs or degenerate training runs."""


class ModelIOError(ValueError):
    """Raised for malformed model files."""


def _fmt(value: float) -> str:
    return format(value, ".17g")


def sigmoid(z):
    """Numerically stable logistic function (scalar or array)."""
    z = np.asarray(z, dtype=np.float64)
    out = np.empty_like(z)
    pos = z >= 0
    out[pos] = 1.0 / (1.0 + np.exp(-z[pos]))
    ez = np.exp(z[~pos])
    out[~pos] = ez / (1.0 + ez)
    return out


def _mean_cross_entropy(logits: np.ndarray, y: np.ndarray) -> float:
    # softplus(z) - y*z, evaluated without overflow
    return float(np.mean(np.logaddexp(0.0, logits) - y * logits))


def _check_vector(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.shape != (N_FEATURES,):
        raise ModelError(f"expected a length-{N_FEATURES} feature vector, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ModelError("non-finite value in feature vector")
    return arr


def _check_matrix(x) -> np.ndarray:
    arr = np.asarray(x, dtype=np.float64)
    if arr.ndim != 2 or arr.shape[1] != N_FEATURES:
        raise ModelError(f"expected an (n, {N_FEATURES}) matrix, got shape {arr.shape}")
    if not np.isfinite(arr).all():
        raise ModelError("non-finite value in feature matrix")
    return arr


def _check_training_inputs(x: np.ndarray, y: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    x = _check_matrix(x)
    y = np.asarray(y, dtype=np.float64)
    if y.shape != (x.shape[0],):
        raise ModelError(f"labels shape {y.shape} does not match {x.shape[0]} rows")
    if not np.isin(y, (0.0, 1.0)).all():
        raise ModelError("labels must be 0 or 1")
    if y.min() == y.max():
        raise ModelError("training data must contain both classes")
    return x, y


class _ProbabilityModel:
    """Shared probability-query surface; subclasses provide `_raw_batch`."""

    def predict_proba(self, x) -> float:
        return float(self.predict_proba_batch(_check_vector(x)[None, :])[0])

    def predict_proba_batch(self, x) -> np.ndarray:
        return self._raw_batch(_check_matrix(x))


@dataclass(frozen=True, eq=False)
class LogRegModel(_ProbabilityModel):
    """sigma(w.x + b) with the hyperparameters it was trained under."""

    weights: np.ndarray
    bias: float
    lr: float = 0.1
    epochs: int = 2000
    l2: float = 1e-3
    epochs_run: int = 0
    scaler: Scaler | None = None
    split_seed: int | None = None
    test_ids: tuple[int, ...] | None = None

    kind = "logreg"

    def _raw_batch(self, x: np.ndarray) -> np.ndarray:
        return sigmoid(x @ self.weights + self.bias)


@dataclass(frozen=True, eq=False)
class SvmModel(_ProbabilityModel):
    """Linear SVM with a Platt map sigma(A*m + B) over the margin m."""

    weights: np.ndarray
    bias: float
    platt_a: float
    platt_b: float
    lambda_reg: float = 0.01
    epochs_run: int = 0
    scaler: Scaler | None = None
    split_seed: int | None = None
    test_ids: tuple[int, ...] | None = None

    kind = "svm"

    def margin(self, x) -> float:
        return float(_check_vector(x) @ self.weights + self.bias)

    def decision(self, x) -> int:
        """Raw SVM label from the margin sign (1 iff margin >= 0)."""
        return 1 if self.margin(x) >= 0.0 else 0

    def _raw_batch(self, x: np.ndarray) -> np.ndarray:
        margins = x @ self.weights + self.bias
        return sigmoid(self.platt_a * margins + self.platt_b)


@dataclass(frozen=True, eq=False)
class MlpModel(_ProbabilityModel):
    """One tanh hidden layer into a sigmoid output unit."""

    hidden_w: np.ndarray
    hidden_b: np.ndarray
    out_w: np.ndarray
    out_b: float
    epochs_run: int = 0
    scaler: Scaler | None = None
    split_seed: int | None = None
    test_ids: tuple[int, ...] | None = None

    kind = "mlp"

    def _raw_batch(self, x: np.ndarray) -> np.ndarray:
        hidden = np.tanh(x @ self.hidden_w.T + self.hidden_b)
        return sigmoid(hidden @ self.out_w + self.out_b)


@dataclass(frozen=True)
class TrainReport:
    """Final loss plus train/test accuracy for one training run."""

    final_loss: float
    train_accuracy: float
    test_accuracy: float
    epochs: int

    def __post_init__(self):
        for name in ("train_accuracy", "test_accuracy"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ModelError(f"{name} must be in [0, 1], got {value}")


# ---------------------------------------------------------------------------
# Shared full-batch descent engine
# ---------------------------------------------------------------------------

def _descend(params, loss_grads, lr, epochs):
    """Full-batch gradient descent with halve-and-retry on loss increase.

    Whenever a step would increase the loss the step size is halved and
    the epoch retried, up to 30 halvings; the reduced step persists.
    Stops early once the gradient infinity-norm falls below 1e-8.
    Returns (params, epochs_applied, loss_history); the history starts
    with the initial loss and appends one accepted loss per epoch, so it
    is non-increasing by construction.
    """
    step = lr
    loss, grads = loss_grads(params)
    if not math.isfinite(loss):
        raise ModelError("non-finite loss at epoch 0")
    history = [loss]
    applied = 0
    for epoch in range(1, epochs + 1):
        grad_norm = max(float(np.max(np.abs(g))) for g in grads)
        if grad_norm < _GRAD_TOL:
            break
        halvings = 0
        while True:
            candidate = [p - step * g for p, g in zip(params, grads)]
            cand_loss, cand_grads = loss_grads(candidate)
            if not math.isfinite(cand_loss):
                raise ModelError(f"non-finite loss at epoch {epoch}")
            if cand_loss <= loss:
                break
            if halvings >= _MAX_HALVINGS:
                return params, applied, history
            step *= 0.5
            halvings += 1
        params, loss, grads = candidate, cand_loss, cand_grads
        history.append(loss)
        applied = epoch
    return params, applied, history


# ---------------------------------------------------------------------------
# Logistic regression
# ---------------------------------------------------------------------------

def _logistic_loss_grads(x: np.ndarray, y: np.ndarray, l2: float):
    n = x.shape[0]

    def loss_grads(params):
        w, b = params
        logits = x @ w + b[0]
        loss = _mean_cross_entropy(logits, y) + 0.5 * l2 * float(w @ w)
        err = sigmoid(logits) - y
        grad_w = x.T @ err / n + l2 * w
        grad_b = np.array([float(err.mean())])
        return loss, [grad_w, grad_b]

    return loss_grads


def _fit_logistic(x, y, w0, b0, lr, epochs, l2):
    loss_grads = _logistic_loss_grads(x, y, l2)
    (w, b), applied, history = _descend([w0, np.array([b0])], loss_grads, lr, epochs)
    return w, float(b[0]), applied, history


def train_logreg(
    x: np.ndarray,
    y: np.ndarray,
    lr: float = 0.1,
    epochs: int = 2000,
    l2: float = 1e-3,
    seed: int = 0,
) -> LogRegModel:
    """Full-batch gradient descent on L2-regularized mean cross-entropy.

    Weights and bias start at zero, so the result is deterministic; the
    seed is accepted for interface uniformity with the other trainers.
    """
    x, y = _check_training_inputs(x, y)
    del seed  # zero init: nothing to randomize
    w, b, applied, _ = _fit_logistic(x, y, np.zeros(x.shape[1]), 0.0, lr, epochs, l2)
    return LogRegModel(weights=w, bias=b, lr=lr, epochs=epochs, l2=l2, epochs_run=applied)


def logreg_gradient(model: LogRegModel, x: np.ndarray, y: np.ndarray):
    """Analytic gradient of the regularized mean cross-entropy.

    Evaluated at the model's current parameters with its stored L2
    strength; exposed so the training step can be verified externally.
    """
    x = _check_matrix(x)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[0] == 0:
        raise ModelError("gradient of an empty batch is undefined")
    if y.shape != (x.shape[0],):
        raise ModelError(f"labels shape {y.shape} does not match {x.shape[0]} rows")
    err = sigmoid(x @ model.weights + model.bias) - y
    grad_w = x.T @ err / x.shape[0] + model.l2 * model.weights
    return grad_w, float(err.mean())


def logreg_loss(model: LogRegModel, x: np.ndarray, y: np.ndarray) -> float:
    logits = x @ model.weights + model.bias
    return _mean_cross_entropy(logits, y) + 0.5 * model.l2 * float(
        model.weights @ model.weights
    )


# ---------------------------------------------------------------------------
# Linear SVM (hinge subgradient descent + Platt calibration)
# ---------------------------------------------------------------------------

def train_svm(
    x: np.ndarray,
    y: np.ndarray,
    lambda_reg: float = 0.01,
    epochs: int = 200,
    seed: int = 0,
) -> SvmModel:
    """Per-sample hinge subgradient descent with step size 1/(lambda*t).

    Labels map to +-1; the seeded generator shuffles the visiting order
    each epoch. The bias rides along unregularized. Afterwards the
    probability map sigma(A*m + B) is fitted with the logistic trainer on
    (margin, label) pairs, starting from A = 1 so calibration keeps the
    margin orientation.
    """
    x, y = _check_training_inputs(x, y)
    if lambda_reg <= 0.0:
        raise ModelError(f"lambda_reg must be positive, got {lambda_reg}")
    n = x.shape[0]
    signs = 2.0 * y - 1.0
    rng = Xoshiro256PP(seed)
    w = np.zeros(x.shape[1])
    b = 0.0
    t = 0
    order = list(range(n))
    for _ in range(epochs):
        rng.shuffle(order)
        for i in order:
            t += 1
            eta = 1.0 / (lambda_reg * t)
            violated = signs[i] * (x[i] @ w + b) < 1.0
            w *= 1.0 - eta * lambda_reg
            if violated:
                w += eta * signs[i] * x[i]
                b += eta * signs[i]
    margins = x @ w + b
    a_fit, b_fit, _, _ = _fit_logistic(
        margins[:, None], y, np.array([1.0]), 0.0, lr=0.1, epochs=2000, l2=1e-3
    )
    platt_a = float(a_fit[0])
    if platt_a < 0.0:
        raise ModelError(
            f"Platt slope came out negative ({platt_a:.3e}); margins anti-correlate with labels"
        )
    return SvmModel(
        weights=w,
        bias=float(b),
        platt_a=platt_a,
        platt_b=b_fit,
        lambda_reg=lambda_reg,
        epochs_run=epochs,
    )


def svm_hinge_objective(model: SvmModel, x: np.ndarray, y: np.ndarray) -> float:
    """Pegasos objective: lambda/2 ||w||^2 + mean hinge on +-1 labels."""
    signs = 2.0 * np.asarray(y, dtype=np.float64) - 1.0
    margins = x @ model.weights + model.bias
    hinge = float(np.mean(np.maximum(0.0, 1.0 - signs * margins)))
    return 0.5 * model.lambda_reg * float(model.weights @ model.weights) + hinge


# ---------------------------------------------------------------------------
# Two-layer MLP
# ---------------------------------------------------------------------------

def _mlp_loss_grads(x: np.ndarray, y: np.ndarray):
    n = x.shape[0]

    def loss_grads(params):
        w1, b1, v, d = params
        pre = x @ w1.T + b1
        hidden = np.tanh(pre)
        logits = hidden @ v + d[0]
        loss = _mean_cross_entropy(logits, y)
        dz = (sigmoid(logits) - y) / n
        grad_v = hidden.T @ dz
        grad_d = np.array([float(dz.sum())])
        dhidden = np.outer(dz, v) * (1.0 - hidden * hidden)
        grad_w1 = dhidden.T @ x
        grad_b1 = dhidden.sum(axis=0)
        return loss, [grad_w1, grad_b1, grad_v, grad_d]

    return loss_grads


def _mlp_init(hidden: int, seed: int):
    rng = Xoshiro256PP(seed)
    bound_in = 1.0 / math.sqrt(N_FEATURES)
    bound_hidden = 1.0 / math.sqrt(hidden)

    def draw(count, bound):
        return np.array([bound * (2.0 * rng.uniform() - 1.0) for _ in range(count)])

    w1 = draw(hidden * N_FEATURES, bound_in).reshape(hidden, N_FEATURES)
    b1 = draw(hidden, bound_in)
    v = draw(hidden, bound_hidden)
    d = draw(1, bound_hidden)
    return w1, b1, v, d


def train_mlp(
    x: np.ndarray,
    y: np.ndarray,
    hidden: int = 8,
    lr: float = 0.05,
    epochs: int = 500,
    seed: int = 0,
) -> MlpModel:
    """Full-batch backprop on mean cross-entropy.

    Weights and biases start uniform in (-1/sqrt(fan_in), +1/sqrt(fan_in)),
    drawn from the seeded generator in layer order (hidden weights row by
    row, hidden biases, output weights, output bias).
    """
    x, y = _check_training_inputs(x, y)
    if hidden < 1:
        raise ModelError(f"need at least one hidden unit, got {hidden}")
    params = list(_mlp_init(hidden, seed))
    (w1, b1, v, d), applied, _history = _descend(params, _mlp_loss_grads(x, y), lr, epochs)
    return MlpModel(hidden_w=w1, hidden_b=b1, out_w=v, out_b=float(d[0]), epochs_run=applied)


def mlp_loss(model: MlpModel, x: np.ndarray, y: np.ndarray) -> float:
    hidden = np.tanh(x @ model.hidden_w.T + model.hidden_b)
    return _mean_cross_entropy(hidden @ model.out_w + model.out_b, y)


def mlp_gradient(model: MlpModel, x: np.ndarray, y: np.ndarray):
    """Backprop gradients as (hidden_w, hidden_b, out_w, out_b)."""
    x = _check_matrix(x)
    y = np.asarray(y, dtype=np.float64)
    loss_grads = _mlp_loss_grads(x, y)
    _, grads = loss_grads(
        [model.hidden_w, model.hidden_b, model.out_w, np.array([model.out_b])]
    )
    return grads[0], grads[1], grads[2], float(grads[3][0])


# ---------------------------------------------------------------------------
# Evaluation
# ---------------------------------------------------------------------------

def accuracy(model, x: np.ndarray, y: np.ndarray) -> float:
    """Fraction classified correctly; probability exactly 0.5 counts as 1."""
    x = _check_matrix(x)
    y = np.asarray(y, dtype=np.float64)
    if x.shape[0] == 0:
        raise ModelError("accuracy of an empty dataset is undefined")
    if y.shape != (x.shape[0],):
        raise ModelError(f"labels shape {y.shape} does not match {x.shape[0]} rows")
    predicted = model.predict_proba_batch(x) >= 0.5
    return float(np.mean(predicted == (y == 1.0)))


# ---------------------------------------------------------------------------
# Persistence
# ---------------------------------------------------------------------------

def _number_line(values) -> str:
    return " ".join(_fmt(float(v)) for v in values)


def model_to_text(model) -> str:
    if model.scaler is None:
        raise ModelIOError("model has no training scaler attached; cannot serialize")
    lines = [f"{MODEL_MAGIC} {MODEL_VERSION} {model.kind}"]
    if model.kind == "logreg":
        lines += ["weights:", _number_line(model.weights), "bias:", _fmt(model.bias)]
    elif model.kind == "svm":
        lines += [
            "weights:",
            _number_line(model.weights),
            "bias:",
            _fmt(model.bias),
            "platt:",
            _number_line([model.platt_a, model.platt_b]),
        ]
    elif model.kind == "mlp":
        lines.append("hidden_w:")
        lines.extend(_number_line(row) for row in model.hidden_w)
        lines += [
            "hidden_b:",
            _number_line(model.hidden_b),
            "out_w:",
            _number_line(model.out_w),
            "out_b:",
            _fmt(model.out_b),
        ]
    else:
        raise ModelIOError(f"unknown model kind '{model.kind}'")
    lines += [
        "scaler:",
        _number_line(model.scaler.means),
        _number_line(model.scaler.stds),
    ]
    if model.split_seed is not None:
        lines += ["split_seed:", str(int(model.split_seed))]
    if model.test_ids is not None:
        lines += ["test_ids:", " ".join(str(int(i)) for i in model.test_ids)]
    return "\n".join(lines) + "\n"


def save_model(model, path: str) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        fh.write(model_to_text(model))


def _parse_sections(lines) -> dict[str, list[str]]:
    sections: dict[str, list[str]] = {}
    current: str | None = None
    for line in lines:
        stripped = line.strip("\r")
        if stripped == "":
            continue
        if stripped.endswith(":") and stripped[:-1].replace("_", "").isalpha():
            current = stripped[:-1]
            if current in sections:
                raise ModelIOError(f"duplicate section '{current}'")
            sections[current] = []
        elif current is None:
            raise ModelIOError(f"content before any section: '{stripped}'")
        else:
            sections[current].append(stripped)
    return sections


def _floats(sections, name, rows, cols) -> np.ndarray:
    if name not in sections:
        raise ModelIOError(f"missing section '{name}'")
    got = sections[name]
    if len(got) != rows:
        raise ModelIOError(f"section '{name}': expected {rows} line(s), got {len(got)}")
    values = []
    for line in got:
        cells = line.split()
        if len(cells) != cols:
            raise ModelIOError(
                f"section '{name}': expected {cols} value(s) per line, got {len(cells)}"
            )
        row = []
        for cell in cells:
            try:
                row.append(float(cell))
            except ValueError:
                raise ModelIOError(f"section '{name}': non-numeric field '{cell}'") from None
        values.append(row)
    arr = np.array(values, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise ModelIOError(f"section '{name}': non-finite value")
    return arr


def _ints(sections, name) -> tuple[int, ...]:
    if name not in sections:
        raise ModelIOError(f"missing section '{name}'")
    cells = " ".join(sections[name]).split()
    try:
        return tuple(int(c) for c in cells)
    except ValueError:
        raise ModelIOError(f"section '{name}': non-integer field") from None


def parse_model(text: str):
    lines = text.splitlines()
    if not lines:
        raise ModelIOError("empty model file")
    header = lines[0].split()
    if len(header) != 3 or header[0] != MODEL_MAGIC:
        raise ModelIOError(f"unrecognized model header '{lines[0]}'")
    if header[1] != MODEL_VERSION:
        raise ModelIOError(f"unknown format version '{header[1]}' (expected {MODEL_VERSION})")
    kind = header[2]
    if kind not in MODEL_KINDS:
        raise ModelIOError(f"unknown model kind '{kind}'")
    sections = _parse_sections(lines[1:])

    # kind-specific parameters first, mirroring file order, so a
    # truncated file reports the earliest missing section
    if kind == "logreg":
        weights = _floats(sections, "weights", 1, N_FEATURES)[0]
        bias = float(_floats(sections, "bias", 1, 1)[0, 0])
        params = dict(weights=weights, bias=bias)
    elif kind == "svm":
        weights = _floats(sections, "weights", 1, N_FEATURES)[0]
        bias = float(_floats(sections, "bias", 1, 1)[0, 0])
        platt = _floats(sections, "platt", 1, 2)[0]
        params = dict(
            weights=weights, bias=bias, platt_a=float(platt[0]), platt_b=float(platt[1])
        )
    else:
        if "hidden_b" not in sections or not sections["hidden_b"]:
            raise ModelIOError("missing section 'hidden_b'")
        hidden = len(sections["hidden_b"][0].split())
        if hidden < 1:
            raise ModelIOError("section 'hidden_b': expected at least one value")
        params = dict(
            hidden_w=_floats(sections, "hidden_w", hidden, N_FEATURES),
            hidden_b=_floats(sections, "hidden_b", 1, hidden)[0],
            out_w=_floats(sections, "out_w", 1, hidden)[0],
            out_b=float(_floats(sections, "out_b", 1, 1)[0, 0]),
        )

    scaler_vals = _floats(sections, "scaler", 2, N_FEATURES)
    scaler = Scaler(means=tuple(scaler_vals[0]), stds=tuple(scaler_vals[1]))
    split_seed = None
    test_ids = None
    if "split_seed" in sections:
        seeds = _ints(sections, "split_seed")
        if len(seeds) != 1:
            raise ModelIOError("section 'split_seed': expected a single integer")
        split_seed = seeds[0]
    if "test_ids" in sections:
        test_ids = _ints(sections, "test_ids")

    common = dict(scaler=scaler, split_seed=split_seed, test_ids=test_ids)
    if kind == "logreg":
        return LogRegModel(**params, **common)
    if kind == "svm":
        return SvmModel(**params, **common)
    return MlpModel(**params, **common)


def load_model(path: str):
    if not os.path.exists(path):
        raise ModelIOError(f"no such file: {path}")
    with open(path, "r", encoding="utf-8", newline="") as fh:
        return parse_model(fh.read())


def with_training_context(model, scaler: Scaler, split_seed: int, test_ids) -> object:
    """Attach the scaler and split bookkeeping a pipeline produced."""
    return replace(model, scaler=scaler, split_seed=split_seed, test_ids=tuple(test_ids))
