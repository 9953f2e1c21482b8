"""Weighted sparse linear regression.

Fits the locally weighted surrogate: minimize

    sum_i w_i * (y_i - b0 - x_i . beta)^2  +  l1 * ||beta||_1

by cyclic coordinate descent with soft-thresholding (intercept
unpenalized, closed-form). `weighted_ols_oracle` solves the l1 = 0 case
independently through the normal equations and Gaussian elimination, so
the two routes can be checked against each other.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


class LinsolveError(ValueError):
    """Raised for invalid weighted regression problems."""


class SingularSystemError(LinsolveError):
    """Raised when the normal equations are numerically singular."""


@dataclass(frozen=True, eq=False)
class WeightedProblem:
    """Design matrix, targets, per-sample weights and L1 strength."""

    design: np.ndarray
    targets: np.ndarray
    sample_weights: np.ndarray
    l1: float = 0.0

    def __post_init__(self):
        x = np.asarray(self.design, dtype=np.float64)
        y = np.asarray(self.targets, dtype=np.float64)
        w = np.asarray(self.sample_weights, dtype=np.float64)
        if x.ndim != 2 or x.shape[0] < 1 or x.shape[1] < 1:
            raise LinsolveError(f"design must be a non-empty 2-D matrix, got shape {x.shape}")
        n, _ = x.shape
        if y.shape != (n,):
            raise LinsolveError(f"targets shape {y.shape} does not match {n} rows")
        if w.shape != (n,):
            raise LinsolveError(f"sample_weights shape {w.shape} does not match {n} rows")
        if not (np.isfinite(x).all() and np.isfinite(y).all() and np.isfinite(w).all()):
            raise LinsolveError("non-finite entry in weighted problem")
        if (w < 0.0).any():
            raise LinsolveError("sample weights must be non-negative")
        if not (w > 0.0).any():
            raise LinsolveError("at least one sample weight must be strictly positive")
        if not (np.isfinite(self.l1) and self.l1 >= 0.0):
            raise LinsolveError(f"l1 must be a finite non-negative real, got {self.l1}")
        object.__setattr__(self, "design", x)
        object.__setattr__(self, "targets", y)
        object.__setattr__(self, "sample_weights", w)

    @property
    def n_features(self) -> int:
        return self.design.shape[1]


@dataclass(frozen=True)
class LinearFit:
    """Solver output: coefficients, intercept and convergence bookkeeping.

    `objective` is the final penalized value (weighted squared loss plus
    l1 * ||coefficients||_1). `objective_path` records it after every
    coordinate sweep; the direct oracle has no sweeps and leaves it empty.
    """

    coefficients: tuple[float, ...]
    intercept: float
    iterations: int
    converged: bool
    objective: float
    objective_path: tuple[float, ...] = ()


def _soft_threshold(value: float, threshold: float) -> float:
    if value > threshold:
        return value - threshold
    if value < -threshold:
        return value + threshold
    return 0.0


def weighted_lasso_cd(
    problem: WeightedProblem, tol: float = 1e-8, max_iter: int = 1000
) -> LinearFit:
    """Cyclic coordinate descent on the penalized weighted least squares.

    Coefficients start at zero. Each sweep refreshes the intercept in
    closed form, then minimizes the objective coordinate-by-coordinate
    exactly (soft threshold l1/2, matching the un-halved squared loss).
    Converged means the last sweep moved no coefficient by more than tol.
    """
    x, y, w = problem.design, problem.targets, problem.sample_weights
    d = problem.n_features
    l1 = problem.l1

    # Sufficient statistics: every sweep is O(d^2) afterwards.
    sw = float(w.sum())
    q0 = float(w @ y)
    syy = float(w @ (y * y))
    s = x.T @ w
    q = x.T @ (w * y)
    gram = x.T @ (w[:, None] * x)
    diag = np.diag(gram).copy()

    beta = np.zeros(d)
    intercept = 0.0
    objective_path = []
    converged = False
    sweeps = 0
    for sweeps in range(1, max_iter + 1):
        intercept = (q0 - float(s @ beta)) / sw
        max_change = 0.0
        for j in range(d):
            if diag[j] == 0.0:
                continue  # feature vanishes under the weights; keep it at 0
            rho = q[j] - intercept * s[j] - float(gram[j] @ beta) + diag[j] * beta[j]
            new = _soft_threshold(rho, 0.5 * l1) / diag[j]
            change = abs(new - beta[j])
            if change > max_change:
                max_change = change
            beta[j] = new
        objective_path.append(_objective(syy, q0, sw, s, q, gram, beta, intercept, l1))
        if not np.isfinite(objective_path[-1]):
            raise LinsolveError(f"objective became non-finite at sweep {sweeps}")
        if max_change < tol:
            converged = True
            break

    return LinearFit(
        coefficients=tuple(float(b) for b in beta),
        intercept=float(intercept),
        iterations=sweeps,
        converged=converged,
        objective=objective_path[-1],
        objective_path=tuple(objective_path),
    )


def _objective(syy, q0, sw, s, q, gram, beta, intercept, l1) -> float:
    quad = float(beta @ gram @ beta)
    loss = (
        syy
        - 2.0 * intercept * q0
        - 2.0 * float(q @ beta)
        + 2.0 * intercept * float(s @ beta)
        + intercept * intercept * sw
        + quad
    )
    return loss + l1 * float(np.abs(beta).sum())


def weighted_ols_oracle(problem: WeightedProblem) -> LinearFit:
    """Exact weighted least squares via normal equations (l1 must be 0).

    The design is augmented with an all-ones column and the system
    A^T W A g = A^T W y is solved by Gaussian elimination with partial
    pivoting. Pivots below 1e-12 raise SingularSystemError.
    """
    if problem.l1 != 0.0:
        raise LinsolveError("the direct oracle only solves unpenalized problems (l1 = 0)")
    x, y, w = problem.design, problem.targets, problem.sample_weights
    n, d = x.shape
    a = np.hstack([x, np.ones((n, 1))])
    m = a.T @ (w[:, None] * a)
    rhs = a.T @ (w * y)
    gamma = _gauss_solve(m, rhs)
    residual = y - a @ gamma
    loss = float(w @ (residual * residual))
    return LinearFit(
        coefficients=tuple(float(c) for c in gamma[:d]),
        intercept=float(gamma[d]),
        iterations=0,
        converged=True,
        objective=loss,
    )


def _gauss_solve(m: np.ndarray, rhs: np.ndarray, pivot_tol: float = 1e-12) -> np.ndarray:
    """Gaussian elimination with partial pivoting on a copy of (m | rhs)."""
    k = m.shape[0]
    aug = np.hstack([m.astype(np.float64, copy=True), rhs.reshape(-1, 1)])
    for col in range(k):
        pivot_row = col + int(np.argmax(np.abs(aug[col:, col])))
        pivot = aug[pivot_row, col]
        if abs(pivot) < pivot_tol:
            raise SingularSystemError(
                f"singular system: pivot magnitude {abs(pivot):.3e} below {pivot_tol:g}"
            )
        if pivot_row != col:
            aug[[col, pivot_row]] = aug[[pivot_row, col]]
        factors = aug[col + 1 :, col] / aug[col, col]
        aug[col + 1 :, col:] -= factors[:, None] * aug[col, col:]
    solution = np.zeros(k)
    for row in range(k - 1, -1, -1):
        solution[row] = (aug[row, -1] - aug[row, row + 1 : k] @ solution[row + 1 :]) / aug[
            row, row
        ]
    return solution
