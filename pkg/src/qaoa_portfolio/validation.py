"""Input validation helpers shared by the estimator and the CLI."""

from __future__ import annotations

import numpy as np


def check_price_matrix(X) -> np.ndarray:
    """Validate a days x assets price table: 2-d, >= 2 rows, finite, positive."""
    X = np.asarray(X, dtype=float)
    if X.ndim != 2:
        raise ValueError(f"price matrix must be 2-d (days x assets), got ndim={X.ndim}")
    if X.shape[0] < 2:
        raise ValueError("need at least 2 price rows")
    if X.shape[1] < 2:
        raise ValueError("need at least 2 assets")
    if not np.all(np.isfinite(X)):
        raise ValueError("price matrix contains missing or non-finite entries")
    if np.any(X <= 0):
        raise ValueError("prices must be strictly positive")
    return X


def check_budget(budget, n: int) -> int:
    budget = int(budget)
    if not 1 <= budget <= n - 1:
        raise ValueError(f"budget must satisfy 1 <= B <= n-1, got B={budget} for n={n}")
    return budget


def check_risk_factor(q) -> float:
    q = float(q)
    if not 0.0 <= q <= 1.0:
        raise ValueError(f"risk factor must lie in [0, 1], got {q}")
    return q


def check_probability_vector(p, n_states: int, tol: float = 1e-9) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.shape != (n_states,):
        raise ValueError(f"expected a length-{n_states} probability vector")
    if np.any(p < -tol):
        raise ValueError("negative probabilities")
    if abs(p.sum() - 1.0) > tol:
        raise ValueError(f"probabilities sum to {p.sum()!r}")
    return p
