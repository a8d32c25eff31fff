"""Native local optimizers for the variational outer loop.

The simplex method uses the published settings: initial simplex built by
adding 0.5 to each coordinate of the start point, reflection/expansion/
contraction/shrink coefficients (1, 2, 0.5, 0.5) and an iteration cap of 10
times the parameter count. The gradient method is a BFGS quasi-Newton descent
on central finite differences, used only with exact (noise-free) objectives.
Both return the best point ever evaluated, so a run can never end worse than
its starting point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable

import numpy as np


@dataclass
class OptimizerConfig:
    method: str = "auto"  # nelder_mead | gradient | auto (exact -> gradient)
    initial_simplex_size: float = 0.5
    max_iterations: int | None = None  # None: 10 * dimension (simplex) / 200 (gradient)
    simplex_tol: float = 1e-8
    gradient_step: float = 1e-6
    gradient_tol: float = 1e-8
    step_tol: float = 1e-10

    def __post_init__(self):
        if self.method not in ("auto", "nelder_mead", "gradient"):
            raise ValueError(f"unknown optimizer method {self.method!r}")
        if self.initial_simplex_size <= 0 or self.gradient_step <= 0:
            raise ValueError("sizes and steps must be positive")
        if min(self.simplex_tol, self.gradient_tol, self.step_tol) <= 0:
            raise ValueError("tolerances must be positive")


@dataclass
class OptimizeResult:
    x: np.ndarray
    fun: float
    evaluations: int
    iterations: int
    converged: bool
    initial_value: float = np.nan


class _Tracker:
    """Wraps the objective, counting calls and remembering the best point."""

    def __init__(self, fun: Callable, fun_batch: Callable | None = None):
        self._fun = fun
        self._fun_batch = fun_batch
        self.count = 0
        self.best_x: np.ndarray | None = None
        self.best_f = np.inf

    def __call__(self, x: np.ndarray) -> float:
        value = float(self._fun(np.asarray(x, dtype=float)))
        if np.isnan(value):
            raise ValueError("objective returned NaN")
        self.count += 1
        if value < self.best_f:
            self.best_f = value
            self.best_x = np.array(x, dtype=float)
        return value

    def batch(self, points: np.ndarray) -> np.ndarray:
        if self._fun_batch is None:
            return np.array([self(p) for p in points])
        values = np.asarray(self._fun_batch(np.asarray(points, dtype=float)), dtype=float)
        if np.isnan(values).any():
            raise ValueError("objective returned NaN")
        self.count += len(points)
        k = int(np.argmin(values))
        if values[k] < self.best_f:
            self.best_f = float(values[k])
            self.best_x = np.array(points[k], dtype=float)
        return values


def nelder_mead(fun: Callable, x0, config: OptimizerConfig | None = None) -> OptimizeResult:
    """Downhill simplex with the fixed coefficient set (1, 2, 0.5, 0.5)."""
    config = config or OptimizerConfig()
    x0 = np.asarray(x0, dtype=float)
    d = x0.size
    cap = config.max_iterations if config.max_iterations is not None else 10 * d
    alpha, gamma, rho, sigma = 1.0, 2.0, 0.5, 0.5

    track = _Tracker(fun)
    simplex = [x0.copy()]
    for i in range(d):
        vertex = x0.copy()
        vertex[i] += config.initial_simplex_size
        simplex.append(vertex)
    values = [track(v) for v in simplex]
    start_value = values[0]

    iterations = 0
    converged = False
    while iterations < cap:
        order = np.argsort(values, kind="stable")
        simplex = [simplex[i] for i in order]
        values = [values[i] for i in order]
        spread = max(np.max(np.abs(v - simplex[0])) for v in simplex[1:])
        if spread < config.simplex_tol:
            converged = True
            break
        iterations += 1

        centroid = np.mean(simplex[:-1], axis=0)
        worst = simplex[-1]
        reflected = centroid + alpha * (centroid - worst)
        f_reflected = track(reflected)
        if values[0] <= f_reflected < values[-2]:
            simplex[-1], values[-1] = reflected, f_reflected
            continue
        if f_reflected < values[0]:
            expanded = centroid + gamma * (centroid - worst)
            f_expanded = track(expanded)
            if f_expanded < f_reflected:
                simplex[-1], values[-1] = expanded, f_expanded
            else:
                simplex[-1], values[-1] = reflected, f_reflected
            continue
        # contraction, outside or inside depending on the reflected value
        if f_reflected < values[-1]:
            contracted = centroid + rho * (reflected - centroid)
            f_contracted = track(contracted)
            accept = f_contracted <= f_reflected
        else:
            contracted = centroid + rho * (worst - centroid)
            f_contracted = track(contracted)
            accept = f_contracted < values[-1]
        if accept:
            simplex[-1], values[-1] = contracted, f_contracted
            continue
        # shrink toward the best vertex
        for i in range(1, d + 1):
            simplex[i] = simplex[0] + sigma * (simplex[i] - simplex[0])
            values[i] = track(simplex[i])

    return OptimizeResult(
        x=track.best_x, fun=track.best_f, evaluations=track.count,
        iterations=iterations, converged=converged, initial_value=start_value,
    )


def _central_gradient(track: _Tracker, x: np.ndarray, relative_step: float) -> np.ndarray:
    d = x.size
    h = relative_step * np.maximum(1.0, np.abs(x))
    points = np.repeat(x[None, :], 2 * d, axis=0)
    points[np.arange(d), np.arange(d)] += h
    points[d + np.arange(d), np.arange(d)] -= h
    values = track.batch(points)
    return (values[:d] - values[d:]) / (2.0 * h)


def gradient_optimize(
    fun: Callable, x0, config: OptimizerConfig | None = None, fun_batch: Callable | None = None
) -> OptimizeResult:
    """BFGS quasi-Newton descent with central finite-difference gradients."""
    config = config or OptimizerConfig()
    x = np.asarray(x0, dtype=float).copy()
    d = x.size
    cap = config.max_iterations if config.max_iterations is not None else 200

    track = _Tracker(fun, fun_batch)
    f = track(x)
    start_value = f
    grad = _central_gradient(track, x, config.gradient_step)
    h_inv = np.eye(d)

    def line_search(direction, slope):
        # backtracking with quadratic interpolation on the Armijo condition
        step = 1.0
        for _ in range(40):
            x_try = x + step * direction
            f_try = track(x_try)
            if f_try <= f + 1e-4 * step * slope:
                return x_try, f_try
            denom = f_try - f - slope * step
            quad = -0.5 * slope * step * step / denom if denom > 0 else 0.5 * step
            step = float(np.clip(quad, 0.1 * step, 0.5 * step))
        return None, None

    iterations = 0
    converged = False
    while iterations < cap:
        if np.linalg.norm(grad) < config.gradient_tol:
            converged = True
            break
        iterations += 1
        direction = -h_inv @ grad
        slope = float(grad @ direction)
        if slope >= 0:  # bad curvature model: restart on steepest descent
            h_inv = np.eye(d)
            direction = -grad
            slope = -float(grad @ grad)

        x_new, f_new = line_search(direction, slope)
        if x_new is None and slope < 0 and not np.array_equal(direction, -grad):
            h_inv = np.eye(d)
            x_new, f_new = line_search(-grad, -float(grad @ grad))
        if x_new is None:
            break  # line search failed: gradient is noise-dominated

        if np.linalg.norm(x_new - x) < config.step_tol:
            x, f = x_new, f_new
            converged = True
            break

        grad_new = _central_gradient(track, x_new, config.gradient_step)
        s = x_new - x
        y = grad_new - grad
        ys = float(y @ s)
        if ys > 1e-12:
            rho_bfgs = 1.0 / ys
            outer = np.outer(s, y)
            h_inv = (np.eye(d) - rho_bfgs * outer) @ h_inv @ (np.eye(d) - rho_bfgs * outer.T)
            h_inv += rho_bfgs * np.outer(s, s)
        x, f, grad = x_new, f_new, grad_new

    return OptimizeResult(
        x=track.best_x, fun=track.best_f, evaluations=track.count,
        iterations=iterations, converged=converged, initial_value=start_value,
    )


def minimize(
    fun: Callable,
    x0,
    config: OptimizerConfig,
    exact_objective: bool,
    fun_batch: Callable | None = None,
) -> OptimizeResult:
    """Dispatch on the configured method; `auto` picks the gradient method for
    exact objectives and the simplex method for noisy ones."""
    method = config.method
    if method == "auto":
        method = "gradient" if exact_objective else "nelder_mead"
    if method == "gradient":
        return gradient_optimize(fun, x0, config, fun_batch)
    return nelder_mead(fun, x0, config)
