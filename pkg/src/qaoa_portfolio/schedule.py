"""Depth-by-depth optimization of the variational angles.

Depth 1 starts from a 10x10 geometric grid search over the linear-ansatz
slopes (m1, m2), evaluated at the final depth so the selected minimum is the
one that extrapolates well. Each later depth runs up to four warm starts:
piecewise-linear interpolation of the previous optimum, a refitted linear
ansatz, a refitted quadratic ansatz, and the previous optimum padded with an
identity layer (which guarantees the best expectation never increases with
depth). After each depth the cost operator is rescaled so the two angle
vectors keep the same magnitude; reported expectations are always converted
back to original cost units through the cumulative scale.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .circuits import MixerSpec, build_ansatz
from .ising import IsingModel, rescale
from .optimize import OptimizeResult, OptimizerConfig, minimize

STRATEGIES = ("interpolate", "linear", "quadratic", "zero_pad")

GRID_SHAPE = (10, 10)
M1_RANGE = (0.01, 100.0)
M2_RANGE = (np.pi / 100.0, np.pi)


def grid_points(depth: int) -> np.ndarray:
    """Layer midpoints x_i = (2i - 1) / (2p) for i = 1..p."""
    if depth < 1:
        raise ValueError("depth must be >= 1")
    i = np.arange(1, depth + 1)
    return (2.0 * i - 1.0) / (2.0 * depth)


def linear_angles(m1: float, m2: float, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Annealing-like ramp: phases grow along the circuit, mixing decays."""
    x = grid_points(depth)
    return m1 * x, m2 * (1.0 - x)


def quadratic_angles(params: Sequence[float], depth: int) -> tuple[np.ndarray, np.ndarray]:
    a1, b1, c1, a2, b2, c2 = params
    x = grid_points(depth)
    return a1 + b1 * x + c1 * x**2, a2 + b2 * x + c2 * x**2


def init_interpolate(prev_gamma, prev_beta, depth: int) -> tuple[np.ndarray, np.ndarray]:
    """Evaluate the line through the two nearest previous layer midpoints.

    Points outside the previous range extrapolate on the nearest segment; a
    single previous point extends as a constant.
    """
    prev_gamma = np.atleast_1d(np.asarray(prev_gamma, dtype=float))
    prev_beta = np.atleast_1d(np.asarray(prev_beta, dtype=float))
    prev_depth = prev_gamma.size
    if prev_beta.size != prev_depth or prev_depth < 1:
        raise ValueError("previous angle vectors must be non-empty and equal length")
    if prev_depth == 1:
        return np.full(depth, prev_gamma[0]), np.full(depth, prev_beta[0])
    x_prev = grid_points(prev_depth)
    x_new = grid_points(depth)

    def interp(values):
        out = np.empty(depth)
        for i, x in enumerate(x_new):
            j = int(np.clip(np.searchsorted(x_prev, x) - 1, 0, prev_depth - 2))
            slope = (values[j + 1] - values[j]) / (x_prev[j + 1] - x_prev[j])
            out[i] = values[j] + slope * (x - x_prev[j])
        return out

    return interp(prev_gamma), interp(prev_beta)


def init_zero_pad(prev_gamma, prev_beta) -> tuple[np.ndarray, np.ndarray]:
    """Append an identity layer (gamma = beta = 0)."""
    return (
        np.append(np.asarray(prev_gamma, dtype=float), 0.0),
        np.append(np.asarray(prev_beta, dtype=float), 0.0),
    )


def geometric_grid(bounds: tuple[float, float], count: int) -> np.ndarray:
    """`count` log-spaced points strictly inside the open interval."""
    return np.geomspace(bounds[0], bounds[1], count + 2)[1:-1]


@dataclass
class DepthRecord:
    depth: int
    strategy: str
    gamma: np.ndarray
    beta: np.ndarray
    expectation: float
    expectation_unscaled: float
    evaluations: int
    rescale_factor: float
    extras: dict = field(default_factory=dict)


@dataclass
class Schedule:
    mixer_kind: str
    p_max: int
    records: list[DepthRecord]
    final_model: IsingModel
    grid_m1: float
    grid_m2: float

    @property
    def best_expectation_unscaled(self) -> float:
        return self.records[-1].expectation_unscaled

    def to_json(self) -> str:
        return json.dumps(
            {
                "mixer": self.mixer_kind,
                "p_max": self.p_max,
                "grid_m1": self.grid_m1,
                "grid_m2": self.grid_m2,
                "depths": [
                    {
                        "p": r.depth,
                        "strategy_chosen": r.strategy,
                        "gamma": [float(v) for v in r.gamma],
                        "beta": [float(v) for v in r.beta],
                        "expectation_unscaled": r.expectation_unscaled,
                        "evaluations_used": r.evaluations,
                        "mu_rescale": r.rescale_factor,
                        **{k: v for k, v in r.extras.items()},
                    }
                    for r in self.records
                ],
            },
            indent=2,
        )


class _CountedObjective:
    def __init__(self, fun):
        self.fun = fun
        self.count = 0

    def __call__(self, x):
        self.count += 1
        return self.fun(x)


def run_schedule(
    model: IsingModel,
    mixer: MixerSpec,
    budget: int,
    p_max: int,
    evaluator_factory: Callable,
    optimizer: OptimizerConfig | None = None,
    strategies: Sequence[str] = STRATEGIES,
    on_depth: Callable | None = None,
) -> Schedule:
    """Optimize depths 1..p_max and return the per-depth history.

    `evaluator_factory(circuit)` builds an expectation engine for the given
    ansatz circuit; `on_depth(record, evaluator)` runs after each depth with
    the evaluator bound to that depth's (already selected) angles and model.
    """
    if p_max < 1:
        raise ValueError("p_max must be >= 1")
    unknown = set(strategies) - set(STRATEGIES)
    if unknown:
        raise ValueError(f"unknown strategies {sorted(unknown)}")
    optimizer = optimizer or OptimizerConfig()

    def evaluator_for(mdl, depth):
        return evaluator_factory(build_ansatz(mdl, mixer, depth, budget))

    # depth-1 start: geometric grid over the linear ansatz evaluated at p_max
    ev_deep = evaluator_for(model, p_max)
    exact = bool(getattr(ev_deep, "exact", False))
    m1s = np.repeat(geometric_grid(M1_RANGE, GRID_SHAPE[0]), GRID_SHAPE[1])
    m2s = np.tile(geometric_grid(M2_RANGE, GRID_SHAPE[1]), GRID_SHAPE[0])
    x_deep = grid_points(p_max)
    deep_batch = getattr(ev_deep, "expectation_batch", None)
    if deep_batch is not None:
        values = deep_batch(np.outer(m1s, x_deep), np.outer(m2s, 1.0 - x_deep))
    else:
        values = np.array(
            [ev_deep.expectation(*linear_angles(m1, m2, p_max)) for m1, m2 in zip(m1s, m2s)]
        )
    grid_evals = m1s.size
    pick = int(np.argmin(values))
    grid_m = [float(m1s[pick]), float(m2s[pick])]  # grid slopes, current frame
    lin_m = list(grid_m)  # slopes refit by the linear strategy per depth

    records: list[DepthRecord] = []
    current = model
    quad_params: np.ndarray | None = None
    prev_gamma = prev_beta = None

    for depth in range(1, p_max + 1):
        evaluator = evaluator_for(current, depth)
        batched = getattr(evaluator, "expectation_batch", None)

        def main_objective(x):
            return evaluator.expectation(x[:depth], x[depth:])

        main_batch = None
        if batched is not None:
            def main_batch(points):
                return batched(points[:, :depth], points[:, depth:])

        x_mid = grid_points(depth)
        runs: list[tuple[str, OptimizeResult]] = []
        evals_used = 0
        if depth == 1:
            start = np.array([grid_m[0] / 2.0, grid_m[1] / 2.0])
            result = minimize(main_objective, start, optimizer, exact, main_batch)
            runs.append(("grid", result))
            evals_used += result.evaluations + grid_evals
        else:
            for strategy in strategies:
                if strategy == "interpolate":
                    g0, b0 = init_interpolate(prev_gamma, prev_beta, depth)
                elif strategy == "linear":
                    def inner(m):
                        return evaluator.expectation(*linear_angles(m[0], m[1], depth))

                    inner_batch = None
                    if batched is not None:
                        def inner_batch(points):
                            return batched(
                                points[:, :1] * x_mid[None, :],
                                points[:, 1:] * (1.0 - x_mid)[None, :],
                            )
                    fit = minimize(inner, np.array(lin_m), optimizer, exact, inner_batch)
                    lin_m = [float(fit.x[0]), float(fit.x[1])]
                    evals_used += fit.evaluations
                    g0, b0 = linear_angles(lin_m[0], lin_m[1], depth)
                elif strategy == "quadratic":
                    if quad_params is None:
                        quad_params = np.array([0.0, grid_m[0], 0.0, grid_m[1], -grid_m[1], 0.0])

                    def inner(prm):
                        return evaluator.expectation(*quadratic_angles(prm, depth))

                    inner_batch = None
                    if batched is not None:
                        basis = np.vstack([np.ones_like(x_mid), x_mid, x_mid**2])

                        def inner_batch(points):
                            return batched(points[:, :3] @ basis, points[:, 3:] @ basis)
                    fit = minimize(inner, quad_params, optimizer, exact, inner_batch)
                    quad_params = np.asarray(fit.x, dtype=float)
                    evals_used += fit.evaluations
                    g0, b0 = quadratic_angles(quad_params, depth)
                else:  # zero_pad
                    g0, b0 = init_zero_pad(prev_gamma, prev_beta)
                result = minimize(main_objective, np.concatenate([g0, b0]), optimizer, exact, main_batch)
                evals_used += result.evaluations
                runs.append((strategy, result))

        # smallest expectation wins; ties resolve to the earliest strategy
        strategy, best = min(runs, key=lambda item: item[1].fun)
        gamma = np.asarray(best.x[:depth], dtype=float)
        beta = np.asarray(best.x[depth:], dtype=float)

        record = DepthRecord(
            depth=depth,
            strategy=strategy,
            gamma=gamma,
            beta=beta,
            expectation=best.fun,
            expectation_unscaled=best.fun / current.cumulative_scale,
            evaluations=evals_used,
            rescale_factor=1.0,
            extras={
                "runs": [
                    {"strategy": name, "initial": res.initial_value, "final": res.fun}
                    for name, res in runs
                ]
            },
        )

        if on_depth is not None:
            on_depth(record, evaluator)

        # balance the two angle magnitudes before the next depth; gamma-like
        # carried quantities move into the rescaled frame alongside the model
        sum_g, sum_b = np.abs(gamma).sum(), np.abs(beta).sum()
        factor = 1.0
        if sum_g > 1e-300 and sum_b > 1e-300:
            factor = sum_g / sum_b
        if factor != 1.0:
            current = rescale(current, factor)
            gamma = gamma / factor
            grid_m = [grid_m[0] / factor, grid_m[1]]
            lin_m = [lin_m[0] / factor, lin_m[1]]
            if quad_params is not None:
                quad_params = quad_params.copy()
                quad_params[:3] /= factor
        record.gamma = gamma
        record.rescale_factor = factor
        records.append(record)
        prev_gamma, prev_beta = gamma, beta

    return Schedule(
        mixer_kind=mixer.kind,
        p_max=p_max,
        records=records,
        final_model=current,
        grid_m1=grid_m[0],
        grid_m2=grid_m[1],
    )
