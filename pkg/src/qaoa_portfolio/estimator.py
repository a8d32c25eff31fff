"""Scikit-learn style front end: fit on a price history, select the portfolio.

The estimator behaves like a feature selector: `fit(X)` takes a days x assets
price table, solves the budget-constrained selection problem with the
configured ansatz, and `transform(X)` keeps the selected asset columns.
"""

from __future__ import annotations

import numpy as np
from sklearn.base import BaseEstimator
from sklearn.utils import check_array

from .circuits import build_ansatz, make_mixer
from .evaluators import make_evaluator
from .ising import basis_to_selection_permutation, encode, spectral_scaling
from .market import MarketStats, build_market_stats, PriceSeries
from .optimize import OptimizerConfig
from .problem import (
    PenaltyConfig,
    ProblemInstance,
    brute_force_summary,
    calibrate_penalty,
    expected_ratio,
    ground_state_probability,
    selection_array,
    selection_weights,
    weight_profile,
)
from .schedule import run_schedule
from .validation import check_budget, check_price_matrix, check_risk_factor


class QAOAPortfolioOptimizer(BaseEstimator):
    """Budget-constrained portfolio selection via the variational ansatz.

    Parameters mirror the pipeline knobs: `penalty` and `scaling` accept
    "auto" (calibrated) or explicit floats; `evaluator` is one of
    "statevector", "sampling", "density"; `optimizer` is "auto",
    "nelder_mead" or "gradient".

    Attributes set by fit: `stats_`, `instance_`, `penalty_`, `scaling_`,
    `summary_`, `schedule_`, `selection_` (boolean mask),
    `approximation_ratio_`, `ground_state_probability_`.
    """

    def __init__(
        self,
        budget: int = 2,
        risk_factor: float = 1.0 / 3.0,
        mixer: str = "full",
        p_max: int = 7,
        penalty="auto",
        scaling="auto",
        evaluator: str = "statevector",
        shots: int = 1000,
        noise: float = 0.0,
        optimizer: str = "auto",
        seed: int = 0,
        change_denominator: str = "current",
    ):
        self.budget = budget
        self.risk_factor = risk_factor
        self.mixer = mixer
        self.p_max = p_max
        self.penalty = penalty
        self.scaling = scaling
        self.evaluator = evaluator
        self.shots = shots
        self.noise = noise
        self.optimizer = optimizer
        self.seed = seed
        self.change_denominator = change_denominator

    def fit(self, X, y=None, asset_ids=None):
        """Solve the selection problem for a days x assets price table."""
        X = check_array(X, ensure_min_samples=2, ensure_min_features=2)
        X = check_price_matrix(X)
        n = X.shape[1]
        if asset_ids is None:
            asset_ids = tuple(f"asset{i}" for i in range(n))
        series = [PriceSeries(aid, X[:, i]) for i, aid in enumerate(asset_ids)]
        stats = build_market_stats(series, denominator=self.change_denominator)
        return self._fit_stats(stats)

    def _fit_stats(self, stats: MarketStats):
        budget = check_budget(self.budget, stats.n)
        q = check_risk_factor(self.risk_factor)
        instance = ProblemInstance(stats, budget, q)
        profile = weight_profile(instance)
        if self.penalty == "auto":
            penalty = calibrate_penalty(instance, profile)
        else:
            penalty = PenaltyConfig(float(self.penalty))
        summary = brute_force_summary(instance, penalty, profile)
        mixer = make_mixer(self.mixer, stats.n)
        if self.scaling == "auto":
            scale = spectral_scaling(instance, summary, self.mixer)
        else:
            scale = float(self.scaling)
        model = encode(instance, penalty, scale)

        def factory(circuit):
            return make_evaluator(
                self.evaluator, circuit, shots=self.shots, seed=self.seed, eta=self.noise
            )

        schedule = run_schedule(
            model,
            mixer,
            budget,
            self.p_max,
            evaluator_factory=factory,
            optimizer=OptimizerConfig(method=self.optimizer),
        )
        final = schedule.records[-1]
        circuit = build_ansatz(schedule.final_model, mixer, self.p_max, budget)
        final_eval = factory(circuit)
        probs = final_eval.distribution(final.gamma, final.beta)
        perm = basis_to_selection_permutation(stats.n)
        selection_probs = probs[perm]

        # the algorithm's answer is the most probable feasible selection
        feasible = selection_weights(stats.n) == budget
        mode = int(np.argmax(np.where(feasible, selection_probs, -1.0)))

        self.stats_ = stats
        self.instance_ = instance
        self.penalty_ = penalty.factor
        self.scaling_ = scale
        self.summary_ = summary
        self.schedule_ = schedule
        self.n_features_in_ = stats.n
        self.approximation_ratio_ = expected_ratio(selection_probs, summary, instance)
        self.ground_state_probability_ = ground_state_probability(selection_probs, summary)
        self.selection_ = selection_array(mode, stats.n).astype(bool)
        self.selected_assets_ = tuple(
            aid for aid, keep in zip(stats.asset_ids, self.selection_) if keep
        )
        return self

    def get_support(self) -> np.ndarray:
        self._check_fitted()
        return self.selection_.copy()

    def transform(self, X):
        """Keep only the columns of the selected assets."""
        self._check_fitted()
        X = check_array(X)
        if X.shape[1] != self.n_features_in_:
            raise ValueError(f"X has {X.shape[1]} columns, expected {self.n_features_in_}")
        return X[:, self.selection_]

    def fit_transform(self, X, y=None, **fit_params):
        return self.fit(X, y, **fit_params).transform(X)

    def _check_fitted(self):
        if not hasattr(self, "selection_"):
            raise RuntimeError("estimator is not fitted; call fit first")
