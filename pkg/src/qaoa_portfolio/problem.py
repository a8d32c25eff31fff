"""Constrained binary portfolio model: cost oracle, penalty calibration, measures.

Selections are bitstrings z with z_i = 1 when asset i is in the portfolio.
User-facing strings list assets left to right in basket order ("10000"
selects the first asset only); integer-encoded selections put asset i at
bit i. A selection is feasible when exactly `budget` assets are chosen.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Mapping, Sequence

import numpy as np

from .market import MarketStats

ENUMERATION_LIMIT = 28
_CHUNK_BITS = 20

#: relative tolerance for grouping degenerate optima
DEGENERACY_RTOL = 1e-12


@dataclass(frozen=True)
class ProblemInstance:
    """A basket of assets plus budget B and risk preference q in [0, 1]."""

    stats: MarketStats
    budget: int
    risk_factor: float

    def __post_init__(self):
        n = self.stats.n
        if not 1 <= self.budget <= n - 1:
            raise ValueError(f"budget must satisfy 1 <= B <= n-1, got B={self.budget}, n={n}")
        if not 0.0 <= self.risk_factor <= 1.0:
            raise ValueError(f"risk factor must lie in [0, 1], got {self.risk_factor}")

    @property
    def n(self) -> int:
        return self.stats.n


@dataclass(frozen=True)
class PenaltyConfig:
    """Weight of the quadratic budget-violation term."""

    factor: float

    def __post_init__(self):
        if not (np.isfinite(self.factor) and self.factor >= 0):
            raise ValueError(f"penalty factor must be >= 0, got {self.factor}")


@dataclass(frozen=True)
class OracleSummary:
    """Exact enumeration results: feasible extrema/mean and penalized unfeasible extrema."""

    f_min: float
    f_max: float
    f_mean: float
    f_min_nf: float
    f_max_nf: float
    argmin_state: str
    degenerate_minima: tuple[str, ...]
    penalty_factor: float

    def __post_init__(self):
        if not self.f_min <= self.f_mean <= self.f_max:
            raise ValueError("oracle ordering violated: need f_min <= f_mean <= f_max")


@dataclass(frozen=True)
class HardnessStats:
    """Instance difficulty statistics (population variances throughout)."""

    s2_ret: float
    s2_cor: float
    mu_energy: float
    s2_energy: float
    perf: float

    def __post_init__(self):
        if self.s2_ret < 0 or self.s2_cor < 0 or self.s2_energy < 0:
            raise ValueError("variances must be non-negative")


# ---------------------------------------------------------------------------
# selection encodings
# ---------------------------------------------------------------------------


def selection_array(z, n: int) -> np.ndarray:
    """Normalize a selection (string, iterable, or int encoding) to a 0/1 array."""
    if isinstance(z, str):
        if len(z) != n or set(z) - {"0", "1"}:
            raise ValueError(f"selection string must be {n} chars of 0/1, got {z!r}")
        return np.fromiter((1 if ch == "1" else 0 for ch in z), dtype=np.int8, count=n)
    if isinstance(z, (int, np.integer)):
        if not 0 <= int(z) < (1 << n):
            raise ValueError("selection integer out of range")
        return ((int(z) >> np.arange(n)) & 1).astype(np.int8)
    arr = np.asarray(z)
    if arr.shape != (n,) or not np.isin(arr, (0, 1)).all():
        raise ValueError(f"selection must be a length-{n} 0/1 vector")
    return arr.astype(np.int8)


def selection_string(z, n: int) -> str:
    return "".join("1" if v else "0" for v in selection_array(z, n))


def selection_index(z, n: int) -> int:
    """Integer encoding with asset i at bit i."""
    arr = selection_array(z, n)
    return int(np.dot(arr.astype(np.int64), 1 << np.arange(n, dtype=np.int64)))


def _bits(indices: np.ndarray, n: int) -> np.ndarray:
    return ((indices[:, None] >> np.arange(n)) & 1).astype(np.float64)


# ---------------------------------------------------------------------------
# cost function and exhaustive oracle
# ---------------------------------------------------------------------------


def cost(instance: ProblemInstance, z) -> float:
    """Risk/return objective q z'Σz - (1-q) μ'z (double sum includes i = j)."""
    zq = selection_array(z, instance.n).astype(float)
    q = instance.risk_factor
    return float(q * zq @ instance.stats.sigma @ zq - (1.0 - q) * instance.stats.mu @ zq)


def penalized_cost(instance: ProblemInstance, penalty: PenaltyConfig, z) -> float:
    """Objective plus A (sum z - B)^2; coincides with cost on feasible selections."""
    zq = selection_array(z, instance.n)
    violation = int(zq.sum()) - instance.budget
    return cost(instance, zq) + penalty.factor * violation * violation


def cost_vector(instance: ProblemInstance) -> np.ndarray:
    """Raw cost of every selection, indexed by the integer encoding."""
    n = instance.n
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration bound exceeded: n={n} > {ENUMERATION_LIMIT}")
    out = np.empty(1 << n)
    q = instance.risk_factor
    sigma, mu = instance.stats.sigma, instance.stats.mu
    chunk = 1 << min(_CHUNK_BITS, n)
    for start in range(0, 1 << n, chunk):
        idx = np.arange(start, min(start + chunk, 1 << n))
        zb = _bits(idx, n)
        out[idx] = q * np.einsum("si,ij,sj->s", zb, sigma, zb) - (1.0 - q) * (zb @ mu)
    return out


def selection_weights(n: int) -> np.ndarray:
    """Number of selected assets for every integer-encoded selection."""
    idx = np.arange(1 << n, dtype=np.int64)
    w = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        w += (idx >> b) & 1
    return w


@dataclass(frozen=True)
class WeightProfile:
    """Per-cardinality extrema and moments of the raw cost, from one exhaustive pass.

    All penalized quantities for any A follow from these because the penalty
    only depends on the selection cardinality.
    """

    n: int
    min_cost: np.ndarray
    max_cost: np.ndarray
    sum_cost: np.ndarray
    sum_sq_cost: np.ndarray
    count: np.ndarray
    argmin_index: np.ndarray

    def feasible_mean(self, budget: int) -> float:
        return float(self.sum_cost[budget] / self.count[budget])

    def feasible_variance(self, budget: int) -> float:
        mean = self.feasible_mean(budget)
        # clamp: the moment formula can dip below zero by rounding
        return max(0.0, float(self.sum_sq_cost[budget] / self.count[budget] - mean * mean))

    def min_penalized_nf(self, budget: int, factor: float) -> tuple[float, int]:
        """Minimum penalized cost over unfeasible selections and the binding cardinality."""
        w = np.arange(self.n + 1)
        vals = self.min_cost + factor * (w - budget) ** 2
        vals[budget] = np.inf
        k = int(np.argmin(vals))
        return float(vals[k]), k

    def max_penalized_nf(self, budget: int, factor: float) -> float:
        w = np.arange(self.n + 1)
        vals = self.max_cost + factor * (w - budget) ** 2
        vals[budget] = -np.inf
        return float(vals.max())


def weight_profile(instance: ProblemInstance) -> WeightProfile:
    """Chunked exhaustive enumeration; exact for n <= ENUMERATION_LIMIT."""
    n = instance.n
    if n > ENUMERATION_LIMIT:
        raise ValueError(f"enumeration bound exceeded: n={n} > {ENUMERATION_LIMIT}")
    q = instance.risk_factor
    sigma, mu = instance.stats.sigma, instance.stats.mu
    kmax = n + 1
    min_cost = np.full(kmax, np.inf)
    max_cost = np.full(kmax, -np.inf)
    sum_cost = np.zeros(kmax)
    sum_sq = np.zeros(kmax)
    count = np.zeros(kmax, dtype=np.int64)
    argmin = np.zeros(kmax, dtype=np.int64)
    chunk = 1 << min(_CHUNK_BITS, n)
    for start in range(0, 1 << n, chunk):
        idx = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        zb = _bits(idx, n)
        f = q * np.einsum("si,ij,sj->s", zb, sigma, zb) - (1.0 - q) * (zb @ mu)
        w = zb.sum(axis=1).astype(np.int64)
        for k in range(kmax):
            mask = w == k
            if not mask.any():
                continue
            fk = f[mask]
            local = int(np.argmin(fk))
            if fk[local] < min_cost[k]:
                min_cost[k] = fk[local]
                argmin[k] = idx[mask][local]
            max_cost[k] = max(max_cost[k], float(fk.max()))
            sum_cost[k] += float(fk.sum())
            sum_sq[k] += float(np.dot(fk, fk))
            count[k] += int(mask.sum())
    for arr in (min_cost, max_cost, sum_cost, sum_sq):
        arr.flags.writeable = False
    count.flags.writeable = False
    argmin.flags.writeable = False
    return WeightProfile(n, min_cost, max_cost, sum_cost, sum_sq, count, argmin)


def brute_force_summary(
    instance: ProblemInstance, penalty: PenaltyConfig, profile: WeightProfile | None = None
) -> OracleSummary:
    """Exact feasible extrema/mean plus penalized unfeasible extrema."""
    if profile is None:
        profile = weight_profile(instance)
    n, B = instance.n, instance.budget
    f_min = float(profile.min_cost[B])
    f_max = float(profile.max_cost[B])
    f_mean = profile.feasible_mean(B)
    f_min_nf, _ = profile.min_penalized_nf(B, penalty.factor)
    f_max_nf = profile.max_penalized_nf(B, penalty.factor)

    # collect all feasible selections degenerate with the optimum
    tol = DEGENERACY_RTOL * max(1.0, abs(f_min))
    minima: list[int] = []
    weights_all = None
    chunk = 1 << min(_CHUNK_BITS, n)
    for start in range(0, 1 << n, chunk):
        idx = np.arange(start, min(start + chunk, 1 << n), dtype=np.int64)
        zb = _bits(idx, n)
        feas = zb.sum(axis=1) == B
        if not feas.any():
            continue
        zb = zb[feas]
        sub = idx[feas]
        f = instance.risk_factor * np.einsum("si,ij,sj->s", zb, instance.stats.sigma, zb)
        f -= (1.0 - instance.risk_factor) * (zb @ instance.stats.mu)
        near = np.abs(f - f_min) <= tol
        minima.extend(int(v) for v in sub[near])
    del weights_all
    return OracleSummary(
        f_min=f_min,
        f_max=f_max,
        f_mean=f_mean,
        f_min_nf=f_min_nf,
        f_max_nf=f_max_nf,
        argmin_state=selection_string(int(profile.argmin_index[B]), n),
        degenerate_minima=tuple(selection_string(v, n) for v in sorted(minima)),
        penalty_factor=penalty.factor,
    )


def calibrate_penalty(
    instance: ProblemInstance,
    profile: WeightProfile | None = None,
    max_iterations: int = 100,
) -> PenaltyConfig:
    """Smallest penalty from the incremental procedure pushing every unfeasible
    selection above the midpoint of the feasible optimum and feasible mean.

    Starts at A = 0 and raises A by exactly the amount that lifts the current
    binding unfeasible selection onto the threshold, until the condition holds.
    """
    if profile is None:
        profile = weight_profile(instance)
    B = instance.budget
    target = 0.5 * (float(profile.min_cost[B]) + profile.feasible_mean(B))
    slack = 1e-12 * max(1.0, abs(target))
    factor = 0.0
    for _ in range(max_iterations):
        f_min_nf, k, = profile.min_penalized_nf(B, factor)
        if f_min_nf >= target - slack:
            return PenaltyConfig(factor)
        factor += (target - f_min_nf) / (k - B) ** 2
    raise RuntimeError(f"penalty calibration did not converge in {max_iterations} iterations")


# ---------------------------------------------------------------------------
# performance measures
# ---------------------------------------------------------------------------


def approximation_ratio(summary: OracleSummary, z, instance: ProblemInstance) -> float:
    """Affine score placing the best feasible selection at 1, worst/unfeasible at 0."""
    if summary.f_min == summary.f_max:
        raise ValueError("degenerate landscape: f_min == f_max")
    zq = selection_array(z, instance.n)
    if int(zq.sum()) != instance.budget:
        return 0.0
    return float((cost(instance, zq) - summary.f_max) / (summary.f_min - summary.f_max))


def ratio_vector(summary: OracleSummary, instance: ProblemInstance) -> np.ndarray:
    """Approximation ratio of every selection, indexed by the integer encoding."""
    if summary.f_min == summary.f_max:
        raise ValueError("degenerate landscape: f_min == f_max")
    f = cost_vector(instance)
    feas = selection_weights(instance.n) == instance.budget
    r = np.zeros_like(f)
    r[feas] = (f[feas] - summary.f_max) / (summary.f_min - summary.f_max)
    return r


def _as_dense_distribution(distribution, n: int) -> np.ndarray:
    if isinstance(distribution, Mapping):
        dense = np.zeros(1 << n)
        for key, p in distribution.items():
            dense[selection_index(key, n)] += float(p)
    else:
        dense = np.asarray(distribution, dtype=float)
        if dense.shape != (1 << n,):
            raise ValueError(f"distribution must have length 2^{n}")
    total = dense.sum()
    if abs(total - 1.0) > 1e-9:
        raise ValueError(f"distribution not normalized: sums to {total!r}")
    return dense


def expected_ratio(distribution, summary: OracleSummary, instance: ProblemInstance) -> float:
    """Probability-weighted mean approximation ratio.

    `distribution` is either a dense vector over integer-encoded selections or
    a mapping from selection strings to probabilities, normalized within 1e-9.
    """
    dense = _as_dense_distribution(distribution, instance.n)
    return float(dense @ ratio_vector(summary, instance))


def ground_state_probability(distribution, summary: OracleSummary) -> float:
    """Total mass on the optimal feasible selection(s), degenerate optima included."""
    n = len(summary.argmin_state)
    dense = _as_dense_distribution(distribution, n)
    return float(sum(dense[selection_index(s, n)] for s in summary.degenerate_minima))


def hardness_stats(
    instance: ProblemInstance,
    g: float,
    r: float,
    profile: WeightProfile | None = None,
) -> HardnessStats:
    """Dispersion statistics of an instance plus the perf score sqrt(g^2 + r^2).

    The correlation sample runs over ordered pairs i <= j, so the n diagonal
    entries (Pearson coefficient 1) are part of the sample.
    """
    sigma, mu = instance.stats.sigma, instance.stats.mu
    diag = np.diag(sigma)
    if np.any(diag == 0):
        raise ValueError("zero variance on the diagonal: Pearson correlation undefined")
    denom = np.sqrt(np.outer(diag, diag))
    corr = sigma / denom
    iu = np.triu_indices(instance.n)
    corr_sample = corr[iu]
    if profile is None:
        profile = weight_profile(instance)
    return HardnessStats(
        s2_ret=float(np.var(mu)),
        s2_cor=float(np.var(corr_sample)),
        mu_energy=profile.feasible_mean(instance.budget),
        s2_energy=profile.feasible_variance(instance.budget),
        perf=float(np.hypot(g, r)),
    )


# ---------------------------------------------------------------------------
# JSON interfaces
# ---------------------------------------------------------------------------


def instance_to_json(instance: ProblemInstance, penalty: PenaltyConfig | None = None) -> str:
    doc = {
        "assets": list(instance.stats.asset_ids),
        "mu": [float(v) for v in instance.stats.mu],
        "sigma": [[float(v) for v in row] for row in instance.stats.sigma],
        "B": instance.budget,
        "q": instance.risk_factor,
    }
    if penalty is not None:
        doc["A"] = penalty.factor
    return json.dumps(doc, indent=2)


def instance_from_json(text: str) -> tuple[ProblemInstance, PenaltyConfig | None]:
    doc = json.loads(text)
    stats = MarketStats(tuple(doc["assets"]), np.array(doc["mu"], dtype=float),
                        np.array(doc["sigma"], dtype=float))
    instance = ProblemInstance(stats, int(doc["B"]), float(doc["q"]))
    penalty = PenaltyConfig(float(doc["A"])) if "A" in doc else None
    return instance, penalty


def summary_to_json(summary: OracleSummary) -> str:
    return json.dumps(
        {
            "f_min": summary.f_min,
            "f_max": summary.f_max,
            "f_mean": summary.f_mean,
            "f_min_nf": summary.f_min_nf,
            "f_max_nf": summary.f_max_nf,
            "penalty_factor": summary.penalty_factor,
            "argmin_state": summary.argmin_state,
            "degenerate_minima": list(summary.degenerate_minima),
        },
        indent=2,
    )


def summary_from_json(text: str) -> OracleSummary:
    doc = json.loads(text)
    return OracleSummary(
        f_min=doc["f_min"],
        f_max=doc["f_max"],
        f_mean=doc["f_mean"],
        f_min_nf=doc["f_min_nf"],
        f_max_nf=doc["f_max_nf"],
        argmin_state=doc["argmin_state"],
        degenerate_minima=tuple(doc["degenerate_minima"]),
        penalty_factor=doc["penalty_factor"],
    )
