import numpy as np
import pytest

from qaoa_portfolio.market import MarketStats, build_market_stats, synthetic_price_pool
from qaoa_portfolio.problem import (
    ProblemInstance,
    brute_force_summary,
    calibrate_penalty,
    weight_profile,
)
from qaoa_portfolio.reference import reference_instance
from qaoa_portfolio.simulator import rng_from_seed


@pytest.fixture(scope="session")
def ref_instance():
    return reference_instance()


@pytest.fixture(scope="session")
def ref_profile(ref_instance):
    return weight_profile(ref_instance)


@pytest.fixture(scope="session")
def ref_penalty(ref_instance, ref_profile):
    return calibrate_penalty(ref_instance, ref_profile)


@pytest.fixture(scope="session")
def ref_summary(ref_instance, ref_penalty, ref_profile):
    return brute_force_summary(ref_instance, ref_penalty, ref_profile)


@pytest.fixture(scope="session")
def pool30():
    """Thirty-asset synthetic pool used for ensemble-style tests."""
    return build_market_stats(synthetic_price_pool(30, seed=0))


def random_instance(n: int, budget: int, seed, q: float = 1.0 / 3.0) -> ProblemInstance:
    """Random but well-conditioned instance in realistic magnitude ranges."""
    rng = rng_from_seed(seed)
    mu = rng.uniform(-0.2, 0.4, size=n)
    root = rng.normal(scale=0.15, size=(n, n + 2))
    sigma = root @ root.T / (n + 2)
    stats = MarketStats(tuple(f"R{i:02d}" for i in range(n)), mu, 0.5 * (sigma + sigma.T))
    return ProblemInstance(stats, budget, q)
