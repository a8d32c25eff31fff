"""Bundled five-asset reference instance (annualized DAX statistics)."""

from __future__ import annotations

import numpy as np

from .market import MarketStats
from .problem import ProblemInstance

REFERENCE_ASSET_IDS = ("LIN.DE", "BAYN.DE", "VNA.DE", "MTX.DE", "MUV2.DE")

REFERENCE_RETURNS = (0.26801758, -0.11724968, 0.2109537, 0.21523688, 0.1128935)

REFERENCE_COVARIANCE = (
    (0.21117209, 0.03030933, 0.00941277, 0.02972179, 0.02922818),
    (0.03030933, 0.08796365, 0.01833403, 0.0465302, 0.04069187),
    (0.00941277, 0.01833403, 0.04971719, 0.02303918, 0.02051608),
    (0.02972179, 0.0465302, 0.02303918, 0.13717214, 0.05638483),
    (0.02922818, 0.04069187, 0.02051608, 0.05638483, 0.06765634),
)


def reference_stats() -> MarketStats:
    return MarketStats(
        asset_ids=REFERENCE_ASSET_IDS,
        mu=np.array(REFERENCE_RETURNS),
        sigma=np.array(REFERENCE_COVARIANCE),
    )


def reference_instance(budget: int = 2, risk_factor: float = 1.0 / 3.0) -> ProblemInstance:
    return ProblemInstance(reference_stats(), budget, risk_factor)
