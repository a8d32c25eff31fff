"""Budget-constrained binary portfolio optimization with QAOA.

Library layout: `market` (price ingestion and annualized statistics),
`problem` (cost model, brute-force oracle, penalty calibration, measures),
`ising` (diagonal-operator encoding and spectral scaling), `gates` and
`simulator` (dense statevector / density-matrix engine with per-gate
depolarizing noise), `circuits` (mixer orderings and ansatz assembly),
`evaluators` (expectation engines), `optimize` and `schedule` (the classical
outer loop), `estimator` (sklearn-style front end) and `cli` (benchmark
commands).
"""

__version__ = "0.1.0"

from .circuits import AnsatzCircuit, MixerSpec, build_ansatz, cnot_count, make_mixer, pair_order
from .estimator import QAOAPortfolioOptimizer
from .evaluators import (
    DensityEvaluator,
    SamplingEvaluator,
    StatevectorEvaluator,
    make_evaluator,
)
from .gates import Gate, cnot_level, gate_matrix
from .ising import (
    IsingModel,
    decode,
    diagonal_energy,
    diagonal_vector,
    encode,
    rescale,
    spectral_scaling,
    to_cost_units,
)
from .market import (
    MarketStats,
    PriceSeries,
    annualized_covariance,
    annualized_return,
    build_market_stats,
    daily_changes,
    load_price_csv,
    load_stats_csv,
    save_stats_csv,
    synthetic_price_pool,
)
from .optimize import OptimizerConfig, gradient_optimize, nelder_mead
from .problem import (
    HardnessStats,
    OracleSummary,
    PenaltyConfig,
    ProblemInstance,
    approximation_ratio,
    brute_force_summary,
    calibrate_penalty,
    cost,
    expected_ratio,
    ground_state_probability,
    hardness_stats,
    penalized_cost,
    weight_profile,
)
from .reference import reference_instance, reference_stats
from .schedule import (
    Schedule,
    grid_points,
    init_interpolate,
    init_zero_pad,
    linear_angles,
    quadratic_angles,
    run_schedule,
)
from .simulator import (
    DensityMatrix,
    StateVector,
    apply_depolarizing,
    apply_gate,
    expectation_diagonal,
    normalize_noise,
    prepare_dicke,
    prepare_plus,
    sample,
)
