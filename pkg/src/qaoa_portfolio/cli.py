"""Benchmark command line.

Subcommands: `solve` (one instance end to end), `ensemble` (convergence over
randomly drawn baskets), `landscape` (depth-1 angle grids per mixer and
normalized noise strength), `noise-sweep` (schedules under per-gate
depolarizing noise), `hardness` (instance difficulty ranking). All outputs
are data files (CSV/JSON). Given identical configuration and seeds, the data
files are byte-identical across runs; wall-clock timings go to a separate
timings.csv that is exempt from that guarantee.
"""

from __future__ import annotations

import argparse
import csv
import json
import sys
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields, replace
from pathlib import Path

import numpy as np

from . import __version__
from .circuits import build_ansatz, make_mixer
from .evaluators import StatevectorEvaluator, make_evaluator
from .ising import (
    MIXER_KINDS,
    basis_to_selection_permutation,
    encode,
    spectral_scaling,
)
from .market import (
    MarketStats,
    build_market_stats,
    load_price_csv,
    load_stats_csv,
    synthetic_price_pool,
)
from .optimize import OptimizerConfig
from .problem import (
    PenaltyConfig,
    ProblemInstance,
    brute_force_summary,
    calibrate_penalty,
    expected_ratio,
    ground_state_probability,
    hardness_stats,
    instance_from_json,
    selection_array,
    selection_weights,
    weight_profile,
)
from .reference import reference_stats
from .schedule import run_schedule
from .simulator import normalize_noise, rng_from_seed

LANDSCAPE_STEP = 0.025
DEFAULT_ETA_TILDES = (0.0, 0.1, 1.0, 2.0, 4.0, 10.0)
DEFAULT_ETAS = tuple(round(0.001 * k, 3) for k in range(11))
RESULT_COLUMNS = ("instance", "mixer", "p", "r", "P", "expectation", "eta", "evaluations")


@dataclass
class RunConfig:
    out_dir: str = "runs"
    seed: int = 0
    n_assets: int = 5
    budget: int = 2
    risk_factor: float = 1.0 / 3.0
    mixers: tuple[str, ...] = MIXER_KINDS
    p_max: int = 7
    evaluator: str = "statevector"
    shots: int = 1000
    optimizer: str = "auto"
    penalty: float | str = "auto"
    scaling: float | str = "auto"
    instances: int = 20
    pool: str = "reference"  # reference | synthetic | files
    pool_size: int = 30
    prices_csv: str | None = None
    covariance_csv: str | None = None
    returns_csv: str | None = None
    instance_json: str | None = None
    eta_tildes: tuple[float, ...] = DEFAULT_ETA_TILDES
    etas: tuple[float, ...] = DEFAULT_ETAS
    landscape_step: float = LANDSCAPE_STEP
    measurement_samples: int = 8192
    report_depths: tuple[int, ...] = (1, 3, 5, 7)
    hardness_count: int = 2400
    hardness_keep: int = 20
    hardness_penalty: float = 0.2
    hardness_scaling: float = 6.0
    hardness_p_max: int = 6
    workers: int = 1

    @classmethod
    def from_json(cls, path) -> "RunConfig":
        doc = json.loads(Path(path).read_text())
        known = {f.name for f in fields(cls)}
        unknown = set(doc) - known
        if unknown:
            raise ValueError(f"unknown config keys: {sorted(unknown)}")
        for key in ("mixers", "eta_tildes", "etas", "report_depths"):
            if key in doc:
                doc[key] = tuple(doc[key])
        return cls(**doc)


@dataclass
class ResultRow:
    instance: str
    mixer: str
    p: int
    r: float
    P: float
    expectation: float
    eta: float | str
    wall_time: float
    evaluations: int

    def __post_init__(self):
        if not (0.0 <= self.r <= 1.0 and 0.0 <= self.P <= 1.0):
            raise ValueError(f"measures out of range: r={self.r}, P={self.P}")


# ---------------------------------------------------------------------------
# shared plumbing
# ---------------------------------------------------------------------------


def load_pool(config: RunConfig) -> MarketStats:
    if config.prices_csv:
        return build_market_stats(load_price_csv(config.prices_csv))
    if config.covariance_csv or config.returns_csv:
        if not (config.covariance_csv and config.returns_csv):
            raise ValueError("need both covariance and returns CSVs")
        return load_stats_csv(config.covariance_csv, config.returns_csv)
    if config.pool == "reference":
        return reference_stats()
    if config.pool == "synthetic":
        return build_market_stats(synthetic_price_pool(config.pool_size, seed=config.seed))
    raise ValueError(f"unknown pool source {config.pool!r}")


def resolve_instance(config: RunConfig) -> tuple[ProblemInstance, PenaltyConfig | None]:
    if config.instance_json:
        return instance_from_json(Path(config.instance_json).read_text())
    pool = load_pool(config)
    if pool.n == config.n_assets:
        stats = pool
    else:
        stats = pool.select(range(config.n_assets))
    return ProblemInstance(stats, config.budget, config.risk_factor), None


def draw_instance(pool: MarketStats, config: RunConfig, index: int) -> ProblemInstance:
    """Uniform draw of n assets without replacement, seeded per instance index."""
    rng = rng_from_seed([config.seed, index])
    idx = rng.choice(pool.n, size=config.n_assets, replace=False)
    return ProblemInstance(pool.select(idx), config.budget, config.risk_factor)


def prepare_model(instance, config: RunConfig, mixer_kind: str, fixed_penalty=None):
    """Penalty, oracle summary and encoded model for one (instance, mixer)."""
    profile = weight_profile(instance)
    if fixed_penalty is not None:
        penalty = fixed_penalty
    elif config.penalty == "auto":
        penalty = calibrate_penalty(instance, profile)
    else:
        penalty = PenaltyConfig(float(config.penalty))
    summary = brute_force_summary(instance, penalty, profile)
    if config.scaling == "auto":
        scale = spectral_scaling(instance, summary, mixer_kind)
    else:
        scale = float(config.scaling)
    model = encode(instance, penalty, scale)
    return penalty, summary, model


def selection_distribution(probs: np.ndarray, n: int) -> np.ndarray:
    return probs[basis_to_selection_permutation(n)]


def _evaluator_factory(config: RunConfig, seed):
    def factory(circuit):
        return make_evaluator(
            config.evaluator, circuit, shots=config.shots, seed=seed, eta=0.0
        )

    return factory


def run_instance_mixer(
    instance, config: RunConfig, mixer_kind: str, label: str, seed, fixed_penalty=None
):
    """Full schedule for one instance and mixer; returns per-depth rows."""
    penalty, summary, model = prepare_model(instance, config, mixer_kind, fixed_penalty)
    mixer = make_mixer(mixer_kind, instance.n)
    rows: list[ResultRow] = []
    started = time.perf_counter()

    def on_depth(record, evaluator):
        probs = evaluator.distribution(record.gamma, record.beta)
        dist = selection_distribution(np.asarray(probs, dtype=float), instance.n)
        dist = dist / dist.sum()
        rows.append(
            ResultRow(
                instance=label,
                mixer=mixer_kind,
                p=record.depth,
                r=expected_ratio(dist, summary, instance),
                P=ground_state_probability(dist, summary),
                expectation=record.expectation_unscaled,
                eta="",
                wall_time=0.0,
                evaluations=record.evaluations,
            )
        )

    schedule = run_schedule(
        model,
        mixer,
        instance.budget,
        config.p_max,
        evaluator_factory=_evaluator_factory(config, seed),
        optimizer=OptimizerConfig(method=config.optimizer),
        on_depth=on_depth,
    )
    elapsed = time.perf_counter() - started
    for row in rows:
        row.wall_time = elapsed / len(rows)
    return rows, schedule, summary, penalty


# ---------------------------------------------------------------------------
# deterministic writers
# ---------------------------------------------------------------------------


def _fmt(value) -> str:
    if isinstance(value, float):
        return repr(float(value))
    return str(value)


def write_results_csv(rows, out_dir: Path) -> Path:
    """ResultRow table sorted by keys; wall times go to timings.csv so the
    data file is byte-identical across reruns."""
    rows = sorted(
        rows,
        key=lambda r: (r.instance, r.mixer, float(r.eta) if r.eta != "" else -1.0, r.p),
    )
    path = out_dir / "results.csv"
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(RESULT_COLUMNS)
        for r in rows:
            writer.writerow(
                [r.instance, r.mixer, r.p, _fmt(r.r), _fmt(r.P), _fmt(r.expectation),
                 _fmt(r.eta), r.evaluations]
            )
    with open(out_dir / "timings.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["instance", "mixer", "p", "eta", "wall_time_s"])
        for r in rows:
            writer.writerow([r.instance, r.mixer, r.p, _fmt(r.eta), f"{r.wall_time:.3f}"])
    return path


def write_meta(config: RunConfig, command: str, out_dir: Path, extra: dict | None = None):
    doc = {
        "command": command,
        "package_version": __version__,
        "python": ".".join(map(str, sys.version_info[:3])),
        "numpy": np.__version__,
        "config": asdict(config),
        "optimizer_methods": {
            "exact_evaluators": "bfgs quasi-Newton with central finite differences",
            "noisy_evaluators": "nelder_mead (simplex 0.5, iteration cap 10 x parameters)",
        },
    }
    if extra:
        doc.update(extra)
    (out_dir / "meta.json").write_text(json.dumps(doc, indent=2, sort_keys=True))


def _out_dir(config: RunConfig) -> Path:
    out = Path(config.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


# ---------------------------------------------------------------------------
# commands
# ---------------------------------------------------------------------------


def cmd_solve(config: RunConfig) -> dict:
    out = _out_dir(config)
    instance, fixed_penalty = resolve_instance(config)
    mixer_kind = config.mixers[0]
    rows, schedule, summary, penalty = run_instance_mixer(
        instance, config, mixer_kind, "instance0", [config.seed, 0], fixed_penalty
    )
    final = schedule.records[-1]
    circuit = build_ansatz(schedule.final_model, make_mixer(mixer_kind, instance.n),
                           config.p_max, instance.budget)
    evaluator = _evaluator_factory(config, [config.seed, 0, 99])(circuit)
    probs = np.asarray(evaluator.distribution(final.gamma, final.beta), dtype=float)
    dist = selection_distribution(probs, instance.n)
    dist = dist / dist.sum()
    feasible = selection_weights(instance.n) == instance.budget
    mode = int(np.argmax(np.where(feasible, dist, -1.0)))
    chosen = selection_array(mode, instance.n)
    report = {
        "assets": list(instance.stats.asset_ids),
        "budget": instance.budget,
        "risk_factor": instance.risk_factor,
        "penalty_factor": penalty.factor,
        "mixer": mixer_kind,
        "p_max": config.p_max,
        "portfolio": [a for a, z in zip(instance.stats.asset_ids, chosen) if z],
        "selection": "".join(str(int(z)) for z in chosen),
        "optimal_selection": summary.argmin_state,
        "approximation_ratio": expected_ratio(dist, summary, instance),
        "ground_state_probability": ground_state_probability(dist, summary),
    }
    write_results_csv(rows, out)
    (out / "schedule_instance0.json").write_text(schedule.to_json())
    (out / "report.json").write_text(json.dumps(report, indent=2, sort_keys=True))
    write_meta(config, "solve", out)
    return report


def _ensemble_task(args):
    instance, config, mixer_kind, label, seed = args
    rows, schedule, _, _ = run_instance_mixer(instance, config, mixer_kind, label, seed)
    return rows, (label, mixer_kind, schedule.to_json())


def cmd_ensemble(config: RunConfig) -> list[ResultRow]:
    out = _out_dir(config)
    pool = load_pool(config)
    if pool.n < config.n_assets:
        raise ValueError(f"pool has {pool.n} assets, need {config.n_assets}")
    tasks = []
    for k in range(config.instances):
        instance = draw_instance(pool, config, k)
        label = f"ens{k:03d}"
        for m_idx, mixer_kind in enumerate(config.mixers):
            tasks.append((instance, config, mixer_kind, label, [config.seed, k, m_idx]))
    results = _pmap(_ensemble_task, tasks, config.workers)
    rows = [row for chunk, _ in results for row in chunk]
    for _, (label, mixer_kind, sched_json) in results:
        (out / f"schedule_{label}_{mixer_kind}.json").write_text(sched_json)
    write_results_csv(rows, out)
    _write_ensemble_summary(rows, out)
    write_meta(config, "ensemble", out)
    return rows


def _write_ensemble_summary(rows, out: Path):
    groups: dict[tuple[str, int], list[ResultRow]] = {}
    for row in rows:
        groups.setdefault((row.mixer, row.p), []).append(row)
    with open(out / "ensemble_summary.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mixer", "p", "mean_one_minus_r", "std_one_minus_r", "mean_P", "std_P"])
        for (mixer, p) in sorted(groups):
            rs = np.array([1.0 - r.r for r in groups[(mixer, p)]])
            ps = np.array([r.P for r in groups[(mixer, p)]])
            writer.writerow([mixer, p, _fmt(rs.mean()), _fmt(rs.std()),
                             _fmt(ps.mean()), _fmt(ps.std())])


def landscape_axes(step: float = LANDSCAPE_STEP) -> tuple[np.ndarray, np.ndarray]:
    gammas = step * np.arange(1, int(2 * np.pi / step) + 1)
    betas = step * np.arange(1, int(np.pi / step) + 1)
    return gammas, betas


def landscape_grid(instance, config: RunConfig, mixer_kind: str, eta_tilde: float) -> np.ndarray:
    """Expectation on the depth-1 angle grid; rows are beta, columns gamma."""
    _, _, model = prepare_model(instance, config, mixer_kind)
    mixer = make_mixer(mixer_kind, instance.n)
    circuit = build_ansatz(model, mixer, 1, instance.budget)
    gammas, betas = landscape_axes(config.landscape_step)
    grid = np.empty((betas.size, gammas.size))
    if eta_tilde == 0.0:
        evaluator = StatevectorEvaluator(circuit)
        column = betas[:, None]
        for j, g in enumerate(gammas):
            grid[:, j] = evaluator.expectation_batch(np.full_like(column, g), column)
    else:
        eta = normalize_noise(eta_tilde, circuit.gate_count())
        evaluator = make_evaluator("density", circuit, eta=eta)
        for j, g in enumerate(gammas):
            for i, b in enumerate(betas):
                grid[i, j] = evaluator.expectation([g], [b])
    return grid


def _landscape_task(args):
    instance, config, mixer_kind, eta_tilde = args
    return mixer_kind, eta_tilde, landscape_grid(instance, config, mixer_kind, eta_tilde)


def cmd_landscape(config: RunConfig) -> dict:
    out = _out_dir(config)
    instance, _ = resolve_instance(config)
    gammas, betas = landscape_axes(config.landscape_step)
    tasks = [
        (instance, config, mixer_kind, eta_tilde)
        for mixer_kind in config.mixers
        for eta_tilde in config.eta_tildes
    ]
    minima = {}
    for mixer_kind, eta_tilde, grid in _pmap(_landscape_task, tasks, config.workers):
        path = out / f"landscape_{mixer_kind}_{_fmt(float(eta_tilde))}.csv"
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(["beta\\gamma"] + [_fmt(float(g)) for g in gammas])
            for i, b in enumerate(betas):
                writer.writerow([_fmt(float(b))] + [_fmt(v) for v in grid[i]])
        minima[(mixer_kind, eta_tilde)] = float(grid.min())
    with open(out / "landscape_minima.csv", "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(["mixer", "eta_tilde", "min_expectation"])
        for (mixer_kind, eta_tilde) in sorted(minima, key=lambda k: (k[0], k[1])):
            writer.writerow([mixer_kind, _fmt(float(eta_tilde)), _fmt(minima[(mixer_kind, eta_tilde)])])
    write_meta(config, "landscape", out)
    return {f"{m}@{e}": v for (m, e), v in minima.items()}


def _noise_task(args):
    instance, config, mixer_kind, m_idx, eta, e_idx = args
    penalty, summary, model = prepare_model(instance, config, mixer_kind)
    mixer = make_mixer(mixer_kind, instance.n)
    rows: list[ResultRow] = []
    started = time.perf_counter()

    def factory(circuit):
        return make_evaluator("density", circuit, eta=eta)

    def on_depth(record, evaluator):
        if record.depth not in config.report_depths:
            return
        probs = evaluator.distribution(record.gamma, record.beta)
        rng = rng_from_seed([config.seed, 7000 + m_idx, e_idx, record.depth])
        counts = rng.multinomial(config.measurement_samples, probs / probs.sum())
        dist = selection_distribution(counts / config.measurement_samples, instance.n)
        rows.append(
            ResultRow(
                instance="noise0",
                mixer=mixer_kind,
                p=record.depth,
                r=expected_ratio(dist, summary, instance),
                P=ground_state_probability(dist, summary),
                expectation=record.expectation_unscaled,
                eta=eta,
                wall_time=0.0,
                evaluations=record.evaluations,
            )
        )

    run_schedule(
        model,
        mixer,
        instance.budget,
        config.p_max,
        evaluator_factory=factory,
        optimizer=OptimizerConfig(method=config.optimizer),
        on_depth=on_depth,
    )
    elapsed = time.perf_counter() - started
    for row in rows:
        row.wall_time = elapsed / max(len(rows), 1)
    return rows


def cmd_noise_sweep(config: RunConfig) -> list[ResultRow]:
    out = _out_dir(config)
    instance, _ = resolve_instance(config)
    tasks = [
        (instance, config, mixer_kind, m_idx, eta, e_idx)
        for m_idx, mixer_kind in enumerate(config.mixers)
        for e_idx, eta in enumerate(config.etas)
    ]
    rows = [row for chunk in _pmap(_noise_task, tasks, config.workers) for row in chunk]
    write_results_csv(rows, out)
    write_meta(config, "noise-sweep", out)
    return rows


def _hardness_task(args):
    instance, config, label, seed = args
    hardness_config = replace(
        config,
        mixers=("standard",),
        penalty=config.hardness_penalty,
        scaling=config.hardness_scaling,
        p_max=config.hardness_p_max,
    )
    penalty, summary, model = prepare_model(instance, hardness_config, "standard")
    mixer = make_mixer("standard", instance.n)
    final = {}

    def on_depth(record, evaluator):
        final["dist"] = selection_distribution(
            np.asarray(evaluator.distribution(record.gamma, record.beta), dtype=float),
            instance.n,
        )

    run_schedule(
        model,
        mixer,
        instance.budget,
        hardness_config.p_max,
        evaluator_factory=_evaluator_factory(hardness_config, seed),
        optimizer=OptimizerConfig(method=hardness_config.optimizer),
        strategies=("interpolate",),
        on_depth=on_depth,
    )
    dist = final["dist"] / final["dist"].sum()
    r = expected_ratio(dist, summary, instance)
    p_gs = ground_state_probability(dist, summary)
    stats = hardness_stats(instance, p_gs, r)
    return {
        "instance": label,
        "assets": ",".join(instance.stats.asset_ids),
        "r": r,
        "P": p_gs,
        "perf": stats.perf,
        "s2_ret": stats.s2_ret,
        "s2_cor": stats.s2_cor,
        "mu_energy": stats.mu_energy,
        "s2_energy": stats.s2_energy,
    }


def cmd_hardness(config: RunConfig) -> list[dict]:
    out = _out_dir(config)
    if config.pool == "reference":
        config = replace(config, pool="synthetic")  # reference pool is too small
    pool = load_pool(config)
    if pool.n < config.n_assets:
        raise ValueError(f"pool has {pool.n} assets, need {config.n_assets}")
    tasks = []
    for k in range(config.hardness_count):
        instance = draw_instance(pool, config, k)
        tasks.append((instance, config, f"hard{k:04d}", [config.seed, 5, k]))
    records = list(_pmap(_hardness_task, tasks, config.workers))
    records.sort(key=lambda rec: rec["instance"])
    columns = ["instance", "assets", "r", "P", "perf", "s2_ret", "s2_cor", "mu_energy", "s2_energy"]

    def dump(path, rows):
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(columns)
            for rec in rows:
                writer.writerow([_fmt(rec[c]) if isinstance(rec[c], float) else rec[c] for c in columns])

    dump(out / "hardness.csv", records)
    ranked = sorted(records, key=lambda rec: (-rec["perf"], rec["instance"]))
    keep = config.hardness_keep
    dump(out / "hardness_best.csv", ranked[:keep])
    dump(out / "hardness_worst.csv", ranked[-keep:][::-1])
    write_meta(config, "hardness", out)
    return records


def _pmap(fn, tasks, workers: int):
    if workers <= 1:
        return [fn(t) for t in tasks]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, tasks))


# ---------------------------------------------------------------------------
# argument parsing
# ---------------------------------------------------------------------------


def _build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="qaoa-portfolio",
        description="Budget-constrained portfolio optimization benchmarks with QAOA",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    for name in ("solve", "ensemble", "landscape", "noise-sweep", "hardness"):
        p = sub.add_parser(name)
        p.add_argument("--config", type=str, default=None, help="JSON file mirroring RunConfig")
        p.add_argument("--seed", type=int, default=None)
        p.add_argument("--out-dir", type=str, default=None)
        p.add_argument("--mixer", type=str, default=None,
                       help="comma-separated mixer list (standard,ring,par_ring,full,qampa)")
        p.add_argument("--pmax", type=int, default=None)
        p.add_argument("--evaluator", type=str, default=None,
                       choices=("statevector", "sampling", "density"))
        p.add_argument("--shots", type=int, default=None)
        p.add_argument("--n", type=int, default=None, help="assets per instance")
        p.add_argument("--budget", type=int, default=None)
        p.add_argument("--risk-factor", type=float, default=None)
        p.add_argument("--penalty", type=str, default=None, help="'auto' or a fixed factor")
        p.add_argument("--scaling", type=str, default=None, help="'auto' or a fixed factor")
        p.add_argument("--instances", type=int, default=None)
        p.add_argument("--pool", type=str, default=None, choices=("reference", "synthetic", "files"))
        p.add_argument("--pool-size", type=int, default=None)
        p.add_argument("--prices-csv", type=str, default=None)
        p.add_argument("--covariance-csv", type=str, default=None)
        p.add_argument("--returns-csv", type=str, default=None)
        p.add_argument("--instance-json", type=str, default=None)
        p.add_argument("--etas", type=str, default=None, help="comma-separated per-gate strengths")
        p.add_argument("--eta-tildes", type=str, default=None,
                       help="comma-separated normalized strengths")
        p.add_argument("--measurement-samples", type=int, default=None)
        p.add_argument("--hardness-count", type=int, default=None)
        p.add_argument("--workers", type=int, default=None)
    return parser


_FLAG_TO_FIELD = {
    "seed": "seed",
    "out_dir": "out_dir",
    "pmax": "p_max",
    "evaluator": "evaluator",
    "shots": "shots",
    "n": "n_assets",
    "budget": "budget",
    "risk_factor": "risk_factor",
    "instances": "instances",
    "pool": "pool",
    "pool_size": "pool_size",
    "prices_csv": "prices_csv",
    "covariance_csv": "covariance_csv",
    "returns_csv": "returns_csv",
    "instance_json": "instance_json",
    "measurement_samples": "measurement_samples",
    "hardness_count": "hardness_count",
    "workers": "workers",
}


def config_from_args(args: argparse.Namespace) -> RunConfig:
    config = RunConfig.from_json(args.config) if args.config else RunConfig()
    updates = {}
    for flag, field_name in _FLAG_TO_FIELD.items():
        value = getattr(args, flag, None)
        if value is not None:
            updates[field_name] = value
    if args.mixer is not None:
        updates["mixers"] = tuple(m.strip() for m in args.mixer.split(","))
    if args.penalty is not None:
        updates["penalty"] = "auto" if args.penalty == "auto" else float(args.penalty)
    if args.scaling is not None:
        updates["scaling"] = "auto" if args.scaling == "auto" else float(args.scaling)
    if args.etas is not None:
        updates["etas"] = tuple(float(v) for v in args.etas.split(","))
    if args.eta_tildes is not None:
        updates["eta_tildes"] = tuple(float(v) for v in args.eta_tildes.split(","))
    return replace(config, **updates)


_COMMANDS = {
    "solve": cmd_solve,
    "ensemble": cmd_ensemble,
    "landscape": cmd_landscape,
    "noise-sweep": cmd_noise_sweep,
    "hardness": cmd_hardness,
}


def main(argv=None) -> int:
    args = _build_parser().parse_args(argv)
    config = config_from_args(args)
    _COMMANDS[args.command](config)
    print(f"{args.command}: outputs written to {config.out_dir}")
    return 0


if __name__ == "__main__":
    sys.exit(main())
