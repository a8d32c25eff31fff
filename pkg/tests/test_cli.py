import csv
import json
import subprocess
import sys
from pathlib import Path

import numpy as np
import pytest

from qaoa_portfolio.cli import (
    RunConfig,
    cmd_ensemble,
    cmd_hardness,
    cmd_landscape,
    cmd_noise_sweep,
    cmd_solve,
    config_from_args,
    landscape_axes,
    main,
)
from qaoa_portfolio.market import build_market_stats, save_stats_csv, synthetic_price_pool
from qaoa_portfolio.problem import instance_to_json
from qaoa_portfolio.reference import reference_instance


def read_rows(path):
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


class TestSolve:
    def test_reference_smoke(self, tmp_path):
        config = RunConfig(out_dir=str(tmp_path), mixers=("full",), p_max=2, seed=7)
        report = cmd_solve(config)
        assert set(report["portfolio"]) <= set(reference_instance().stats.asset_ids)
        assert len(report["portfolio"]) == 2
        assert 0.0 <= report["approximation_ratio"] <= 1.0
        for name in ("results.csv", "schedule_instance0.json", "report.json", "meta.json",
                     "timings.csv"):
            assert (tmp_path / name).exists()
        rows = read_rows(tmp_path / "results.csv")
        assert [int(r["p"]) for r in rows] == [1, 2]

    def test_return_only_instance_picks_top_returns(self, tmp_path):
        # q = 0 with distinct returns: the optimum is the best-return pair
        inst = reference_instance(budget=2, risk_factor=0.0)
        path = tmp_path / "inst.json"
        path.write_text(instance_to_json(inst))
        config = RunConfig(out_dir=str(tmp_path / "run"), mixers=("full",), p_max=3,
                           instance_json=str(path), seed=0)
        report = cmd_solve(config)
        top2 = {"LIN.DE", "MTX.DE"}  # two largest entries of the return table
        assert set(report["portfolio"]) == top2
        assert report["optimal_selection"] == "10010"

    def test_byte_identical_reruns(self, tmp_path):
        out1, out2 = tmp_path / "a", tmp_path / "b"
        for out in (out1, out2):
            cmd_solve(RunConfig(out_dir=str(out), mixers=("ring",), p_max=2, seed=5))
        for name in ("results.csv", "schedule_instance0.json", "report.json", "meta.json"):
            a = (out1 / name).read_bytes()
            b = (out2 / name).read_bytes()
            assert a.replace(str(out1).encode(), b"") == b.replace(str(out2).encode(), b"")

    def test_sampling_evaluator(self, tmp_path):
        config = RunConfig(out_dir=str(tmp_path), mixers=("full",), p_max=1,
                           evaluator="sampling", shots=400, seed=3)
        report = cmd_solve(config)
        assert 0.0 <= report["ground_state_probability"] <= 1.0


class TestEnsemble:
    def test_small_ensemble(self, tmp_path):
        config = RunConfig(out_dir=str(tmp_path), mixers=("full", "standard"), p_max=2,
                           instances=2, pool="synthetic", pool_size=8, n_assets=5, seed=1)
        rows = cmd_ensemble(config)
        assert len(rows) == 2 * 2 * 2  # instances x mixers x depths
        for row in rows:
            assert 0.0 <= row.r <= 1.0 and 0.0 <= row.P <= 1.0
        table = read_rows(tmp_path / "results.csv")
        assert len(table) == 8
        summary = read_rows(tmp_path / "ensemble_summary.csv")
        assert {(s["mixer"], s["p"]) for s in summary} == {
            ("full", "1"), ("full", "2"), ("standard", "1"), ("standard", "2")}
        assert (tmp_path / "schedule_ens000_full.json").exists()

    def test_instance_draws_are_seeded(self, tmp_path):
        config = RunConfig(out_dir=str(tmp_path / "x"), mixers=("ring",), p_max=1,
                           instances=2, pool="synthetic", pool_size=10, seed=4)
        rows1 = cmd_ensemble(config)
        config2 = RunConfig(out_dir=str(tmp_path / "y"), mixers=("ring",), p_max=1,
                            instances=2, pool="synthetic", pool_size=10, seed=4)
        rows2 = cmd_ensemble(config2)
        assert [(r.instance, r.r, r.P) for r in rows1] == [(r.instance, r.r, r.P) for r in rows2]


class TestLandscape:
    def test_axes_match_stated_grid(self):
        gammas, betas = landscape_axes()
        assert gammas.size == 251 and betas.size == 125
        assert gammas[0] == pytest.approx(0.025)
        assert gammas[-1] <= 2 * np.pi
        assert betas[-1] <= np.pi

    def test_coarse_grid_with_noise(self, tmp_path):
        config = RunConfig(out_dir=str(tmp_path), mixers=("ring", "standard"),
                           eta_tildes=(0.0, 10.0), landscape_step=0.7, seed=0)
        minima = cmd_landscape(config)
        assert len(minima) == 4
        files = sorted(p.name for p in Path(tmp_path).glob("landscape_*.csv"))
        assert "landscape_ring_0.0.csv" in files and "landscape_standard_10.0.csv" in files
        grid = read_rows(tmp_path / "landscape_ring_0.0.csv")
        assert len(grid) == len(landscape_axes(0.7)[1])
        # noiseless minima are below the heavily noisy ones
        assert minima["ring@0.0"] < minima["ring@10.0"]

    def test_minima_table_written(self, tmp_path):
        config = RunConfig(out_dir=str(tmp_path), mixers=("full",), eta_tildes=(0.0,),
                           landscape_step=1.0)
        cmd_landscape(config)
        table = read_rows(tmp_path / "landscape_minima.csv")
        assert table[0]["mixer"] == "full"


class TestNoiseSweep:
    def test_small_sweep(self, tmp_path):
        config = RunConfig(out_dir=str(tmp_path), mixers=("standard", "ring"), p_max=1,
                           etas=(0.0, 0.01), report_depths=(1,), measurement_samples=512,
                           seed=2)
        rows = cmd_noise_sweep(config)
        assert len(rows) == 2 * 2
        etas = {float(r.eta) for r in rows}
        assert etas == {0.0, 0.01}
        table = read_rows(tmp_path / "results.csv")
        assert {t["eta"] for t in table} == {"0.0", "0.01"}


class TestHardness:
    def test_small_run(self, tmp_path):
        config = RunConfig(out_dir=str(tmp_path), pool="synthetic", pool_size=12,
                           n_assets=10, budget=5, hardness_count=3, hardness_keep=2,
                           hardness_p_max=2, seed=6)
        records = cmd_hardness(config)
        assert len(records) == 3
        for rec in records:
            for key in ("perf", "s2_ret", "s2_cor", "mu_energy", "s2_energy"):
                assert np.isfinite(rec[key])
        best = read_rows(tmp_path / "hardness_best.csv")
        worst = read_rows(tmp_path / "hardness_worst.csv")
        assert len(best) == 2 and len(worst) == 2
        perfs = [float(r["perf"]) for r in read_rows(tmp_path / "hardness.csv")]
        assert max(perfs) == pytest.approx(float(best[0]["perf"]))


class TestConfigPlumbing:
    def test_config_file_and_overrides(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"p_max": 4, "mixers": ["ring"], "seed": 9}))
        import argparse

        from qaoa_portfolio.cli import _build_parser

        args = _build_parser().parse_args(
            ["solve", "--config", str(path), "--pmax", "2", "--evaluator", "statevector"]
        )
        config = config_from_args(args)
        assert config.p_max == 2  # flag overrides file
        assert config.mixers == ("ring",)
        assert config.seed == 9

    def test_unknown_config_key_rejected(self, tmp_path):
        path = tmp_path / "config.json"
        path.write_text(json.dumps({"mixer_count": 3}))
        with pytest.raises(ValueError):
            RunConfig.from_json(path)

    def test_stats_files_pool(self, tmp_path):
        stats = build_market_stats(synthetic_price_pool(6, days=50, seed=2))
        save_stats_csv(stats, tmp_path / "cov.csv", tmp_path / "ret.csv")
        config = RunConfig(out_dir=str(tmp_path / "out"), mixers=("ring",), p_max=1,
                           covariance_csv=str(tmp_path / "cov.csv"),
                           returns_csv=str(tmp_path / "ret.csv"),
                           instances=1, n_assets=5)
        rows = cmd_ensemble(config)
        assert len(rows) == 1

    def test_main_entrypoint(self, tmp_path):
        rc = main(["solve", "--out-dir", str(tmp_path), "--mixer", "ring", "--pmax", "1"])
        assert rc == 0
        assert (tmp_path / "report.json").exists()

    def test_console_script_help(self):
        proc = subprocess.run(
            [sys.executable, "-m", "qaoa_portfolio.cli", "ensemble", "--help"],
            capture_output=True, text=True, timeout=120,
        )
        assert proc.returncode == 0
        assert "--pmax" in proc.stdout
