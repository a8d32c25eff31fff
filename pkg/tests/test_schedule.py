import json

import numpy as np
import pytest

from qaoa_portfolio.circuits import build_ansatz, make_mixer
from qaoa_portfolio.evaluators import StatevectorEvaluator
from qaoa_portfolio.gates import gate_matrix
from qaoa_portfolio.ising import diagonal_vector, encode, spectral_scaling
from qaoa_portfolio.optimize import OptimizerConfig
from qaoa_portfolio.schedule import (
    geometric_grid,
    grid_points,
    init_interpolate,
    init_zero_pad,
    linear_angles,
    quadratic_angles,
    run_schedule,
)

from conftest import random_instance


class TestAngleHelpers:
    def test_grid_points(self):
        np.testing.assert_allclose(grid_points(1), [0.5])
        np.testing.assert_allclose(grid_points(2), [0.25, 0.75])
        np.testing.assert_allclose(grid_points(3), [1 / 6, 0.5, 5 / 6])

    def test_linear_angles_depth_one(self):
        g, b = linear_angles(3.0, 1.4, 1)
        np.testing.assert_allclose(g, [1.5])
        np.testing.assert_allclose(b, [0.7])

    def test_linear_angles_zero_slope(self):
        g, _ = linear_angles(0.0, 1.0, 4)
        np.testing.assert_array_equal(g, np.zeros(4))

    def test_linear_angles_depth_two(self):
        g, b = linear_angles(4.0, 4.0, 2)
        np.testing.assert_allclose(g, [1.0, 3.0])
        np.testing.assert_allclose(b, [3.0, 1.0])

    def test_linear_monotonic(self):
        g, b = linear_angles(2.0, 3.0, 6)
        assert np.all(np.diff(g) > 0)
        assert np.all(np.diff(b) < 0)

    def test_quadratic_reduces_to_linear(self):
        m1, m2 = 2.5, 1.1
        for p in (1, 3, 5):
            qg, qb = quadratic_angles((0.0, m1, 0.0, m2, -m2, 0.0), p)
            lg, lb = linear_angles(m1, m2, p)
            np.testing.assert_allclose(qg, lg, atol=1e-15)
            np.testing.assert_allclose(qb, lb, atol=1e-15)

    def test_quadratic_constant(self):
        g, b = quadratic_angles((0.7, 0.0, 0.0, -0.2, 0.0, 0.0), 3)
        np.testing.assert_array_equal(g, np.full(3, 0.7))
        np.testing.assert_array_equal(b, np.full(3, -0.2))

    def test_interpolate_hand_example(self):
        g, b = init_interpolate([1.0, 3.0], [0.5, 0.5], 3)
        np.testing.assert_allclose(g, [2 / 3, 2.0, 10 / 3])
        np.testing.assert_allclose(b, [0.5, 0.5, 0.5])

    def test_interpolate_constant(self):
        g, _ = init_interpolate([0.9, 0.9, 0.9], [0.1, 0.1, 0.1], 5)
        np.testing.assert_allclose(g, np.full(5, 0.9))

    def test_interpolate_from_depth_one(self):
        g, b = init_interpolate([0.8], [0.3], 2)
        np.testing.assert_array_equal(g, [0.8, 0.8])
        np.testing.assert_array_equal(b, [0.3, 0.3])

    def test_zero_pad(self):
        g, b = init_zero_pad([0.4], [0.6])
        np.testing.assert_array_equal(g, [0.4, 0.0])
        np.testing.assert_array_equal(b, [0.6, 0.0])
        g2, _ = init_zero_pad(*init_zero_pad([0.4], [0.6]))
        np.testing.assert_array_equal(g2, [0.4, 0.0, 0.0])

    def test_geometric_grid_open_interval(self):
        pts = geometric_grid((0.01, 100.0), 10)
        assert pts.size == 10
        assert pts[0] > 0.01 and pts[-1] < 100.0
        assert pts[0] == pytest.approx(0.01 * (100.0 / 0.01) ** (1 / 11))
        ratios = pts[1:] / pts[:-1]
        np.testing.assert_allclose(ratios, ratios[0])


@pytest.fixture(scope="module")
def setup(ref_instance, ref_penalty, ref_summary):
    lam = spectral_scaling(ref_instance, ref_summary, "full")
    model = encode(ref_instance, ref_penalty, lam)
    return model, make_mixer("full", 5)


class TestRunSchedule:
    def test_monotone_and_rebalanced(self, setup, ref_summary):
        model, mixer = setup
        schedule = run_schedule(model, mixer, 2, 4, evaluator_factory=StatevectorEvaluator,
                                optimizer=OptimizerConfig())
        values = [r.expectation_unscaled for r in schedule.records]
        assert all(values[i + 1] <= values[i] + 1e-12 for i in range(len(values) - 1))
        assert all(v >= ref_summary.f_min - 1e-9 for v in values)
        for record in schedule.records:
            assert abs(np.abs(record.gamma).sum() - np.abs(record.beta).sum()) < 1e-12

    def test_rescale_preserves_physics(self, setup):
        model, mixer = setup
        collected = []

        def on_depth(record, evaluator):
            collected.append(evaluator.distribution(record.gamma, record.beta))

        schedule = run_schedule(model, mixer, 2, 3, evaluator_factory=StatevectorEvaluator,
                                optimizer=OptimizerConfig(), on_depth=on_depth)
        # re-evaluating with the post-rescale angles and post-rescale model
        # reproduces the recorded unscaled expectation and the distribution
        current = model
        from qaoa_portfolio.ising import rescale

        for record, dist in zip(schedule.records, collected):
            if record.rescale_factor != 1.0:
                current = rescale(current, record.rescale_factor)
            ev = StatevectorEvaluator(build_ansatz(current, mixer, record.depth, 2))
            assert ev.expectation(record.gamma, record.beta) / current.cumulative_scale == (
                pytest.approx(record.expectation_unscaled, rel=1e-9)
            )
            np.testing.assert_allclose(
                ev.distribution(record.gamma, record.beta), dist, atol=1e-9
            )

    def test_zero_pad_is_identity_layer(self, setup):
        # appending gamma = beta = 0 leaves the expectation exactly unchanged,
        # which floors each depth at the previous optimum
        model, mixer = setup
        schedule = run_schedule(model, mixer, 2, 2, evaluator_factory=StatevectorEvaluator,
                                optimizer=OptimizerConfig())
        from qaoa_portfolio.ising import rescale

        current = model
        for record in schedule.records:
            if record.rescale_factor != 1.0:
                current = rescale(current, record.rescale_factor)
        last = schedule.records[-1]
        padded_g, padded_b = init_zero_pad(last.gamma, last.beta)
        ev = StatevectorEvaluator(build_ansatz(current, mixer, last.depth + 1, 2))
        value = ev.expectation(padded_g, padded_b) / current.cumulative_scale
        assert value == pytest.approx(last.expectation_unscaled, rel=1e-12)

    def test_grid_uses_100_points(self, setup):
        model, mixer = setup
        counter = {"n": 0}

        class Counting(StatevectorEvaluator):
            def expectation_batch(self, gs, bs):
                counter["n"] += gs.shape[0]
                return super().expectation_batch(gs, bs)

        run_schedule(model, mixer, 2, 1, evaluator_factory=Counting,
                     optimizer=OptimizerConfig(max_iterations=1))
        assert counter["n"] >= 100  # the depth-1 grid alone contributes 100

    def test_records_and_json(self, setup):
        model, mixer = setup
        schedule = run_schedule(model, mixer, 2, 2, evaluator_factory=StatevectorEvaluator,
                                optimizer=OptimizerConfig())
        doc = json.loads(schedule.to_json())
        assert doc["p_max"] == 2
        assert [d["p"] for d in doc["depths"]] == [1, 2]
        first = doc["depths"][0]
        assert set(first) >= {"p", "strategy_chosen", "gamma", "beta",
                              "expectation_unscaled", "evaluations_used", "mu_rescale", "runs"}
        assert doc["depths"][0]["strategy_chosen"] == "grid"
        assert doc["depths"][1]["strategy_chosen"] in (
            "interpolate", "linear", "quadratic", "zero_pad")

    def test_interpolate_only_mode(self, setup):
        model, mixer = setup
        schedule = run_schedule(model, mixer, 2, 3, evaluator_factory=StatevectorEvaluator,
                                optimizer=OptimizerConfig(), strategies=("interpolate",))
        assert all(r.strategy in ("grid", "interpolate") for r in schedule.records)

    def test_unknown_strategy_rejected(self, setup):
        model, mixer = setup
        with pytest.raises(ValueError):
            run_schedule(model, mixer, 2, 2, evaluator_factory=StatevectorEvaluator,
                         strategies=("warm",))


class TestDepthOneOracle:
    def test_statevector_matches_dense_matrix_oracle(self):
        # independent oracle: embed every gate via kron products and multiply
        rng = np.random.default_rng(31)
        for n in (4, 5, 6):
            inst = random_instance(n, n // 2, seed=[21, n])
            from qaoa_portfolio.problem import calibrate_penalty

            pen = calibrate_penalty(inst)
            model = encode(inst, pen, 2.0)
            for kind in ("standard", "ring", "full", "qampa"):
                mixer = make_mixer(kind, n)
                budget = None if kind == "standard" else n // 2
                circuit = build_ansatz(model, mixer, 1, budget)
                evaluator = StatevectorEvaluator(circuit)
                for _ in range(5 if n < 6 else 3):
                    g = float(rng.uniform(-2, 2))
                    b = float(rng.uniform(-2, 2))
                    dim = 1 << n
                    unitary = np.eye(dim, dtype=complex)
                    for gate in circuit.gates([g], [b]):
                        unitary = _embed(gate_matrix(gate), gate.targets, n) @ unitary
                    if kind == "standard":
                        psi0 = np.full(dim, dim**-0.5, dtype=complex)
                    else:
                        from qaoa_portfolio.simulator import dicke_amplitudes

                        psi0 = dicke_amplitudes(n, n // 2)
                    psi = unitary @ psi0
                    oracle = float(np.real(np.vdot(psi, diagonal_vector(model) * psi)))
                    assert evaluator.expectation([g], [b]) == pytest.approx(oracle, rel=1e-9)


def _embed(matrix, targets, n):
    """Kron-product embedding, independent of the simulator's axis tricks."""
    dim = 1 << n
    full = np.zeros((dim, dim), dtype=complex)
    k = len(targets)
    for row in range(1 << k):
        for col in range(1 << k):
            if matrix[row, col] == 0:
                continue
            for rest in range(1 << (n - k)):
                src = _weave(col, rest, targets, n)
                dst = _weave(row, rest, targets, n)
                full[dst, src] += matrix[row, col]
    return full


def _weave(block, rest, targets, n):
    """Compose a basis index from block bits on `targets` and the rest."""
    others = [q for q in range(n) if q not in targets]
    s = 0
    for pos, q in enumerate(reversed(targets)):
        s |= ((block >> pos) & 1) << q
    for pos, q in enumerate(others):
        s |= ((rest >> pos) & 1) << q
    return s
