import numpy as np
import pytest

from qaoa_portfolio.circuits import build_ansatz, make_mixer
from qaoa_portfolio.evaluators import (
    DensityEvaluator,
    SamplingEvaluator,
    StatevectorEvaluator,
    make_evaluator,
)
from qaoa_portfolio.ising import diagonal_vector, encode, spectral_scaling
from qaoa_portfolio.simulator import apply_depolarizing, apply_gate, density_from_statevector

RNG = np.random.default_rng(11)


@pytest.fixture(scope="module")
def circuits(ref_instance, ref_penalty, ref_summary):
    out = {}
    for kind in ("standard", "ring", "par_ring", "full", "qampa"):
        lam = spectral_scaling(ref_instance, ref_summary, kind)
        model = encode(ref_instance, ref_penalty, lam)
        budget = None if kind == "standard" else 2
        out[kind] = build_ansatz(model, make_mixer(kind, 5), 2, budget)
    return out


class TestStatevectorEvaluator:
    def test_matches_gate_by_gate(self, circuits):
        from qaoa_portfolio.circuits import initial_state
        from qaoa_portfolio.simulator import expectation_diagonal

        for kind, circuit in circuits.items():
            evaluator = StatevectorEvaluator(circuit)
            for _ in range(4):
                g = RNG.uniform(-2, 2, 2)
                b = RNG.uniform(-2, 2, 2)
                state = initial_state(circuit.mixer, circuit.budget)
                for gate in circuit.gates(g, b):
                    apply_gate(state, gate)
                slow = expectation_diagonal(state, circuit.model)
                assert evaluator.expectation(g, b) == pytest.approx(slow, rel=1e-9)

    def test_batch_matches_single(self, circuits):
        for circuit in circuits.values():
            evaluator = StatevectorEvaluator(circuit)
            gs = RNG.uniform(-2, 2, (7, 2))
            bs = RNG.uniform(-2, 2, (7, 2))
            batch = evaluator.expectation_batch(gs, bs)
            singles = [evaluator.expectation(gs[i], bs[i]) for i in range(7)]
            np.testing.assert_allclose(batch, singles, rtol=1e-12, atol=1e-12)

    def test_distribution_normalized(self, circuits):
        for circuit in circuits.values():
            probs = StatevectorEvaluator(circuit).distribution([0.3, 0.1], [0.5, 0.2])
            assert probs.sum() == pytest.approx(1.0, abs=1e-9)

    def test_angle_shape_validation(self, circuits):
        evaluator = StatevectorEvaluator(circuits["full"])
        with pytest.raises(ValueError):
            evaluator.expectation([0.1], [0.2])
        with pytest.raises(ValueError):
            evaluator.expectation_batch(np.ones((3, 1)), np.ones((3, 1)))


class TestSamplingEvaluator:
    def test_deterministic_sequence(self, circuits):
        a = SamplingEvaluator(circuits["full"], shots=500, seed=9)
        b = SamplingEvaluator(circuits["full"], shots=500, seed=9)
        g, bb = [0.4, 0.2], [0.3, 0.6]
        for _ in range(3):
            assert a.expectation(g, bb) == b.expectation(g, bb)

    def test_converges_to_exact(self, circuits):
        circuit = circuits["ring"]
        sv = StatevectorEvaluator(circuit)
        se = SamplingEvaluator(circuit, shots=200_000, seed=4)
        g, b = [0.4, 0.2], [0.3, 0.6]
        exact = sv.expectation(g, b)
        diag = diagonal_vector(circuit.model)
        probs = sv.distribution(g, b)
        sigma = np.sqrt((probs @ diag**2 - exact**2) / 200_000)
        assert abs(se.expectation(g, b) - exact) < 5 * sigma

    def test_distribution_is_histogram(self, circuits):
        se = SamplingEvaluator(circuits["full"], shots=100, seed=2)
        dist = se.distribution([0.1, 0.1], [0.1, 0.1])
        assert dist.sum() == pytest.approx(1.0, abs=1e-12)
        np.testing.assert_allclose(np.round(dist * 100), dist * 100, atol=1e-9)


class TestDensityEvaluator:
    def test_noiseless_matches_statevector(self, circuits):
        for kind, circuit in circuits.items():
            sv = StatevectorEvaluator(circuit)
            de = DensityEvaluator(circuit, eta=0.0)
            g = RNG.uniform(-1, 1, 2)
            b = RNG.uniform(-1, 1, 2)
            assert de.expectation(g, b) == pytest.approx(sv.expectation(g, b), abs=1e-9)
            rho = de.state(g, b).matrix
            psi = sv.state(g, b).amplitudes
            assert np.abs(rho - np.outer(psi, psi.conj())).max() < 1e-9

    def test_matches_reference_channel_loop(self, circuits):
        # the fused superoperator path equals gate application followed by
        # an explicit depolarizing channel on the touched qubits
        circuit = circuits["ring"]
        eta = 0.02
        de = DensityEvaluator(circuit, eta=eta)
        g, b = [0.5, -0.3], [0.7, 0.2]
        from qaoa_portfolio.circuits import initial_state

        dm = density_from_statevector(initial_state(circuit.mixer, 2))
        for gate in circuit.gates(g, b, level="cnot"):
            apply_gate(dm, gate)
            apply_depolarizing(dm, gate.targets, eta)
        np.testing.assert_allclose(de.state(g, b).matrix, dm.matrix, atol=1e-11)

    def test_trace_preserved_and_probs_clipped(self, circuits):
        de = DensityEvaluator(circuits["qampa"], eta=0.05)
        state = de.state([0.4, 0.1], [0.2, 0.3])
        assert state.trace() == pytest.approx(1.0, abs=1e-9)
        dist = de.distribution([0.4, 0.1], [0.2, 0.3])
        assert dist.min() >= 0.0
        assert dist.sum() == pytest.approx(1.0, abs=1e-12)

    def test_saturating_noise_gives_global_mean(self, circuits):
        circuit = circuits["full"]
        de = DensityEvaluator(circuit, eta=1.0)
        mean = diagonal_vector(circuit.model).mean()
        for g, b in ((0.3, 0.4), (1.5, 0.9)):
            assert de.expectation([g, g], [b, b]) == pytest.approx(mean, abs=1e-9)

    def test_eta_validation(self, circuits):
        with pytest.raises(ValueError):
            DensityEvaluator(circuits["full"], eta=-0.1)


class TestFactory:
    def test_dispatch(self, circuits):
        circuit = circuits["full"]
        assert isinstance(make_evaluator("statevector", circuit), StatevectorEvaluator)
        assert isinstance(make_evaluator("sampling", circuit, shots=10, seed=1), SamplingEvaluator)
        assert isinstance(make_evaluator("density", circuit, eta=0.01), DensityEvaluator)
        with pytest.raises(ValueError):
            make_evaluator("tensor-network", circuit)
