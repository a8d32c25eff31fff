import numpy as np
import pytest
from scipy.linalg import expm

from qaoa_portfolio.gates import (
    Gate,
    cnot_level,
    decompose_gate,
    gate_matrix,
    gates_from_json,
    gates_to_json,
    merge_single_qubit_run,
    zyz_angles,
)

X = np.array([[0, 1], [1, 0]], dtype=complex)
Y = np.array([[0, -1j], [1j, 0]])
Z = np.diag([1.0, -1.0]).astype(complex)
XX, YY, ZZ = np.kron(X, X), np.kron(Y, Y), np.kron(Z, Z)

RNG = np.random.default_rng(2024)


def embed_two_qubit(gates, qa=0, qb=1):
    """4x4 matrix of a two-qubit gate list, independent of the simulator."""
    acc = np.eye(4, dtype=complex)
    for g in gates:
        m = gate_matrix(g)
        if len(g.targets) == 1:
            full = np.kron(m, np.eye(2)) if g.targets[0] == qa else np.kron(np.eye(2), m)
        else:
            full = m if g.targets == (qa, qb) else _swap_conj(m)
        acc = full @ acc
    return acc


def _swap_conj(m):
    swap = np.array([[1, 0, 0, 0], [0, 0, 1, 0], [0, 1, 0, 0], [0, 0, 0, 1]], dtype=complex)
    return swap @ m @ swap


def assert_equal_up_to_phase(a, b, tol=1e-9):
    k = np.unravel_index(np.argmax(np.abs(b)), b.shape)
    phase = a[k] / b[k]
    assert abs(abs(phase) - 1.0) < tol
    np.testing.assert_allclose(a, phase * b, atol=tol)


class TestMatrices:
    def test_composites_match_matrix_exponentials(self):
        for _ in range(25):
            beta = float(RNG.uniform(-7, 7))
            theta = float(RNG.uniform(-7, 7))
            np.testing.assert_allclose(
                gate_matrix(Gate("rxy", (0, 1), (beta,))),
                expm(1j * beta * (XX + YY)),
                atol=1e-12,
            )
            np.testing.assert_allclose(
                gate_matrix(Gate("rzz", (0, 1), (theta,))), expm(-1j * theta * ZZ), atol=1e-12
            )
            np.testing.assert_allclose(
                gate_matrix(Gate("rxyzz", (0, 1), (beta, theta))),
                expm(1j * beta * (XX + YY) - 1j * theta * ZZ),
                atol=1e-12,
            )

    def test_single_qubit_conventions(self):
        phi = 0.731
        np.testing.assert_allclose(gate_matrix(Gate("rx", (0,), (phi,))), expm(-1j * phi / 2 * X), atol=1e-12)
        np.testing.assert_allclose(gate_matrix(Gate("rz", (0,), (phi,))), expm(-1j * phi / 2 * Z), atol=1e-12)
        h = gate_matrix(Gate("h", (0,)))
        np.testing.assert_allclose(h @ h, np.eye(2), atol=1e-12)

    def test_cnot_action(self):
        cnot = gate_matrix(Gate("cnot", (0, 1)))
        state = np.zeros(4)
        state[0b10] = 1.0  # control (first target) set
        np.testing.assert_allclose(cnot @ state, np.eye(4)[0b11], atol=1e-15)

    def test_all_gates_unitary(self):
        gates = [
            Gate("h", (0,)),
            Gate("rx", (0,), (0.3,)),
            Gate("rz", (0,), (-1.2,)),
            Gate("u", (0,), (0.4, 1.1, -0.7)),
            Gate("cnot", (0, 1)),
            Gate("rxy", (0, 1), (0.9,)),
            Gate("rzz", (0, 1), (2.2,)),
            Gate("rxyzz", (0, 1), (0.9, 2.2)),
        ]
        for g in gates:
            m = gate_matrix(g)
            np.testing.assert_allclose(m @ m.conj().T, np.eye(m.shape[0]), atol=1e-12)

    def test_swap_rotation_subspace(self):
        # e^{ib(XX+YY)}|01> = cos(2b)|01> + i sin(2b)|10>; pi/4 gives i|10>
        m = gate_matrix(Gate("rxy", (0, 1), (np.pi / 4,)))
        out = m @ np.eye(4)[0b01]
        np.testing.assert_allclose(out, 1j * np.eye(4)[0b10], atol=1e-12)
        for beta in RNG.uniform(-5, 5, size=8):
            m = gate_matrix(Gate("rxy", (0, 1), (float(beta),)))
            np.testing.assert_allclose(m @ np.eye(4)[0], np.eye(4)[0], atol=1e-12)
            np.testing.assert_allclose(m @ np.eye(4)[3], np.eye(4)[3], atol=1e-12)

    def test_validation(self):
        with pytest.raises(ValueError):
            Gate("cnot", (1, 1))
        with pytest.raises(ValueError):
            Gate("rx", (0,))
        with pytest.raises(ValueError):
            Gate("nope", (0,))


class TestDecompositions:
    @pytest.mark.parametrize("kind,n_params", [("rxy", 1), ("rzz", 1), ("rxyzz", 2)])
    def test_matches_composite_up_to_phase(self, kind, n_params):
        for _ in range(20):
            params = tuple(float(v) for v in RNG.uniform(-6, 6, size=n_params))
            gate = Gate(kind, (0, 1), params)
            raw = decompose_gate(gate)
            assert_equal_up_to_phase(embed_two_qubit(raw), gate_matrix(gate))
            merged = cnot_level([gate])
            assert_equal_up_to_phase(embed_two_qubit(merged), gate_matrix(gate))

    def test_swap_and_phase_rotations_are_phase_exact(self):
        # the 2-CNOT circuits reproduce the composite with no global phase
        for _ in range(10):
            beta = float(RNG.uniform(-6, 6))
            np.testing.assert_allclose(
                embed_two_qubit(decompose_gate(Gate("rxy", (0, 1), (beta,)))),
                gate_matrix(Gate("rxy", (0, 1), (beta,))),
                atol=1e-12,
            )
            np.testing.assert_allclose(
                embed_two_qubit(decompose_gate(Gate("rzz", (0, 1), (beta,)))),
                gate_matrix(Gate("rzz", (0, 1), (beta,))),
                atol=1e-12,
            )

    def test_cnot_counts(self):
        count = lambda gs: sum(1 for g in gs if g.kind == "cnot")
        assert count(decompose_gate(Gate("rxy", (0, 1), (0.3,)))) == 2
        assert count(decompose_gate(Gate("rzz", (0, 1), (0.3,)))) == 2
        assert count(decompose_gate(Gate("rxyzz", (0, 1), (0.3, 0.4)))) == 3

    def test_reversed_targets(self):
        gate = Gate("rxy", (1, 0), (0.7,))
        assert_equal_up_to_phase(embed_two_qubit(cnot_level([gate]), qa=1, qb=0), gate_matrix(gate))

    def test_merge_collapses_runs(self):
        run = [Gate("h", (2,)), Gate("rz", (2,), (0.4,)), Gate("rx", (2,), (-1.0,))]
        merged = merge_single_qubit_run(run)
        assert merged.kind == "u" and merged.targets == (2,)
        acc = np.eye(2, dtype=complex)
        for g in run:
            acc = gate_matrix(g) @ acc
        assert_equal_up_to_phase(gate_matrix(merged), acc, tol=1e-10)

    def test_cnot_level_preserves_plain_gates(self):
        program = [Gate("rz", (0,), (0.2,)), Gate("cnot", (0, 1)), Gate("rx", (1,), (0.5,))]
        assert cnot_level(program) == program


class TestZyz:
    def test_roundtrip_random_unitaries(self):
        for _ in range(30):
            a = RNG.normal(size=(2, 2)) + 1j * RNG.normal(size=(2, 2))
            q, _ = np.linalg.qr(a)
            theta, phi, lam = zyz_angles(q)
            rebuilt = gate_matrix(Gate("u", (0,), (theta, phi, lam)))
            assert_equal_up_to_phase(rebuilt, q, tol=1e-10)

    def test_diagonal_case(self):
        theta, phi, lam = zyz_angles(np.diag([1.0, 1j]))
        assert theta == pytest.approx(0.0, abs=1e-12)


class TestSerialization:
    def test_roundtrip(self):
        program = [
            Gate("h", (0,)),
            Gate("rxyzz", (0, 3), (0.25, -1.5)),
            Gate("cnot", (1, 2)),
        ]
        assert gates_from_json(gates_to_json(program)) == program
