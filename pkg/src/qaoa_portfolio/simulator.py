"""Dense n-qubit statevector and density-matrix simulation.

Basis ordering is little endian: qubit 0 is the least significant bit of the
basis index. States own their buffers; gate application mutates in place and
returns the state for chaining. All randomness flows through explicitly
seeded counter-based generators (Philox); there is no global RNG state.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import comb
from typing import Sequence

import numpy as np

from .gates import Gate, gate_matrix, _ry
from .ising import IsingModel, diagonal_vector

MAX_STATEVECTOR_QUBITS = 24
MAX_DENSITY_QUBITS = 14


def rng_from_seed(seed) -> np.random.Generator:
    """Counter-based generator from an explicit seed (int or sequence of ints)."""
    if not isinstance(seed, np.random.SeedSequence):
        seed = np.random.SeedSequence(seed)
    return np.random.Generator(np.random.Philox(seed))


@dataclass
class StateVector:
    n: int
    amplitudes: np.ndarray

    def __post_init__(self):
        if self.amplitudes.shape != (1 << self.n,):
            raise ValueError("amplitude length must be 2^n")

    def norm(self) -> float:
        return float(np.linalg.norm(self.amplitudes))

    def check_normalized(self, tol: float = 1e-9) -> None:
        if abs(self.norm() - 1.0) > tol:
            raise ValueError(f"statevector norm {self.norm()} departs from 1")

    def probabilities(self) -> np.ndarray:
        return np.abs(self.amplitudes) ** 2

    def copy(self) -> "StateVector":
        return StateVector(self.n, self.amplitudes.copy())


@dataclass
class DensityMatrix:
    n: int
    matrix: np.ndarray

    def __post_init__(self):
        dim = 1 << self.n
        if self.matrix.shape != (dim, dim):
            raise ValueError("density matrix must be 2^n x 2^n")

    def trace(self) -> float:
        return float(np.real(np.trace(self.matrix)))

    def probabilities(self) -> np.ndarray:
        p = np.real(np.diag(self.matrix)).copy()
        np.clip(p, 0.0, None, out=p)
        return p

    def copy(self) -> "DensityMatrix":
        return DensityMatrix(self.n, self.matrix.copy())


def _check_statevector_size(n: int) -> None:
    if not 1 <= n <= MAX_STATEVECTOR_QUBITS:
        raise ValueError(f"statevector simulation limited to {MAX_STATEVECTOR_QUBITS} qubits, got n={n}")


def _check_density_size(n: int) -> None:
    if not 1 <= n <= MAX_DENSITY_QUBITS:
        raise ValueError(f"density-matrix simulation limited to {MAX_DENSITY_QUBITS} qubits, got n={n}")


def prepare_plus(n: int) -> StateVector:
    """Uniform superposition over all basis states."""
    _check_statevector_size(n)
    amps = np.full(1 << n, 2.0 ** (-n / 2), dtype=complex)
    return StateVector(n, amps)


def dicke_amplitudes(n: int, budget: int) -> np.ndarray:
    """Equal amplitudes on every selection of exactly `budget` assets.

    Selected assets sit in |0>, so the populated basis states are those with
    n - budget set bits.
    """
    ones_target = n - budget
    idx = np.arange(1 << n, dtype=np.int64)
    pop = np.zeros(1 << n, dtype=np.int64)
    for b in range(n):
        pop += (idx >> b) & 1
    amps = np.zeros(1 << n, dtype=complex)
    amps[pop == ones_target] = 1.0 / np.sqrt(comb(n, budget))
    return amps


def prepare_dicke(n: int, budget: int, method: str = "direct") -> StateVector:
    """Uniform superposition over the feasible (budget-satisfying) selections.

    `method="direct"` writes the amplitudes; `method="network"` runs the
    deterministic split-and-cyclic-shift gate construction, which must agree
    with the direct amplitudes to 1e-9.
    """
    _check_statevector_size(n)
    if not 0 < budget < n:
        raise ValueError(f"budget must satisfy 0 < B < n, got B={budget}, n={n}")
    if method == "direct":
        return StateVector(n, dicke_amplitudes(n, budget))
    if method != "network":
        raise ValueError(f"unknown preparation method {method!r}")
    weight = n - budget  # set-bit count of feasible basis states
    amps = np.zeros(1 << n, dtype=complex)
    seed = sum(1 << q for q in range(n - weight, n))
    amps[seed] = 1.0
    state = StateVector(n, amps)
    for u, targets in _dicke_network_ops(n, weight):
        apply_unitary(state, u, targets)
    return state


def _controlled(u: np.ndarray, controls: int) -> np.ndarray:
    """Controlled u with control qubits as the leading block indices."""
    dim = u.shape[0] << controls
    out = np.eye(dim, dtype=complex)
    out[-u.shape[0]:, -u.shape[0]:] = u
    return out


def _dicke_network_ops(n: int, weight: int):
    """Split-and-cyclic-shift network mapping |0...01...1> (weight set bits)
    to the uniform weight-`weight` superposition."""
    cnot = gate_matrix(Gate("cnot", (0, 1)))

    def scs_ops(span: int, excitations: int, offset: int):
        # two-qubit split on the top pair of the span
        theta = 2.0 * np.arccos(np.sqrt(1.0 / span))
        a, b = offset + excitations - 1, offset + excitations
        yield cnot, (a, b)
        yield _controlled(_ry(theta), 1), (b, a)
        yield cnot, (a, b)
        # three-qubit splits walking down the span
        for level in range(2, excitations + 1):
            theta = 2.0 * np.arccos(np.sqrt(level / span))
            a = offset + excitations - level
            mid = a + 1
            top = offset + excitations
            yield cnot, (a, top)
            yield _controlled(_ry(theta), 2), (top, mid, a)
            yield cnot, (a, top)

    for span in range(n, weight, -1):
        yield from scs_ops(span, weight, span - weight - 1)
    for span in range(weight, 1, -1):
        yield from scs_ops(span, span - 1, 0)


# ---------------------------------------------------------------------------
# gate application
# ---------------------------------------------------------------------------


def _apply_unitary_sv(amps: np.ndarray, u: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    k = len(targets)
    axes = [n - 1 - q for q in targets]
    psi = np.moveaxis(amps.reshape([2] * n), axes, range(k))
    shape = psi.shape
    psi = u @ psi.reshape(1 << k, -1)
    return np.moveaxis(psi.reshape(shape), range(k), axes).reshape(-1)


def _apply_rows_dm(matrix: np.ndarray, u: np.ndarray, targets: Sequence[int], n: int) -> np.ndarray:
    k = len(targets)
    axes = [n - 1 - q for q in targets]
    rho = np.moveaxis(matrix.reshape([2] * n + [1 << n]), axes, range(k))
    shape = rho.shape
    rho = u @ rho.reshape(1 << k, -1)
    return np.moveaxis(rho.reshape(shape), range(k), axes).reshape(1 << n, 1 << n)


def apply_unitary(state, u: np.ndarray, targets: Sequence[int]):
    """Apply a dense unitary on the given qubits (statevector or density matrix)."""
    targets = tuple(int(t) for t in targets)
    if len(set(targets)) != len(targets) or any(not 0 <= t < state.n for t in targets):
        raise ValueError(f"invalid targets {targets} for {state.n} qubits")
    if u.shape != (1 << len(targets), 1 << len(targets)):
        raise ValueError("unitary dimension does not match target count")
    if isinstance(state, StateVector):
        state.amplitudes = _apply_unitary_sv(state.amplitudes, u, targets, state.n)
    elif isinstance(state, DensityMatrix):
        rho = _apply_rows_dm(state.matrix, u, targets, state.n)
        rho = _apply_rows_dm(rho.conj().T, u, targets, state.n)
        state.matrix = rho.conj().T
    else:
        raise TypeError(f"unsupported state type {type(state)!r}")
    return state


def apply_gate(state, gate: Gate):
    """Apply one gate from the ansatz vocabulary in place."""
    return apply_unitary(state, gate_matrix(gate), gate.targets)


def apply_depolarizing(state: DensityMatrix, qubits: Sequence[int], eta: float) -> DensityMatrix:
    """Local depolarizing channel on 1 or 2 qubits.

    The reduced state on the touched qubits is replaced by the maximally
    mixed one with probability eta; trace is preserved exactly.
    """
    if not isinstance(state, DensityMatrix):
        raise TypeError("depolarizing channel requires a density matrix")
    if not 0.0 <= eta <= 1.0:
        raise ValueError(f"eta must lie in [0, 1], got {eta}")
    qubits = tuple(int(q) for q in qubits)
    if len(qubits) not in (1, 2) or len(set(qubits)) != len(qubits):
        raise ValueError(f"channel acts on 1 or 2 distinct qubits, got {qubits}")
    if any(not 0 <= q < state.n for q in qubits):
        raise ValueError(f"invalid qubits {qubits} for {state.n} qubits")
    if eta == 0.0:
        return state
    n, k = state.n, len(qubits)
    dim_k = 1 << k
    row_axes = [n - 1 - q for q in qubits]
    col_axes = [2 * n - 1 - q for q in qubits]
    tensor = np.moveaxis(state.matrix.reshape([2] * (2 * n)), row_axes + col_axes, range(2 * k))
    shape = tensor.shape
    block = tensor.reshape(dim_k, dim_k, -1)
    traced = np.einsum("aab->b", block)
    block = block * (1.0 - eta)
    step = dim_k + 1
    block.reshape(dim_k * dim_k, -1)[::step] += (eta / dim_k) * traced
    tensor = np.moveaxis(block.reshape(shape), range(2 * k), row_axes + col_axes)
    state.matrix = tensor.reshape(1 << n, 1 << n)
    return state


def density_from_statevector(state: StateVector) -> DensityMatrix:
    _check_density_size(state.n)
    return DensityMatrix(state.n, np.outer(state.amplitudes, state.amplitudes.conj()))


# ---------------------------------------------------------------------------
# measurement and expectation
# ---------------------------------------------------------------------------


def expectation_diagonal(state, model: IsingModel, cost_units: bool = False) -> float:
    """Expectation of the encoded diagonal operator; optionally un-scaled."""
    if state.n != model.n:
        raise ValueError(f"state has {state.n} qubits but model has {model.n}")
    value = float(state.probabilities() @ diagonal_vector(model))
    return value / model.cumulative_scale if cost_units else value


def sample(state, shots: int, seed) -> np.ndarray:
    """Multinomial measurement counts over basis indices; deterministic per seed."""
    if shots < 1:
        raise ValueError("shots must be >= 1")
    probs = state.probabilities()
    total = probs.sum()
    if abs(total - 1.0) > 1e-6:
        raise ValueError(f"state probabilities sum to {total!r}")
    return rng_from_seed(seed).multinomial(shots, probs / total)


def counts_to_selections(counts: np.ndarray, n: int) -> dict[str, int]:
    """Histogram keyed by selection strings (asset order, 1 = selected)."""
    from .problem import selection_string

    mask = (1 << n) - 1
    return {
        selection_string(int(s) ^ mask, n): int(c)
        for s, c in enumerate(counts)
        if c > 0
    }


def normalize_noise(eta_tilde: float, gate_count: int) -> float:
    """Per-gate depolarizing strength from a circuit-normalized strength."""
    if gate_count < 1:
        raise ValueError("gate_count must be >= 1")
    if eta_tilde < 0:
        raise ValueError("noise strength must be non-negative")
    eta = eta_tilde / gate_count
    if eta > 1.0:
        raise ValueError(f"normalized strength {eta_tilde} exceeds {gate_count} gates")
    return eta


def statevector_to_bytes(state: StateVector) -> bytes:
    """Little-endian complex128 pairs, basis index ascending."""
    return np.ascontiguousarray(state.amplitudes, dtype="<c16").tobytes()


def statevector_from_bytes(data: bytes, n: int) -> StateVector:
    amps = np.frombuffer(data, dtype="<c16").astype(complex)
    return StateVector(n, amps)
