"""Expectation-value engines for the ansatz circuits.

Three interchangeable evaluators share one interface: `expectation(gamma,
beta)`, `distribution(gamma, beta)` (probabilities over basis indices) and
`state(gamma, beta)`. The statevector engine is exact and vectorized: phase
separations are single diagonal multiplies and mixing rotations are batched
over disjoint qubit pairs, which reproduces the gate-by-gate simulation
exactly because disjoint rotations commute. The sampling engine estimates
expectations from multinomial draws; the density engine folds each CNOT-level
gate and its depolarizing channel into one superoperator application.
"""

from __future__ import annotations

from functools import lru_cache

import numpy as np

from .circuits import AnsatzCircuit, MixerSpec, initial_state
from .gates import Gate, cnot_level, gate_matrix
from .ising import diagonal_vector
from .simulator import DensityMatrix, StateVector, rng_from_seed


@lru_cache(maxsize=None)
def _rotation_chunks(mixer: MixerSpec) -> tuple[tuple[tuple[int, int], ...], ...]:
    """Split the ordered pair list into maximal runs of mutually disjoint pairs.

    Pairs inside a run commute, so applying a run as one batch preserves the
    sequential semantics exactly.
    """
    chunks: list[list[tuple[int, int]]] = []
    used: set[int] = set()
    current: list[tuple[int, int]] = []
    for a, b in mixer.pairs:
        if a in used or b in used:
            chunks.append(current)
            current, used = [], set()
        current.append((a, b))
        used.update((a, b))
    if current:
        chunks.append(current)
    return tuple(tuple(c) for c in chunks)


@lru_cache(maxsize=None)
def _pair_indices(mixer: MixerSpec) -> tuple[tuple[np.ndarray, np.ndarray], ...]:
    """Per pair, in application order: basis indices with (first selected,
    second not) and their swap partners. Rotations mix exactly these."""
    n = mixer.n
    base = np.arange(1 << n, dtype=np.int64)
    out = []
    for a, b in mixer.pairs:
        sel = (((base >> a) & 1) == 0) & (((base >> b) & 1) == 1)
        lo = base[sel]
        hi = lo ^ ((1 << a) | (1 << b))
        lo.flags.writeable = False
        hi.flags.writeable = False
        out.append((lo, hi))
    return tuple(out)


def _signs_matrix(n: int) -> np.ndarray:
    idx = np.arange(1 << n, dtype=np.int64)
    return 1.0 - 2.0 * ((idx[:, None] >> np.arange(n)) & 1)


class StatevectorEvaluator:
    """Exact expectation values from dense amplitudes."""

    exact = True

    def __init__(self, circuit: AnsatzCircuit):
        self.circuit = circuit
        model, mixer = circuit.model, circuit.mixer
        self.n = model.n
        self.depth = circuit.depth
        self._diag = diagonal_vector(model)
        self._psi0 = initial_state(mixer, circuit.budget).amplitudes
        self._mixer = mixer
        if mixer.kind != "standard":
            self._pairs = _pair_indices(mixer)
        if mixer.kind == "qampa":
            # pair gates inside a run of disjoint pairs commute, so each
            # run's phase factors collapse into one diagonal multiply
            zeta = _signs_matrix(self.n)
            self._singles = model.constant - zeta @ model.fields
            self._chunks = []
            position = 0
            for chunk in _rotation_chunks(mixer):
                acc = np.zeros(1 << self.n)
                for a, b in chunk:
                    w = model.couplings[min(a, b), max(a, b)]
                    acc += w * zeta[:, a] * zeta[:, b]
                self._chunks.append((acc, self._pairs[position:position + len(chunk)]))
                position += len(chunk)

    def _angles(self, gamma, beta) -> tuple[np.ndarray, np.ndarray]:
        gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
        beta = np.atleast_1d(np.asarray(beta, dtype=float))
        if gamma.shape != (self.depth,) or beta.shape != (self.depth,):
            raise ValueError(f"need {self.depth} angles per vector")
        return gamma, beta

    @staticmethod
    def _rotate(amps, lo, hi, c2, s2):
        a_lo = amps[lo]
        a_hi = amps[hi]
        amps[lo] = c2 * a_lo + 1j * s2 * a_hi
        amps[hi] = 1j * s2 * a_lo + c2 * a_hi

    def _evolve(self, gamma, beta) -> np.ndarray:
        gamma, beta = self._angles(gamma, beta)
        amps = self._psi0.copy()
        kind = self._mixer.kind
        n = self.n
        for g, b in zip(gamma, beta):
            c2, s2 = np.cos(2 * b), np.sin(2 * b)
            if kind == "qampa":
                amps *= np.exp(-1j * g * self._singles)
                for zz, pairs in self._chunks:
                    amps *= np.exp(-1j * g * zz)
                    for lo, hi in pairs:
                        self._rotate(amps, lo, hi, c2, s2)
                continue
            amps *= np.exp(-1j * g * self._diag)
            if kind == "standard":
                u = np.array([[np.cos(b), 1j * np.sin(b)], [1j * np.sin(b), np.cos(b)]])
                psi = amps.reshape([2] * n)
                for q in range(n):
                    axis = n - 1 - q
                    psi = np.moveaxis(np.tensordot(u, np.moveaxis(psi, axis, 0), axes=(1, 0)), 0, axis)
                amps = psi.reshape(-1)
            else:
                for lo, hi in self._pairs:
                    self._rotate(amps, lo, hi, c2, s2)
        return amps

    def _evolve_batch(self, gammas: np.ndarray, betas: np.ndarray) -> np.ndarray:
        """Evolve many angle vectors at once; rows are independent circuits."""
        m = gammas.shape[0]
        kind = self._mixer.kind
        n = self.n
        amps = np.tile(self._psi0, (m, 1))
        for layer in range(self.depth):
            g = gammas[:, layer][:, None]
            b = betas[:, layer][:, None]
            c2, s2 = np.cos(2 * b), np.sin(2 * b)
            if kind == "qampa":
                amps *= np.exp(-1j * g * self._singles[None, :])
                for zz, pairs in self._chunks:
                    amps *= np.exp(-1j * g * zz[None, :])
                    for lo, hi in pairs:
                        a_lo = amps[:, lo]
                        a_hi = amps[:, hi]
                        amps[:, lo] = c2 * a_lo + 1j * s2 * a_hi
                        amps[:, hi] = 1j * s2 * a_lo + c2 * a_hi
                continue
            amps *= np.exp(-1j * g * self._diag[None, :])
            if kind == "standard":
                cb, sb = np.cos(b[:, 0]), np.sin(b[:, 0])
                psi = amps.reshape([m] + [2] * n)
                shape_b = (m,) + (1,) * (n - 1)
                cb = cb.reshape(shape_b)
                sb = sb.reshape(shape_b)
                for q in range(n):
                    axis = 1 + (n - 1 - q)
                    a0 = np.take(psi, 0, axis=axis)
                    a1 = np.take(psi, 1, axis=axis)
                    psi = np.stack(
                        [cb * a0 + 1j * sb * a1, 1j * sb * a0 + cb * a1], axis=axis
                    )
                amps = psi.reshape(m, -1)
            else:
                for lo, hi in self._pairs:
                    a_lo = amps[:, lo]
                    a_hi = amps[:, hi]
                    amps[:, lo] = c2 * a_lo + 1j * s2 * a_hi
                    amps[:, hi] = 1j * s2 * a_lo + c2 * a_hi
        return amps

    def state(self, gamma, beta) -> StateVector:
        return StateVector(self.n, self._evolve(gamma, beta))

    def distribution(self, gamma, beta) -> np.ndarray:
        return np.abs(self._evolve(gamma, beta)) ** 2

    def expectation(self, gamma, beta) -> float:
        return float(self.distribution(gamma, beta) @ self._diag)

    def expectation_batch(self, gammas, betas) -> np.ndarray:
        """Expectations for a batch of angle vectors, shape (m, depth) each."""
        gammas = np.asarray(gammas, dtype=float)
        betas = np.asarray(betas, dtype=float)
        if gammas.ndim != 2 or gammas.shape[1] != self.depth or gammas.shape != betas.shape:
            raise ValueError(f"need (m, {self.depth}) angle arrays")
        amps = self._evolve_batch(gammas, betas)
        return (np.abs(amps) ** 2) @ self._diag


class SamplingEvaluator:
    """Shot-noise estimates of the exact expectation (finite measurements)."""

    exact = False

    def __init__(self, circuit: AnsatzCircuit, shots: int = 1000, seed=0):
        if shots < 1:
            raise ValueError("shots must be >= 1")
        self._inner = StatevectorEvaluator(circuit)
        self.circuit = circuit
        self.n = self._inner.n
        self.depth = circuit.depth
        self.shots = shots
        self._rng = rng_from_seed(seed)

    def _counts(self, gamma, beta) -> np.ndarray:
        probs = self._inner.distribution(gamma, beta)
        return self._rng.multinomial(self.shots, probs / probs.sum())

    def expectation(self, gamma, beta) -> float:
        counts = self._counts(gamma, beta)
        return float((counts / self.shots) @ self._inner._diag)

    def distribution(self, gamma, beta) -> np.ndarray:
        return self._counts(gamma, beta) / self.shots

    def state(self, gamma, beta) -> StateVector:
        return self._inner.state(gamma, beta)


_CHANNEL_1 = np.outer(np.eye(2).ravel(), np.eye(2).ravel()) / 2.0
_CHANNEL_2 = np.outer(np.eye(4).ravel(), np.eye(4).ravel()) / 4.0


# permutation from the (r_own, c_own, r_other, c_other) kron layout into the
# pair double-space layout (r0, r1, c0, c1)
def _lift_permutations():
    perms = []
    for which in (0, 1):
        perm = np.empty(16, dtype=np.int64)
        for r0 in range(2):
            for r1 in range(2):
                for c0 in range(2):
                    for c1 in range(2):
                        target = 8 * r0 + 4 * r1 + 2 * c0 + c1
                        own, other = ((r0, c0), (r1, c1)) if which == 0 else ((r1, c1), (r0, c0))
                        perm[target] = 8 * own[0] + 4 * own[1] + 2 * other[0] + other[1]
        perms.append(perm)
    return perms


_LIFT_PERMS = _lift_permutations()


def _lift_1q_superop(s: np.ndarray, which: int) -> np.ndarray:
    """Embed a one-qubit superoperator into the pair double space whose index
    is 8 r0 + 4 r1 + 2 c0 + c1 (row/column bits of the pair)."""
    perm = _LIFT_PERMS[which]
    kroned = np.kron(s, np.eye(4))
    return kroned[np.ix_(perm, perm)]


class DensityEvaluator:
    """Exact mixed-state evolution with a depolarizing channel after each
    CNOT-level gate; `eta` is the per-gate strength.

    Each composite pair rotation is folded, together with the channels that
    follow every gate of its decomposition, into one 16x16 superoperator, so
    the evolution applies one superoperator per program gate. This equals the
    gate-by-gate channel loop exactly because the decomposition acts on the
    pair alone.
    """

    exact = False

    def __init__(self, circuit: AnsatzCircuit, eta: float):
        if not 0.0 <= eta <= 1.0:
            raise ValueError(f"eta must lie in [0, 1], got {eta}")
        self.circuit = circuit
        self.n = circuit.model.n
        self.depth = circuit.depth
        self.eta = eta
        self._diag = diagonal_vector(circuit.model)
        psi0 = initial_state(circuit.mixer, circuit.budget).amplitudes
        self._rho0 = np.outer(psi0, psi0.conj())

    def _noisy_1q(self, gate) -> np.ndarray:
        u = gate_matrix(gate)
        s = np.kron(u, u.conj())
        if self.eta > 0.0:
            s = (1.0 - self.eta) * s + self.eta * _CHANNEL_1
        return s

    def _part(self, gate) -> np.ndarray:
        """Lifted pair-space superoperator of one decomposition gate."""
        if len(gate.targets) == 2:
            u = gate_matrix(gate)
            s = np.kron(u, u.conj())
            if self.eta > 0.0:
                s = (1.0 - self.eta) * s + self.eta * _CHANNEL_2
            return s
        return _lift_1q_superop(self._noisy_1q(gate), gate.targets[0])

    def _pair_superop(self, gate, memo) -> np.ndarray:
        key = (gate.kind, gate.params)
        s = memo.get(key)
        if s is None:
            s = np.eye(16, dtype=complex)
            for part in cnot_level([Gate(gate.kind, (0, 1), gate.params)]):
                s = self._part(part) @ s
            memo[key] = s
        return s

    def _run(self, gamma, beta) -> np.ndarray:
        n = self.n
        rho = self._rho0.copy()
        memo_pair: dict = {}
        memo_single: dict = {}
        for gate in self.circuit.gates(gamma, beta, level="composite"):
            if len(gate.targets) == 1:
                s = memo_single.get(gate.params)
                if s is None:
                    s = self._noisy_1q(gate)
                    memo_single[gate.params] = s
                k = 1
            else:
                s = self._pair_superop(gate, memo_pair)
                k = 2
            row = [n - 1 - q for q in gate.targets]
            col = [2 * n - 1 - q for q in gate.targets]
            tensor = np.moveaxis(rho.reshape([2] * (2 * n)), row + col, range(2 * k))
            shape = tensor.shape
            tensor = s @ tensor.reshape(1 << (2 * k), -1)
            rho = np.moveaxis(tensor.reshape(shape), range(2 * k), row + col).reshape(1 << n, 1 << n)
        return rho

    def state(self, gamma, beta) -> DensityMatrix:
        return DensityMatrix(self.n, self._run(gamma, beta))

    def distribution(self, gamma, beta) -> np.ndarray:
        probs = np.real(np.diag(self._run(gamma, beta))).copy()
        np.clip(probs, 0.0, None, out=probs)
        return probs / probs.sum()

    def expectation(self, gamma, beta) -> float:
        probs = np.real(np.diag(self._run(gamma, beta)))
        return float(probs @ self._diag)


def make_evaluator(kind: str, circuit: AnsatzCircuit, *, shots: int = 1000, seed=0, eta: float = 0.0):
    if kind == "statevector":
        return StatevectorEvaluator(circuit)
    if kind == "sampling":
        return SamplingEvaluator(circuit, shots=shots, seed=seed)
    if kind == "density":
        return DensityEvaluator(circuit, eta=eta)
    raise ValueError(f"unknown evaluator kind {kind!r}")
