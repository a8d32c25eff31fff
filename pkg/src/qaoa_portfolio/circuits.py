"""Mixer pair orderings and per-depth ansatz circuits.

Five ansatz families share one layer structure: a diagonal phase separation
generated by the encoded cost operator followed by a mixing operation. The
single-qubit mixer explores all selections; the swap-based mixers preserve
the selected-asset count, so a feasible initial superposition stays feasible.
The contracted variant fuses each pair's mixing and phase rotations into one
three-CNOT gate.

Pair lists use 0-based qubits; printed orderings follow the 1-based
conventions of the construction rules exactly (tested against the documented
n=5 and n=6 sequences).
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import lru_cache

import numpy as np

from .gates import Gate, cnot_level
from .ising import MIXER_KINDS, XY_MIXER_KINDS, IsingModel
from .simulator import StateVector, prepare_dicke, prepare_plus

Pair = tuple[int, int]


def _ring_pairs(n: int) -> list[Pair]:
    return [(i, (i + 1) % n) for i in range(n)]


def _parity_ring_pairs(n: int) -> tuple[list[Pair], list[list[Pair]]]:
    odd = [(i - 1, i % n) for i in range(1, n + 1, 2)]
    even = [(i - 1, i % n) for i in range(2, n + 1, 2)]
    return odd + even, [odd, even]


def _full_pairs_odd(n: int) -> list[list[Pair]]:
    """For odd n: n subsets of (n-1)/2 disjoint pairs, pairs (i,j) with
    i + j = k (mod n) in subset k; subsets ordered k = 1..n."""
    subsets = []
    for k in range(1, n + 1):
        subset = []
        for i in range(1, n + 1):
            for j in range(i + 1, n + 1):
                if (i + j) % n == k % n:
                    # wrapped sums print small-first, direct sums large-first
                    subset.append((i, j) if i + j > n else (j, i))
        subset.sort(key=lambda p: p[0])
        subsets.append(subset)
    return subsets


def _full_pair_subsets(n: int) -> list[list[Pair]]:
    if n % 2 == 1:
        subsets = _full_pairs_odd(n)
    else:
        subsets = _full_pairs_odd(n - 1)
        for subset in subsets:
            used = {q for p in subset for q in p}
            (missing,) = set(range(1, n)) - used
            subset.append((missing, n))
    return [[(a - 1, b - 1) for a, b in subset] for subset in subsets]


@dataclass(frozen=True)
class MixerSpec:
    """Mixer kind with its ordered qubit-pair set and initial-state rule."""

    kind: str
    n: int
    pairs: tuple[Pair, ...]
    subsets: tuple[tuple[Pair, ...], ...]
    initial_state: str

    def __post_init__(self):
        for subset in self.subsets:
            if len(set(subset)) != len(subset):
                raise ValueError("duplicate pair within a subset")
        for a, b in self.pairs:
            if not (0 <= a < self.n and 0 <= b < self.n and a != b):
                raise ValueError(f"invalid pair ({a}, {b}) for n={self.n}")


def pair_order(kind: str, n: int) -> tuple[Pair, ...]:
    """Ordered qubit pairs the mixer applies within one layer."""
    return make_mixer(kind, n).pairs


@lru_cache(maxsize=None)
def make_mixer(kind: str, n: int) -> MixerSpec:
    if kind not in MIXER_KINDS:
        raise ValueError(f"unknown mixer kind {kind!r}; choose from {MIXER_KINDS}")
    if kind == "standard":
        if n < 1:
            raise ValueError("need n >= 1")
        return MixerSpec(kind, n, (), (), "plus")
    if n < 3:
        raise ValueError(f"{kind} mixer needs n >= 3, got {n}")
    if kind == "ring":
        pairs = _ring_pairs(n)
        subsets = [[p] for p in pairs]
    elif kind == "par_ring":
        pairs, subsets = _parity_ring_pairs(n)
    else:  # full and qampa share the all-pairs ordering
        subsets = _full_pair_subsets(n)
        pairs = [p for subset in subsets for p in subset]
    return MixerSpec(
        kind,
        n,
        tuple(pairs),
        tuple(tuple(s) for s in subsets),
        "dicke",
    )


def initial_state(mixer: MixerSpec, budget: int, method: str = "direct") -> StateVector:
    if mixer.initial_state == "plus":
        return prepare_plus(mixer.n)
    return prepare_dicke(mixer.n, budget, method=method)


@dataclass(frozen=True)
class AnsatzCircuit:
    """Depth-p alternating circuit for a model/mixer pair.

    The gate program depends on exactly 2p parameters (one phase and one
    mixing angle per layer); its structure, and hence the gate counts, do not.
    `budget` fixes the feasible superposition the swap-based mixers start from.
    """

    model: IsingModel
    mixer: MixerSpec
    depth: int
    budget: int | None = None

    def __post_init__(self):
        if self.depth < 1:
            raise ValueError("depth must be >= 1")
        if self.model.n != self.mixer.n:
            raise ValueError("model and mixer disagree on qubit count")
        if self.mixer.initial_state == "dicke" and self.budget is None:
            raise ValueError(f"{self.mixer.kind} mixer needs the budget for its initial state")

    @property
    def n(self) -> int:
        return self.model.n

    def _layer(self, gamma: float, beta: float) -> list[Gate]:
        model, mixer = self.model, self.mixer
        n = self.n
        gates: list[Gate] = []
        # diagonal phase separation exp(-i gamma F): single-qubit part first
        for i in range(n):
            if model.fields[i] != 0.0:
                gates.append(Gate("rz", (i,), (-2.0 * gamma * model.fields[i],)))
        if mixer.kind == "qampa":
            for a, b in mixer.pairs:
                w = model.couplings[min(a, b), max(a, b)]
                gates.append(Gate("rxyzz", (a, b), (beta, gamma * w)))
            return gates
        if mixer.kind == "full":
            pair_iter = mixer.pairs
        else:
            pair_iter = [(i, j) for i in range(n) for j in range(i + 1, n)]
        for a, b in pair_iter:
            w = model.couplings[min(a, b), max(a, b)]
            if w != 0.0:
                gates.append(Gate("rzz", (a, b), (gamma * w,)))
        if mixer.kind == "standard":
            gates.extend(Gate("rx", (i,), (-2.0 * beta,)) for i in range(n))
        else:
            gates.extend(Gate("rxy", (a, b), (beta,)) for a, b in mixer.pairs)
        return gates

    def gates(self, gamma, beta, level: str = "composite") -> list[Gate]:
        """Gate program for the given angle vectors."""
        gamma = np.atleast_1d(np.asarray(gamma, dtype=float))
        beta = np.atleast_1d(np.asarray(beta, dtype=float))
        if gamma.shape != (self.depth,) or beta.shape != (self.depth,):
            raise ValueError(f"need {self.depth} phase and mixing angles")
        program: list[Gate] = []
        for g, b in zip(gamma, beta):
            program.extend(self._layer(float(g), float(b)))
        if level == "composite":
            return program
        if level == "cnot":
            return cnot_level(program)
        raise ValueError(f"unknown level {level!r}")

    def cnot_count(self) -> int:
        return cnot_count(self)

    def gate_count(self) -> int:
        """Total gate count of the CNOT-level program (single-qubit gates included)."""
        ones = np.ones(self.depth)
        return len(self.gates(ones, ones, level="cnot"))


def build_ansatz(
    model: IsingModel, mixer: MixerSpec, depth: int, budget: int | None = None
) -> AnsatzCircuit:
    return AnsatzCircuit(model, mixer, depth, budget)


def cnot_count(circuit: AnsatzCircuit) -> int:
    """Exact CNOT count of the decomposed program (angle-independent)."""
    ones = np.ones(circuit.depth)
    return sum(1 for g in circuit.gates(ones, ones, level="cnot") if g.kind == "cnot")
