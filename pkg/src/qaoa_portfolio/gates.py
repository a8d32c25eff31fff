"""Gate vocabulary and CNOT-level decompositions of the two-qubit rotations.

Two-qubit matrices act on the block index 2*b(targets[0]) + b(targets[1]).
The swap-type rotation rxy(b) = exp(ib(XX+YY)), the phase rotation
rzz(t) = exp(-it ZZ) and the contracted rotation rxyzz(b, a) =
exp(ib(XX+YY) - ia ZZ) decompose into 2, 2 and 3 CNOTs respectively;
the decompositions reproduce the composites exactly (rxyzz up to a global
phase) and are checked against matrix exponentials in the test suite.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from math import pi
from typing import Iterable, Sequence

import numpy as np

_ARITY = {"h": 1, "rx": 1, "rz": 1, "u": 1, "cnot": 2, "rxy": 2, "rzz": 2, "rxyzz": 2}
_N_PARAMS = {"h": 0, "rx": 1, "rz": 1, "u": 3, "cnot": 0, "rxy": 1, "rzz": 1, "rxyzz": 2}

GATE_KINDS = tuple(_ARITY)


@dataclass(frozen=True)
class Gate:
    kind: str
    targets: tuple[int, ...]
    params: tuple[float, ...] = ()

    def __post_init__(self):
        if self.kind not in _ARITY:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        targets = tuple(int(t) for t in self.targets)
        params = tuple(float(p) for p in self.params)
        if len(targets) != _ARITY[self.kind]:
            raise ValueError(f"{self.kind} takes {_ARITY[self.kind]} target(s), got {targets}")
        if len(set(targets)) != len(targets):
            raise ValueError(f"{self.kind} targets must be distinct, got {targets}")
        if len(params) != _N_PARAMS[self.kind]:
            raise ValueError(f"{self.kind} takes {_N_PARAMS[self.kind]} parameter(s)")
        if any(t < 0 for t in targets):
            raise ValueError("negative target index")
        object.__setattr__(self, "targets", targets)
        object.__setattr__(self, "params", params)


def _rx(phi: float) -> np.ndarray:
    c, s = np.cos(phi / 2), np.sin(phi / 2)
    return np.array([[c, -1j * s], [-1j * s, c]])


def _ry(theta: float) -> np.ndarray:
    c, s = np.cos(theta / 2), np.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(phi: float) -> np.ndarray:
    return np.array([[np.exp(-1j * phi / 2), 0], [0, np.exp(1j * phi / 2)]])


_H = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)


def gate_matrix(gate: Gate) -> np.ndarray:
    """Dense unitary of a gate (2x2 or 4x4 on its block index)."""
    kind, p = gate.kind, gate.params
    if kind == "h":
        return _H.copy()
    if kind == "rx":
        return _rx(p[0])
    if kind == "rz":
        return _rz(p[0])
    if kind == "u":
        theta, phi, lam = p
        return _rz(phi) @ _ry(theta) @ _rz(lam)
    if kind == "cnot":
        return np.array([[1, 0, 0, 0], [0, 1, 0, 0], [0, 0, 0, 1], [0, 0, 1, 0]], dtype=complex)
    if kind == "rxy":
        c, s = np.cos(2 * p[0]), np.sin(2 * p[0])
        return np.array(
            [[1, 0, 0, 0], [0, c, 1j * s, 0], [0, 1j * s, c, 0], [0, 0, 0, 1]], dtype=complex
        )
    if kind == "rzz":
        e_m, e_p = np.exp(-1j * p[0]), np.exp(1j * p[0])
        return np.diag([e_m, e_p, e_p, e_m])
    if kind == "rxyzz":
        beta, a = p
        c, s = np.cos(2 * beta), np.sin(2 * beta)
        e_m, e_p = np.exp(-1j * a), np.exp(1j * a)
        return np.array(
            [
                [e_m, 0, 0, 0],
                [0, e_p * c, 1j * e_p * s, 0],
                [0, 1j * e_p * s, e_p * c, 0],
                [0, 0, 0, e_m],
            ]
        )
    raise AssertionError(kind)


def zyz_angles(u: np.ndarray) -> tuple[float, float, float]:
    """Euler angles with u proportional to rz(phi) @ ry(theta) @ rz(lam)."""
    det = np.linalg.det(u)
    v = u / np.sqrt(det)
    theta = 2.0 * np.arctan2(abs(v[1, 0]), abs(v[0, 0]))
    if abs(v[1, 0]) < 1e-12:  # diagonal: lam absorbed into phi
        phi = 2.0 * np.angle(v[1, 1])
        lam = 0.0
    elif abs(v[0, 0]) < 1e-12:  # anti-diagonal
        phi = 2.0 * np.angle(v[1, 0])
        lam = 0.0
    else:
        phi = np.angle(v[1, 1]) + np.angle(v[1, 0])
        lam = np.angle(v[1, 1]) - np.angle(v[1, 0])
    return float(theta), float(phi), float(lam)


def merge_single_qubit_run(gates: Sequence[Gate]) -> Gate:
    """Collapse consecutive single-qubit gates on one qubit into a u gate."""
    qubit = gates[0].targets[0]
    if any(len(g.targets) != 1 or g.targets[0] != qubit for g in gates):
        raise ValueError("run must consist of single-qubit gates on one qubit")
    acc = np.eye(2, dtype=complex)
    for g in gates:
        acc = gate_matrix(g) @ acc
    return Gate("u", (qubit,), zyz_angles(acc))


def decompose_gate(gate: Gate) -> list[Gate]:
    """CNOT-level expansion of a composite two-qubit rotation (unmerged)."""
    qa, qb = gate.targets if len(gate.targets) == 2 else (None, None)
    if gate.kind == "rzz":
        (theta,) = gate.params
        return [
            Gate("cnot", (qa, qb)),
            Gate("rz", (qb,), (2 * theta,)),
            Gate("cnot", (qa, qb)),
        ]
    if gate.kind == "rxy":
        (beta,) = gate.params
        return [
            Gate("rx", (qa,), (pi / 2,)),
            Gate("rx", (qb,), (pi / 2,)),
            Gate("cnot", (qa, qb)),
            Gate("rx", (qa,), (-2 * beta,)),
            Gate("rz", (qb,), (-2 * beta,)),
            Gate("cnot", (qa, qb)),
            Gate("rx", (qa,), (-pi / 2,)),
            Gate("rx", (qb,), (-pi / 2,)),
        ]
    if gate.kind == "rxyzz":
        beta, a = gate.params
        # exp(ib(XX+YY) - ia ZZ) as an XX interaction conjugated into the
        # swap block plus phase terms; the middle exp(i pi XX / 4) costs one
        # CNOT, for three in total.
        return [
            Gate("rx", (qa,), (pi / 2,)),
            Gate("rx", (qb,), (pi / 2,)),
            Gate("cnot", (qa, qb)),
            Gate("rx", (qa,), (-2 * beta,)),
            Gate("rz", (qb,), (-2 * beta,)),
            Gate("h", (qa,)),
            Gate("cnot", (qa, qb)),
            Gate("rz", (qa,), (-pi / 2,)),
            Gate("h", (qa,)),
            Gate("h", (qb,)),
            Gate("rz", (qb,), (-pi / 2,)),
            Gate("h", (qb,)),
            Gate("rx", (qb,), (-pi / 2,)),
            Gate("rz", (qb,), (2 * a,)),
            Gate("cnot", (qa, qb)),
        ]
    raise ValueError(f"{gate.kind} has no CNOT-level decomposition")


def _merge_runs(gates: Sequence[Gate]) -> list[Gate]:
    out: list[Gate] = []
    pending: dict[int, list[Gate]] = {}

    def flush(qubits):
        for q in qubits:
            run = pending.pop(q, None)
            if not run:
                continue
            out.append(run[0] if len(run) == 1 else merge_single_qubit_run(run))

    for g in gates:
        if len(g.targets) == 1:
            pending.setdefault(g.targets[0], []).append(g)
        else:
            flush(g.targets)
            out.append(g)
    flush(sorted(pending))
    return out


def cnot_level(gates: Iterable[Gate], merge: bool = True) -> list[Gate]:
    """Expand composites to {1q, CNOT} gates.

    Merging collapses single-qubit runs within each composite's expansion
    (never across composite boundaries, so each composite keeps a fixed,
    context-free decomposition).
    """
    out: list[Gate] = []
    for g in gates:
        if g.kind in ("rxy", "rzz", "rxyzz"):
            sub = decompose_gate(g)
            out.extend(_merge_runs(sub) if merge else sub)
        else:
            out.append(g)
    return out


def gates_to_json(gates: Sequence[Gate]) -> str:
    return json.dumps(
        [{"kind": g.kind, "targets": list(g.targets), "params": list(g.params)} for g in gates],
        indent=2,
    )


def gates_from_json(text: str) -> list[Gate]:
    return [Gate(d["kind"], tuple(d["targets"]), tuple(d.get("params", ()))) for d in json.loads(text)]
