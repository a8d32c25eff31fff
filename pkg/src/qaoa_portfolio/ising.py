"""Diagonal operator encoding of the penalized cost and its spectral scaling.

Qubit j carries asset j with the selected state mapped to |0> (the projector
(I+Z)/2 has eigenvalue 1 there), so basis index s encodes the selection
z_j = 1 - bit_j(s). Basis indices are little endian: qubit 0 is the least
significant bit. `decode` converts basis indices back to selection space;
user-facing output is always in selection space.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, replace

import numpy as np

from .problem import OracleSummary, PenaltyConfig, ProblemInstance, penalized_cost

XY_MIXER_KINDS = ("ring", "par_ring", "full", "qampa")
MIXER_KINDS = ("standard",) + XY_MIXER_KINDS


@dataclass(frozen=True)
class IsingModel:
    """Coefficients of sum_{i<j} W_ij Z_i Z_j - sum_i w_i Z_i + c.

    `scale` is the spectral factor baked into the coefficients at encoding
    time; `cumulative_scale` tracks it together with any later rescalings, so
    energies divided by `cumulative_scale` are always in original cost units.
    """

    n: int
    couplings: np.ndarray
    fields: np.ndarray
    constant: float
    scale: float
    cumulative_scale: float

    def __post_init__(self):
        couplings = np.asarray(self.couplings, dtype=float)
        fields = np.asarray(self.fields, dtype=float)
        if couplings.shape != (self.n, self.n) or fields.shape != (self.n,):
            raise ValueError("coefficient shapes inconsistent with qubit count")
        if np.any(np.tril(couplings) != 0.0):
            raise ValueError("couplings must be strictly upper triangular")
        if not self.scale > 0 or not self.cumulative_scale > 0:
            raise ValueError("scale factors must be positive")
        couplings.flags.writeable = False
        fields.flags.writeable = False
        object.__setattr__(self, "couplings", couplings)
        object.__setattr__(self, "fields", fields)


def decode(index: int, n: int) -> np.ndarray:
    """Selection vector of a basis index (selected asset <-> qubit in |0>)."""
    if not 0 <= index < (1 << n):
        raise ValueError(f"basis index {index} out of range for {n} qubits")
    bits = (index >> np.arange(n)) & 1
    return (1 - bits).astype(np.int8)


def basis_index(z, n: int) -> int:
    """Basis index whose decoded selection equals z."""
    from .problem import selection_index

    return selection_index(z, n) ^ ((1 << n) - 1)


def basis_to_selection_permutation(n: int) -> np.ndarray:
    """Index permutation mapping basis-indexed arrays to selection-indexed ones."""
    return np.arange(1 << n) ^ ((1 << n) - 1)


def encode(instance: ProblemInstance, penalty: PenaltyConfig, scale: float) -> IsingModel:
    """Ising coefficients of the scaled penalized cost.

    W_ij = (s/2)(q sigma_ij + A) for i < j and
    w_i = (s/2)[(1-q) mu_i + A(2B - n) - q sum_j sigma_ij]; the constant is
    fixed by evaluating the defining identity on the all-selected reference
    state instead of expanding it algebraically.
    """
    if not scale > 0:
        raise ValueError("scale must be positive")
    n, B, q = instance.n, instance.budget, instance.risk_factor
    sigma, mu = instance.stats.sigma, instance.stats.mu
    couplings = np.triu(0.5 * scale * (q * sigma + penalty.factor), k=1)
    fields = 0.5 * scale * ((1.0 - q) * mu + penalty.factor * (2 * B - n) - q * sigma.sum(axis=1))
    # reference state: basis index 0 = all qubits |0> = every asset selected
    reference = scale * penalized_cost(instance, penalty, np.ones(n, dtype=np.int8))
    constant = reference - (couplings.sum() - fields.sum())
    return IsingModel(n, couplings, fields, float(constant), float(scale), float(scale))


def _signs(indices: np.ndarray, n: int) -> np.ndarray:
    """Z eigenvalues (+1 for |0>, -1 for |1>) per qubit for each basis index."""
    return 1.0 - 2.0 * ((indices[:, None] >> np.arange(n)) & 1)


def diagonal_energy(model: IsingModel, index: int) -> float:
    """Eigenvalue of the encoded operator on one computational basis state."""
    if not 0 <= index < (1 << model.n):
        raise ValueError(f"basis index {index} out of range for {model.n} qubits")
    zeta = _signs(np.array([index], dtype=np.int64), model.n)[0]
    pair = float(zeta @ model.couplings @ zeta)
    return pair - float(model.fields @ zeta) + model.constant


def diagonal_vector(model: IsingModel) -> np.ndarray:
    """Eigenvalues on all 2^n basis states, indexed by basis index."""
    n = model.n
    zeta = _signs(np.arange(1 << n, dtype=np.int64), n)
    energies = np.einsum("si,ij,sj->s", zeta, model.couplings, zeta)
    energies -= zeta @ model.fields
    energies += model.constant
    return energies


def rescale(model: IsingModel, factor: float) -> IsingModel:
    """Multiply all coefficients by `factor`, tracking the cumulative scale."""
    if not factor > 0:
        raise ValueError(f"rescale factor must be positive, got {factor}")
    return replace(
        model,
        couplings=model.couplings * factor,
        fields=model.fields * factor,
        constant=model.constant * factor,
        cumulative_scale=model.cumulative_scale * factor,
    )


def to_cost_units(model: IsingModel, energy):
    """Convert scaled energies back to original cost units."""
    return energy / model.cumulative_scale


def mixer_spectral_width(kind: str, n: int) -> float:
    """Eigenvalue spread of the mixing operator: 2n for single-qubit and ring
    variants, n(n-1) for the all-pairs variants."""
    if kind not in MIXER_KINDS:
        raise ValueError(f"unknown mixer kind {kind!r}")
    return float(2 * n) if kind in ("standard", "ring", "par_ring") else float(n * (n - 1))


def spectral_scaling(instance: ProblemInstance, summary: OracleSummary, mixer_kind: str) -> float:
    """Scale factor aligning the cost operator's spectral width with the mixer's.

    XY mixers never populate unfeasible states, so their effective cost width
    is f_max - f_min; the single-qubit mixer sees unfeasible states too and
    uses the geometric mean of the feasible and penalized-unfeasible widths.
    """
    width_m = mixer_spectral_width(mixer_kind, instance.n)
    if mixer_kind == "standard":
        width_f = np.sqrt((summary.f_max - summary.f_min) * (summary.f_max_nf - summary.f_min))
    else:
        width_f = summary.f_max - summary.f_min
    if width_f <= 0:
        raise ValueError("degenerate landscape: zero spectral width")
    return float(width_m / width_f)


def model_to_json(model: IsingModel) -> str:
    iu = np.triu_indices(model.n, k=1)
    return json.dumps(
        {
            "n": model.n,
            "W": [float(v) for v in model.couplings[iu]],
            "w": [float(v) for v in model.fields],
            "c": model.constant,
            "lambda": model.scale,
            "cumulative_scale": model.cumulative_scale,
        },
        indent=2,
    )


def model_from_json(text: str) -> IsingModel:
    doc = json.loads(text)
    n = int(doc["n"])
    couplings = np.zeros((n, n))
    couplings[np.triu_indices(n, k=1)] = doc["W"]
    return IsingModel(
        n=n,
        couplings=couplings,
        fields=np.array(doc["w"], dtype=float),
        constant=float(doc["c"]),
        scale=float(doc["lambda"]),
        cumulative_scale=float(doc["cumulative_scale"]),
    )
