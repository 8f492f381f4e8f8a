"""Pauli-string Hamiltonians and dense assembly.

Two Hamiltonian families are provided:

* Heisenberg exchange models with nonnegative couplings, whose top energy
  is the sum of the couplings (the fully polarized state saturates it).
* Bipartite-graph YY/ZZ/X models whose spectrum is symmetric about zero,
  certified by the operator W = prod_{V1} Y prod_{V2} Z which anticommutes
  with every term.

Convention: qubit 0 is the leftmost Kronecker factor, so a label "XZI"
assembles as X (x) Z (x) I.  All quantities downstream are basis-invariant
traces and overlaps, so any consistent convention would do; this one is
frozen for reproducibility.
"""

from __future__ import annotations

import enum
from dataclasses import dataclass, field

import numpy as np

from .errors import (
    DimensionCap,
    IndexOutOfRange,
    NegativeCoupling,
    NonBipartiteEdge,
)

MAX_QUBITS_DENSE = 12  # N = 4096, the desk-scale cap for dense assembly

PAULI_MATRICES = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}


class HamiltonianClass(enum.Enum):
    """Ground-energy post-processing family."""

    CLASS1_KNOWN_TOP = "class1-known-top"
    CLASS2_SYMMETRIC = "class2-symmetric"
    GENERIC = "generic"


@dataclass(frozen=True)
class PauliString:
    """A single weighted Pauli word, e.g. 0.5 * XYI."""

    label: str
    coefficient: float

    def __post_init__(self):
        if not self.label or any(c not in PAULI_MATRICES for c in self.label):
            raise ValueError(f"invalid Pauli label {self.label!r}")
        if not np.isfinite(self.coefficient):
            raise ValueError("coefficient must be finite")


@dataclass(frozen=True)
class PauliHamiltonian:
    """Weighted Pauli-string sum with a class tag for post-processing."""

    n_qubits: int
    terms: tuple[PauliString, ...]
    class_tag: HamiltonianClass = HamiltonianClass.GENERIC
    top_energy: float | None = None

    def __post_init__(self):
        if self.n_qubits < 1:
            raise ValueError("n_qubits must be positive")
        for t in self.terms:
            if len(t.label) != self.n_qubits:
                raise ValueError(
                    f"label {t.label!r} does not match n_qubits={self.n_qubits}"
                )


def _single_site_label(n: int, ops: dict[int, str]) -> str:
    chars = ["I"] * n
    for idx, op in ops.items():
        chars[idx] = op
    return "".join(chars)


def build_heisenberg(n: int, couplings: dict[tuple[int, int], float]) -> PauliHamiltonian:
    """Exchange model sum_{j<k} J_jk (XX + YY + ZZ) with J_jk >= 0.

    The top energy is sum_{j<k} J_jk, attained by the fully polarized
    state, so the result carries the class-1 tag.
    """
    if n < 2:
        raise ValueError("need at least two qubits")
    terms = []
    top = 0.0
    for (j, k), coeff in sorted(couplings.items()):
        if not (0 <= j < k <= n - 1):
            raise IndexOutOfRange(f"coupling key ({j},{k}) out of range for n={n}")
        if coeff < 0:
            raise NegativeCoupling(f"J_{j}{k} = {coeff} < 0")
        top += coeff
        if coeff == 0:
            continue
        for op in ("X", "Y", "Z"):
            terms.append(PauliString(_single_site_label(n, {j: op, k: op}), coeff))
    return PauliHamiltonian(
        n_qubits=n,
        terms=tuple(terms),
        class_tag=HamiltonianClass.CLASS1_KNOWN_TOP,
        top_energy=top,
    )


def heisenberg_chain(n: int, seed: int | None = None,
                     rng: np.random.Generator | None = None) -> PauliHamiltonian:
    """Nearest-neighbour chain with J_{b,b+1} drawn uniformly from (0, 1)."""
    if rng is None:
        rng = np.random.default_rng(seed)
    couplings = {(b, b + 1): float(rng.uniform(0.0, 1.0)) for b in range(n - 1)}
    return build_heisenberg(n, couplings)


def build_bipartite(
    n_per_side: int,
    Jy: dict[tuple[int, int], float],
    Jz: dict[tuple[int, int], float],
    h: dict[int, float],
) -> PauliHamiltonian:
    """Bipartite YY/ZZ/X model on V1 = {0..n-1}, V2 = {n..2n-1}.

    Every edge must connect the two sides: the symmetry operator
    W = prod_{V1} Y prod_{V2} Z then anticommutes with all terms, forcing
    the spectrum to be symmetric about zero.
    """
    if n_per_side < 1:
        raise ValueError("n_per_side must be positive")
    n = 2 * n_per_side

    def check_edge(j, k):
        if not (0 <= j < n and 0 <= k < n):
            raise IndexOutOfRange(f"edge vertex out of range: ({j},{k})")
        if (j < n_per_side) == (k < n_per_side):
            raise NonBipartiteEdge(f"edge ({j},{k}) stays on one side")

    terms = []
    for (j, k), coeff in sorted(Jy.items()):
        check_edge(j, k)
        if coeff != 0:
            terms.append(PauliString(_single_site_label(n, {j: "Y", k: "Y"}), coeff))
    for (j, k), coeff in sorted(Jz.items()):
        check_edge(j, k)
        if coeff != 0:
            terms.append(PauliString(_single_site_label(n, {j: "Z", k: "Z"}), coeff))
    for l, coeff in sorted(h.items()):
        if not 0 <= l < n:
            raise IndexOutOfRange(f"field vertex {l} out of range")
        if coeff != 0:
            terms.append(PauliString(_single_site_label(n, {l: "X"}), coeff))
    return PauliHamiltonian(
        n_qubits=n,
        terms=tuple(terms),
        class_tag=HamiltonianClass.CLASS2_SYMMETRIC,
    )


def pauli_word_matrix(label: str) -> np.ndarray:
    """Dense matrix of a Pauli word; qubit 0 is the leftmost factor."""
    out = np.array([[1.0]], dtype=complex)
    for c in label:
        out = np.kron(out, PAULI_MATRICES[c])
    return out


def assemble_dense(ham: PauliHamiltonian) -> np.ndarray:
    """Assemble the dense 2^n x 2^n Hermitian matrix of a Pauli sum."""
    if ham.n_qubits > MAX_QUBITS_DENSE:
        raise DimensionCap(
            f"n_qubits={ham.n_qubits} exceeds dense cap {MAX_QUBITS_DENSE}"
        )
    dim = 2**ham.n_qubits
    out = np.zeros((dim, dim), dtype=complex)
    for term in ham.terms:
        out += term.coefficient * pauli_word_matrix(term.label)
    return out


def bipartite_symmetry_operator(n_per_side: int) -> np.ndarray:
    """W = prod_{j in V1} Y_j prod_{k in V2} Z_k, satisfying W H W^dag = -H."""
    label = "Y" * n_per_side + "Z" * n_per_side
    return pauli_word_matrix(label)
