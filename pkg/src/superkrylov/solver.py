"""Projected commutator eigenproblem: pair assembly and thresholded solve.

The ground-state energy gap Delta_0 = lam_0 - lam_{N-1} is the lowest
eigenvalue of the commutator map X -> [H, X].  Projecting that map onto
the Krylov family generated by repeated time evolution of a reference
state gives a small generalized eigenproblem

    J_hat |d> = d R_hat |d>,

where R_hat collects recovery probabilities (the Gram matrix of the
Krylov family) and J_hat the projected commutator.  Both matrices depend
only on the index gap k - j, are Hermitian, and in the noise-free case
R_hat is real while J_hat is purely imaginary, which makes the Ritz
spectrum exactly antisymmetric.  The Gram matrix is nearly singular by
design (that is what convergence looks like), so the solve first discards
Gram eigendirections below a threshold eps and whitens the rest.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import (
    SpectralDecomposition,
    exact_J_entry,
    recovery_probability,
)
from .errors import (
    AllModesThresholded,
    DimensionMismatch,
    MissingFit,
    MissingTopEnergy,
    ZeroWidth,
)
from .minimax import MinimaxFit, evaluate_x0, evaluate_x1
from .pauli import HamiltonianClass


@dataclass(frozen=True)
class KrylovPair:
    """Hermitian m x m pair (J_hat, R_hat) with unit diagonal Gram."""

    m: int
    R_hat: np.ndarray
    J_hat: np.ndarray
    source: str  # "exact" or "minimax"
    t_star: float
    omega: float | None = None

    def __post_init__(self):
        R, J = self.R_hat, self.J_hat
        if R.shape != (self.m, self.m) or J.shape != (self.m, self.m):
            raise DimensionMismatch("pair matrices must be m x m")


@dataclass(frozen=True)
class RitzResult:
    """Ascending real Ritz values of the thresholded projected problem."""

    ritz_values: np.ndarray
    kept_dim: int
    eps: float

    @property
    def ground_gap(self) -> float:
        """Lowest Ritz value: the estimate of lam_0 - lam_{N-1}."""
        return float(self.ritz_values[0])


def assemble_pair_exact(spec: SpectralDecomposition, v: np.ndarray, m: int,
                        t_star: float) -> KrylovPair:
    """Exact (J_hat, R_hat) from the spectral oracles at timestep t_star.

    Entries depend only on the gap k - j, so only m - 1 distinct values
    are computed; the lower triangle follows by Hermitian symmetry and the
    diagonal is exact (R_jj = 1, J_jj = 0).
    """
    if m < 2:
        raise ValueError("Krylov dimension m must be at least 2")
    r_gap = {g: recovery_probability(spec, v, 0, g, t_star) for g in range(1, m)}
    j_gap = {g: exact_J_entry(spec, v, 0, g, t_star) for g in range(1, m)}
    R = np.eye(m, dtype=complex)
    J = np.zeros((m, m), dtype=complex)
    for j in range(m):
        for k in range(j + 1, m):
            g = k - j
            R[j, k] = r_gap[g]
            R[k, j] = np.conj(R[j, k])
            J[j, k] = j_gap[g]
            J[k, j] = np.conj(J[j, k])
    return KrylovPair(m=m, R_hat=R, J_hat=J, source="exact", t_star=t_star)


def assemble_pair_minimax(fits: dict, m: int, t_star: float) -> KrylovPair:
    """(J_hat, R_hat) from minimax fits evaluated at t_star.

    ``fits`` maps either index pairs (j, k) or bare gaps k - j to a
    MinimaxFit of the corresponding recovery-probability series.  Each
    Gram entry is the reconstructed value clipped to its physical range
    [0, 1]; each commutator entry is the reconstructed derivative divided
    by i(j - k), folded to Hermitian via (X + X^dag)/2.
    """
    if m < 2:
        raise ValueError("Krylov dimension m must be at least 2")

    def lookup(j, k) -> MinimaxFit:
        for key in ((j, k), k - j):
            if key in fits:
                return fits[key]
        raise MissingFit(f"no fit for pair ({j},{k}) or gap {k - j}")

    evaluated: dict[int, tuple[float, float]] = {}

    def values_at_t_star(f: MinimaxFit) -> tuple[float, float]:
        key = id(f)
        if key not in evaluated:
            evaluated[key] = (evaluate_x0(f, t_star), evaluate_x1(f, t_star))
        return evaluated[key]

    R = np.eye(m, dtype=complex)
    X = np.zeros((m, m), dtype=complex)
    for j in range(m):
        for k in range(j + 1, m):
            x0, x1 = values_at_t_star(lookup(j, k))
            R[j, k] = min(max(x0, 0.0), 1.0)
            R[k, j] = np.conj(R[j, k])
            X[j, k] = x1 / (1j * (j - k))
            X[k, j] = np.conj(X[j, k])
    # folding makes the pair exactly Hermitian even if upper and lower
    # estimates ever disagree (e.g. per-pair fits without the gap shortcut)
    J = (X + X.conj().T) / 2.0
    return KrylovPair(m=m, R_hat=R, J_hat=J, source="minimax", t_star=t_star)


def threshold_solve(pair: KrylovPair, eps: float) -> RitzResult:
    """Solve J_hat |d> = d R_hat |d> after Gram-eigenvalue thresholding.

    Gram eigendirections with eigenvalue <= eps are projected out; the
    survivors are whitened (scaled by sigma^{-1/2}) so the reduced problem
    is an ordinary Hermitian eigenproblem.
    """
    if eps < 0:
        raise ValueError("threshold eps must be nonnegative")
    sig, V = np.linalg.eigh((pair.R_hat + pair.R_hat.conj().T) / 2.0)
    keep = sig > eps
    if not keep.any():
        raise AllModesThresholded(
            f"eps = {eps} removed all {pair.m} Gram eigenmodes "
            f"(max eigenvalue {sig[-1]:.3e})"
        )
    W = V[:, keep] / np.sqrt(sig[keep])
    J_red = W.conj().T @ pair.J_hat @ W
    ritz = np.linalg.eigvalsh((J_red + J_red.conj().T) / 2.0)
    return RitzResult(ritz_values=ritz, kept_dim=int(keep.sum()), eps=float(eps))


def ground_energy(result: RitzResult, class_tag: HamiltonianClass,
                  top_energy: float | None = None) -> float:
    """Ground energy from the lowest Ritz value.

    Known-top Hamiltonians shift by the top energy; symmetric-spectrum
    Hamiltonians halve the gap (the top is minus the ground energy).
    """
    d0 = result.ground_gap
    if class_tag is HamiltonianClass.CLASS1_KNOWN_TOP:
        if top_energy is None:
            raise MissingTopEnergy("known-top post-processing needs top_energy")
        return d0 + top_energy
    if class_tag is HamiltonianClass.CLASS2_SYMMETRIC:
        return d0 / 2.0
    raise ValueError("no ground-energy rule for generic Hamiltonians")


def choose_timestep(spectral_width: float) -> float:
    """Krylov timestep t* = pi / width of the commutator spectrum.

    The commutator spectrum spans [-(lam_max - lam_min), lam_max - lam_min],
    so pass spectral_width = 2 (lam_max - lam_min).
    """
    if spectral_width <= 0:
        raise ZeroWidth("commutator spectrum has zero width")
    return float(np.pi / spectral_width)


def noise_rate(pair_estimated: KrylovPair, pair_exact: KrylovPair,
               j_spectral_norm: float) -> float:
    """Unitless perturbation size omega of an estimated pair.

    omega = ||R_hat - R||_2 + ||J_hat - J||_2 / ||J||_2, where the
    commutator norm ||J||_2 = 2 (lam_max - lam_min) is supplied by the
    caller (the simulator knows it exactly).
    """
    if pair_estimated.m != pair_exact.m:
        raise DimensionMismatch("pairs have different Krylov dimensions")
    if j_spectral_norm <= 0:
        raise ValueError("j_spectral_norm must be positive")
    dR = np.linalg.norm(pair_estimated.R_hat - pair_exact.R_hat, ord=2)
    dJ = np.linalg.norm(pair_estimated.J_hat - pair_exact.J_hat, ord=2)
    return float(dR + dJ / j_spectral_norm)
