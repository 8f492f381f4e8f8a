"""Emulated device measurements of recovery probabilities.

A "measurement" here is the exact recovery probability plus additive
i.i.d. Gaussian noise, y_s = R_jk(t_s) + eta_s with eta_s ~ N(0, theta^2),
taken on an equally spaced timepoint grid inside an open window around
the Krylov timestep.  The module also owns the (q, r) budget pair used by
the minimax estimator: q bounds the smoothness of the signal (through the
squared L2 norm of its M-th derivative over the horizon) and r bounds the
squared l2 norm of the noise vector.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .dynamics import SpectralDecomposition, recovery_derivative, recovery_probability
from .errors import BadWindow, NonPositiveBound

# With zero noise the budget r diverges; cap it so the fit system stays
# solvable in floating point.
ZERO_NOISE_R_FACTOR = 1e12


@dataclass(frozen=True)
class MeasurementSeries:
    """Noisy samples y_s = R_jk(t_s) + eta_s on a strictly increasing grid."""

    pair: tuple[int, int]
    timepoints: np.ndarray
    values: np.ndarray
    noise_sigma: float
    seed: int | None = None

    def __post_init__(self):
        ts = np.asarray(self.timepoints, dtype=float)
        ys = np.asarray(self.values, dtype=float)
        if ts.ndim != 1 or ts.shape != ys.shape or ts.size < 2:
            raise ValueError("need matching 1-D grids with D >= 2")
        if np.any(np.diff(ts) <= 0):
            raise ValueError("timepoints must be strictly increasing")
        if not np.all(np.isfinite(ys)):
            raise ValueError("measurement values must be finite")
        if self.noise_sigma < 0:
            raise ValueError("noise_sigma must be nonnegative")
        object.__setattr__(self, "timepoints", ts)
        object.__setattr__(self, "values", ys)

    @property
    def n_points(self) -> int:
        return self.timepoints.size


@dataclass(frozen=True)
class NoiseBudget:
    """Weights (q, r) dual to the signal-smoothness and noise-norm bounds.

    Constructed so that q * f_norm_sq_bound <= 1/2 and
    r * eta_norm_sq_bound <= 1/2, i.e. any (signal, noise) pair respecting
    the bounds lies inside the uncertainty ellipsoid the minimax estimator
    optimizes over.
    """

    q: float
    r: float
    f_norm_sq_bound: float
    eta_norm_sq_bound: float

    def __post_init__(self):
        if self.q <= 0 or self.r <= 0:
            raise NonPositiveBound("budget weights q, r must be positive")
        slack = 0.5 * (1 + 1e-12)
        if self.q * self.f_norm_sq_bound > slack:
            raise NonPositiveBound("q * f_norm_sq_bound exceeds 1/2")
        if self.r * self.eta_norm_sq_bound > slack:
            raise NonPositiveBound("r * eta_norm_sq_bound exceeds 1/2")


def sample_grid(t_star: float, delta_t: float, D: int) -> np.ndarray:
    """D equally spaced timepoints inside the open window (t*-dt, t*+dt).

    Endpoints are inset by half a spacing, so the grid stays strictly
    inside the window and contains t* whenever D is odd.
    """
    if D < 2:
        raise ValueError("need at least two timepoints")
    if delta_t <= 0:
        raise ValueError("delta_t must be positive")
    if t_star - delta_t <= 0:
        raise BadWindow(
            f"window ({t_star - delta_t}, {t_star + delta_t}) touches t <= 0"
        )
    h = 2.0 * delta_t / D
    return t_star - delta_t + h / 2 + h * np.arange(D)


def measure_series(
    spec: SpectralDecomposition,
    v: np.ndarray,
    j: int,
    k: int,
    grid: np.ndarray,
    theta: float,
    seed=None,
) -> MeasurementSeries:
    """Sample y_s = R_jk(t_s) + eta_s with eta_s ~ N(0, theta^2).

    theta = 0 returns exact values; a fixed seed is fully reproducible.
    """
    grid = np.asarray(grid, dtype=float)
    exact = np.array([recovery_probability(spec, v, j, k, t) for t in grid])
    if theta > 0:
        rng = np.random.default_rng(seed)
        values = exact + rng.normal(0.0, theta, size=grid.size)
    else:
        values = exact
    seed_field = seed if isinstance(seed, int) else None
    return MeasurementSeries(
        pair=(j, k), timepoints=grid, values=values,
        noise_sigma=float(theta), seed=seed_field,
    )


def select_qr(f_norm_sq: float, eta_norm_sq: float) -> NoiseBudget:
    """Largest budget weights consistent with the given norm bounds.

    Returns q = 1/(2 f_norm_sq) and r = 1/(2 eta_norm_sq): the equality
    point of the ellipsoid constraints.  A zero noise bound (exact data)
    would send r to infinity; it is capped at 1e12 * q to keep the fit
    linear system well conditioned.
    """
    if f_norm_sq <= 0:
        raise NonPositiveBound(f"f_norm_sq = {f_norm_sq} must be positive")
    if eta_norm_sq < 0:
        raise NonPositiveBound(f"eta_norm_sq = {eta_norm_sq} must be nonnegative")
    q = 1.0 / (2.0 * f_norm_sq)
    r = 1.0 / (2.0 * eta_norm_sq) if eta_norm_sq > 0 else ZERO_NOISE_R_FACTOR * q
    return NoiseBudget(q=q, r=r, f_norm_sq_bound=f_norm_sq,
                       eta_norm_sq_bound=eta_norm_sq)


def estimated_eta_norm_sq(D: int, theta: float) -> float:
    """High-probability bound on ||eta||^2 for D i.i.d. N(0, theta^2) draws.

    The mean of the squared norm is D theta^2; the factor 2 covers the
    chi-square upper tail with comfortable margin at the grid sizes used
    here, so the budget premise holds in >= 95% of trials.
    """
    if D < 1:
        raise ValueError("D must be positive")
    if theta < 0:
        raise ValueError("theta must be nonnegative")
    return 2.0 * D * theta**2


def forcing_norm_sq(
    spec: SpectralDecomposition,
    v: np.ndarray,
    j: int,
    k: int,
    tau: float,
    order: int = 3,
    n_nodes: int = 120,
) -> float:
    """Exact squared L2 norm of the order-th derivative of R_jk over [0, tau].

    The integrand is a trigonometric polynomial in t, so high-order
    Gauss-Legendre quadrature is effectively exact at desk scale.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    x, wts = np.polynomial.legendre.leggauss(n_nodes)
    nodes = 0.5 * tau * (x + 1.0)
    weights = 0.5 * tau * wts
    vals = np.array(
        [recovery_derivative(spec, v, j, k, t, order) for t in nodes]
    )
    return float(np.sum(weights * vals**2))


def series_rows(series: MeasurementSeries) -> list[tuple]:
    """CSV-ready rows: (pair_j, pair_k, t, y, theta, seed)."""
    j, k = series.pair
    return [
        (j, k, float(t), float(y), series.noise_sigma, series.seed)
        for t, y in zip(series.timepoints, series.values)
    ]
