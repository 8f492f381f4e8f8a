"""Config-driven experiment runners emitting CSV tables and run manifests.

Each runner wires the full pipeline -- Hamiltonian assembly, exact
diagonalization reference, (noisy) recovery-probability measurement,
minimax fitting, pair assembly, thresholded eigensolve -- for one family
of sweeps:

* ``run_convergence``: ground-energy error versus Krylov dimension m,
  for one or more noise levels theta.
* ``run_derivative_scaling``: pointwise derivative error and certificate
  versus the number of datapoints D.
* ``run_minimax_demo``: dense traces of the exact signal, noisy samples,
  and reconstructions under three noise-weight choices (under-fit,
  balanced, over-fit).
* ``run_gram``: dump of the exact (and, with noise, estimated) projected
  matrices.

All floating output is formatted with 17 significant digits so reruns
with identical config and seed are byte-identical.
"""

from __future__ import annotations

import json
import os
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, asdict

import numpy as np

from .dynamics import (
    build_initial_state,
    eigendecompose,
    exact_second_derivative,
    recovery_derivative,
    recovery_probability,
)
from .errors import ConfigParse
from .measurement import (
    estimated_eta_norm_sq,
    forcing_norm_sq,
    measure_series,
    sample_grid,
    select_qr,
)
from .minimax import (
    build_model,
    error_certificate,
    evaluate_x0,
    evaluate_x1,
    fit,
)
from .pauli import assemble_dense, build_bipartite, heisenberg_chain
from .solver import (
    KrylovPair,
    assemble_pair_exact,
    assemble_pair_minimax,
    choose_timestep,
    ground_energy,
    noise_rate,
    threshold_solve,
)

SCHEMA_VERSION = 1


@dataclass
class ExperimentConfig:
    """Resolved experiment parameters (defaults are desk scale: n=6)."""

    model: str = "heisenberg"
    n: int = 6
    model_seed: int = 42
    gamma0: float = 0.25
    m_values: list = field(default_factory=lambda: list(range(2, 31)))
    theta_values: list = field(default_factory=lambda: [0.0])
    D: int = 15
    d_values: list = field(default_factory=lambda: [5, 10, 20, 40])
    M: int = 3
    delta_t_fraction: float = 0.15
    eps_rule: str = "auto"  # auto | noise-free | m-theta | fixed
    eps_fixed: float = 0.0
    trials: int = 1
    master_seed: int = 0
    out: str = "."

    def validate(self):
        if self.model not in ("heisenberg", "bipartite"):
            raise ConfigParse(f"unknown model {self.model!r}")
        if not self.m_values or not self.theta_values or not self.d_values:
            raise ConfigParse("m_values, theta_values, d_values must be nonempty")
        if not 0.0 < self.gamma0 <= 0.5:
            raise ConfigParse("gamma0 must lie in (0, 0.5]")
        if self.eps_rule not in ("auto", "noise-free", "m-theta", "fixed"):
            raise ConfigParse(f"unknown eps_rule {self.eps_rule!r}")
        if self.trials < 1 or self.D < 2 or self.M < 2:
            raise ConfigParse("trials >= 1, D >= 2, M >= 2 required")
        return self


_INT_LIST = {"m_values", "d_values"}
_FLOAT_LIST = {"theta_values"}
_INT = {"n", "model_seed", "D", "M", "trials", "master_seed"}
_FLOAT = {"gamma0", "delta_t_fraction", "eps_fixed"}
_STR = {"model", "eps_rule", "out"}


def parse_config(path: str) -> ExperimentConfig:
    """Read a ``key = value`` config file (comma-separated lists, # comments)."""
    cfg = ExperimentConfig()
    try:
        with open(path) as fh:
            text = fh.read()
    except OSError as exc:
        raise ConfigParse(f"cannot read config {path}: {exc}") from exc
    for lineno, raw in enumerate(text.splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise ConfigParse(f"{path}:{lineno}: expected 'key = value'")
        key, _, val = line.partition("=")
        key, val = key.strip(), val.strip()
        try:
            if key in _INT_LIST:
                setattr(cfg, key, [int(x) for x in val.split(",") if x.strip()])
            elif key in _FLOAT_LIST:
                setattr(cfg, key, [float(x) for x in val.split(",") if x.strip()])
            elif key in _INT:
                setattr(cfg, key, int(val))
            elif key in _FLOAT:
                setattr(cfg, key, float(val))
            elif key in _STR:
                setattr(cfg, key, val)
            else:
                raise ConfigParse(f"{path}:{lineno}: unknown key {key!r}")
        except ValueError as exc:
            raise ConfigParse(f"{path}:{lineno}: bad value for {key}") from exc
    return cfg.validate()


@dataclass(frozen=True)
class PipelineContext:
    """Diagonalized model plus reference quantities shared by all cells."""

    spec: object
    v: np.ndarray
    lam0: float
    lam_top: float
    class_tag: object
    top_energy: float | None
    t_star: float
    delta_t: float
    tau: float


def build_context(config: ExperimentConfig) -> PipelineContext:
    """Assemble, diagonalize, and fix the timestep and measurement window."""
    if config.model == "heisenberg":
        ham = heisenberg_chain(config.n, seed=config.model_seed)
    else:
        rng = np.random.default_rng(config.model_seed)
        npair = config.n
        edges = {(i, npair + i): float(rng.uniform(0, 1)) for i in range(npair)}
        jz = {e: float(rng.uniform(0, 1)) for e in edges}
        h = {i: float(rng.uniform(0, 1)) for i in range(2 * npair)}
        ham = build_bipartite(npair, edges, jz, h)
    spec = eigendecompose(assemble_dense(ham))
    v = build_initial_state(spec, config.gamma0)
    width_j = 2.0 * spec.spectral_width
    t_star = choose_timestep(width_j)
    delta_t = config.delta_t_fraction * t_star
    tau = 1.5 * (t_star + delta_t)
    top = ham.top_energy if ham.top_energy is not None else None
    return PipelineContext(
        spec=spec, v=v, lam0=float(spec.eigenvalues[0]),
        lam_top=float(spec.eigenvalues[-1]), class_tag=ham.class_tag,
        top_energy=top, t_star=t_star, delta_t=delta_t, tau=tau,
    )


def _theta_key(theta: float) -> int:
    return int(np.float64(theta).view(np.uint64))


def _cell_seed(master_seed: int, *parts) -> np.random.SeedSequence:
    return np.random.SeedSequence((int(master_seed),) + tuple(int(p) for p in parts))


def _eps(config: ExperimentConfig, m: int, theta: float) -> float:
    rule = config.eps_rule
    if rule == "fixed":
        return config.eps_fixed
    if rule == "noise-free" or (rule == "auto" and theta == 0.0):
        return 1e-12 * m
    return m * theta


def _fmt(x) -> str:
    if isinstance(x, float):
        return f"{x:.17g}"
    return str(x)


def _write_csv(path: str, header: list[str], rows: list[tuple]):
    with open(path, "w", newline="\n") as fh:
        fh.write(",".join(header) + "\n")
        for row in rows:
            fh.write(",".join(_fmt(x) for x in row) + "\n")


def _write_manifest(out_dir: str, command: str, config: ExperimentConfig,
                    outputs: list[str], n_records: int, wall_time: float):
    manifest = {
        "schema_version": SCHEMA_VERSION,
        "command": command,
        "config": asdict(config),
        "outputs": outputs,
        "n_records": n_records,
        "wall_time_s": round(wall_time, 3),
    }
    path = os.path.join(out_dir, f"{command}_manifest.json")
    with open(path, "w") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")
    return path


def _fit_gaps(ctx: PipelineContext, config: ExperimentConfig, theta: float,
              trial: int, m_max: int) -> dict:
    """One minimax fit per index gap, on a freshly sampled noisy series."""
    grid = sample_grid(ctx.t_star, ctx.delta_t, config.D)
    fits = {}
    for gap in range(1, m_max):
        seed = _cell_seed(config.master_seed, 1, _theta_key(theta), trial, gap)
        series = measure_series(ctx.spec, ctx.v, 0, gap, grid, theta,
                                seed=np.random.default_rng(seed))
        x_in = np.zeros(config.M)
        x_in[0] = 1.0
        if config.M >= 3:
            x_in[2] = exact_second_derivative(ctx.spec, ctx.v, 0, gap, 0.0)
        f_norm = forcing_norm_sq(ctx.spec, ctx.v, 0, gap, ctx.tau, order=config.M)
        eta_norm = estimated_eta_norm_sq(config.D, theta)
        budget = select_qr(f_norm, eta_norm)
        model = build_model(config.M, x_in, ctx.tau, budget,
                            last_timepoint=float(grid[-1]))
        fits[gap] = fit(model, series)
    return fits


def _convergence_cell(ctx: PipelineContext, config: ExperimentConfig,
                      theta: float, trial: int) -> list[tuple]:
    m_max = max(config.m_values)
    exact_full = assemble_pair_exact(ctx.spec, ctx.v, m_max, ctx.t_star)
    fits = None if theta == 0.0 else _fit_gaps(ctx, config, theta, trial, m_max)
    j_norm = 2.0 * ctx.spec.spectral_width
    rows = []
    for m in sorted(config.m_values):
        # leading principal submatrices of the m_max pair are the m-pair
        exact_m = KrylovPair(
            m=m, R_hat=exact_full.R_hat[:m, :m], J_hat=exact_full.J_hat[:m, :m],
            source="exact", t_star=ctx.t_star,
        )
        if theta == 0.0:
            pair = exact_m
            omega = 0.0
        else:
            pair = assemble_pair_minimax(fits, m, ctx.t_star)
            omega = noise_rate(pair, exact_m, j_norm)
        result = threshold_solve(pair, _eps(config, m, theta))
        estimate = ground_energy(result, ctx.class_tag,
                                 top_energy=ctx.top_energy)
        rel_error = abs(estimate - ctx.lam0) / abs(ctx.lam0)
        rows.append((m, theta, config.gamma0, trial, result.ground_gap,
                     estimate, rel_error, omega, result.kept_dim))
    return rows


def _run_cells(cells, worker, threads: int):
    if threads > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            return list(pool.map(worker, cells))
    return [worker(c) for c in cells]


def run_convergence(config: ExperimentConfig, threads: int = 1) -> str:
    """Ground-energy error versus Krylov dimension; returns the CSV path."""
    start = time.time()
    config.validate()
    ctx = build_context(config)
    cells = [(theta, trial) for theta in config.theta_values
             for trial in range(config.trials)]
    results = _run_cells(
        cells, lambda c: _convergence_cell(ctx, config, c[0], c[1]), threads
    )
    rows = [row for cell_rows in results for row in cell_rows]
    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, "convergence.csv")
    _write_csv(path, ["m", "theta", "gamma0", "trial", "delta0_prime",
                      "estimate", "rel_error", "omega", "kept_dim"], rows)
    _write_manifest(config.out, "convergence", config, [path], len(rows),
                    time.time() - start)
    return path


def _scaling_cell(ctx: PipelineContext, config: ExperimentConfig,
                  D: int, theta: float, trial: int) -> tuple:
    gap = 1
    grid = sample_grid(ctx.t_star, ctx.delta_t, D)
    seed = _cell_seed(config.master_seed, 2, _theta_key(theta), trial, D)
    series = measure_series(ctx.spec, ctx.v, 0, gap, grid, theta,
                            seed=np.random.default_rng(seed))
    x_in = np.zeros(config.M)
    x_in[0] = 1.0
    if config.M >= 3:
        x_in[2] = exact_second_derivative(ctx.spec, ctx.v, 0, gap, 0.0)
    f_norm = forcing_norm_sq(ctx.spec, ctx.v, 0, gap, ctx.tau, order=config.M)
    budget = select_qr(f_norm, estimated_eta_norm_sq(D, theta))
    model = build_model(config.M, x_in, ctx.tau, budget,
                        last_timepoint=float(grid[-1]))
    f = fit(model, series)
    truth = recovery_derivative(ctx.spec, ctx.v, 0, gap, ctx.t_star, 1)
    abs_error = abs(evaluate_x1(f, ctx.t_star) - truth)
    sigma = error_certificate(model, grid, ctx.t_star, 1).sigma
    return (D, theta, trial, abs_error, sigma)


def run_derivative_scaling(config: ExperimentConfig, threads: int = 1) -> str:
    """Derivative error and certificate versus datapoint count D.

    Per-trial rows are followed by summary rows (trial = -1) holding the
    trial-averaged error and certificate for each (D, theta).
    """
    start = time.time()
    config.validate()
    ctx = build_context(config)
    cells = [(D, theta, trial) for D in config.d_values
             for theta in config.theta_values
             for trial in range(config.trials)]
    rows = _run_cells(
        cells, lambda c: _scaling_cell(ctx, config, c[0], c[1], c[2]), threads
    )
    summary = []
    for D in config.d_values:
        for theta in config.theta_values:
            sel = [r for r in rows if r[0] == D and r[1] == theta]
            summary.append((D, theta, -1,
                            float(np.mean([r[3] for r in sel])),
                            float(np.mean([r[4] for r in sel]))))
    all_rows = rows + summary
    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, "deriv_scaling.csv")
    _write_csv(path, ["D", "theta", "trial", "abs_error", "sigma_certificate"],
               all_rows)
    _write_manifest(config.out, "deriv-scaling", config, [path], len(all_rows),
                    time.time() - start)
    return path


def run_minimax_demo(config: ExperimentConfig) -> str:
    """Dense traces of exact signal versus reconstructions at three weights.

    The r sweep {r0/10, r0, 10 r0} with fixed q shows under-, balanced,
    and over-fitting; the derivative reconstruction at the balanced point
    is accompanied by its worst-case certificate on a dense time grid.
    """
    start = time.time()
    config.validate()
    ctx = build_context(config)
    gap = 1
    theta = config.theta_values[0]
    grid = sample_grid(ctx.t_star, ctx.delta_t, config.D)
    seed = _cell_seed(config.master_seed, 3, _theta_key(theta), 0, gap)
    series = measure_series(ctx.spec, ctx.v, 0, gap, grid, theta,
                            seed=np.random.default_rng(seed))
    x_in = np.zeros(config.M)
    x_in[0] = 1.0
    if config.M >= 3:
        x_in[2] = exact_second_derivative(ctx.spec, ctx.v, 0, gap, 0.0)
    f_norm = forcing_norm_sq(ctx.spec, ctx.v, 0, gap, ctx.tau, order=config.M)
    eta0 = estimated_eta_norm_sq(config.D, theta)
    # the r variants come from scaled noise bounds so each budget stays valid
    variants = {}
    for tag, scale in (("rlow", 10.0), ("r0", 1.0), ("rhigh", 0.1)):
        budget = select_qr(f_norm, eta0 * scale if eta0 > 0 else 0.0)
        if eta0 == 0.0 and scale != 1.0:
            budget = select_qr(f_norm, 0.0)
        model = build_model(config.M, x_in, ctx.tau, budget,
                            last_timepoint=float(grid[-1]))
        variants[tag] = (model, fit(model, series))
    model0, fit0 = variants["r0"]
    dense = np.linspace(0.0, ctx.tau, 201)
    rows = []
    for t in dense:
        sigma = error_certificate(model0, grid, float(t), 1).sigma
        rows.append((
            float(t),
            recovery_probability(ctx.spec, ctx.v, 0, gap, float(t)),
            recovery_derivative(ctx.spec, ctx.v, 0, gap, float(t), 1),
            evaluate_x0(variants["rlow"][1], float(t)),
            evaluate_x0(fit0, float(t)),
            evaluate_x0(variants["rhigh"][1], float(t)),
            evaluate_x1(fit0, float(t)),
            sigma,
        ))
    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, "minimax_demo.csv")
    _write_csv(path, ["t", "exact_R", "exact_dR", "xhat0_rlow", "xhat0_r0",
                      "xhat0_rhigh", "xhat1", "sigma"], rows)
    pts_path = os.path.join(config.out, "minimax_demo_points.csv")
    _write_csv(pts_path, ["t", "y"],
               [(float(t), float(y)) for t, y in zip(grid, series.values)])
    _write_manifest(config.out, "minimax-demo", config, [path, pts_path],
                    len(rows), time.time() - start)
    return path


def run_gram(config: ExperimentConfig) -> str:
    """Dump the projected pair matrices (exact, plus estimated if noisy)."""
    start = time.time()
    config.validate()
    ctx = build_context(config)
    m = max(config.m_values)
    pairs = {"exact": assemble_pair_exact(ctx.spec, ctx.v, m, ctx.t_star)}
    theta = config.theta_values[0]
    if theta > 0:
        fits = _fit_gaps(ctx, config, theta, 0, m)
        pairs["minimax"] = assemble_pair_minimax(fits, m, ctx.t_star)
    rows = []
    for source, pair in pairs.items():
        for j in range(m):
            for k in range(m):
                rows.append((
                    source, j, k,
                    float(pair.R_hat[j, k].real), float(pair.R_hat[j, k].imag),
                    float(pair.J_hat[j, k].real), float(pair.J_hat[j, k].imag),
                ))
    os.makedirs(config.out, exist_ok=True)
    path = os.path.join(config.out, "gram.csv")
    _write_csv(path, ["source", "row", "col", "R_re", "R_im", "J_re", "J_im"],
               rows)
    _write_manifest(config.out, "gram", config, [path], len(rows),
                    time.time() - start)
    return path
