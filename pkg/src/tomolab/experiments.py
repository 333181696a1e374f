"""Experiment definitions behind ``tomolab run``.

Every experiment turns an :class:`ExperimentConfig` into a list of
:class:`ResultRow`. Work is split into tasks that each own a random stream
derived from ``(seed, task index)``, so results do not depend on how many
threads execute them. Rows carrying a ``passed`` flag are asserted checks.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, fields
from typing import Callable

import numpy as np
from scipy import stats

from . import lowerbound as lb
from .adaptive import SimulatedOracle, diagnostics_check, nonadaptive_baseline, run_adaptive
from .certificates import hessian_lower_bound_check, off_diag_certificate
from .estimators import h_n, h_n_projected, predicted_error_bound
from .linalg import (
    bhattacharyya,
    bures_distance,
    fidelity,
    infidelity,
    mix_with_identity,
    op_norm,
    trace_distance,
)
from .measurement import exact_pure_moment, moment_bound, moment_check, projected_povm_transcript, uniform_povm_vectors
from .seeding import stream
from .states import HardPriorParams, haar_pure, haar_unitary, hard_prior_sample, is_good, random_state

EXPERIMENTS = (
    "rate-sweep",
    "adaptive-vs-nonadaptive",
    "moment-check",
    "unbiasedness",
    "tilt",
    "volume-ratio",
    "certificates",
    "fidelity-toolkit",
)

# stream index reserved for drawing the fixed unknown state of an experiment
STATE_STREAM = 1 << 40


class ConfigError(ValueError):
    def __init__(self, field_name: str, message: str):
        super().__init__(f"{field_name}: {message}")
        self.field = field_name



DEFAULT_BANDS = {
    ("rate-sweep", "slope"): (-0.6, -0.4),
    ("adaptive-vs-nonadaptive", "slope_adaptive"): (-1.25, -0.75),
    ("adaptive-vs-nonadaptive", "slope_nonadaptive"): (-0.75, -0.35),
}


@dataclass
class ExperimentConfig:
    experiment: str
    d: int | list[int] = 8
    r: int | None = None
    n_grid: list[int] = field(default_factory=lambda: [2**k for k in range(10, 17)])
    gamma: float = 1 / 16
    epsilon: float = 0.05
    C: float = 10.0
    delta: float = 0.05
    trials: int = 50
    mc_samples: int = 10**5
    seed: int = 0
    output: str = "results.csv"
    spectrum: list[float] | None = None
    k_max: int = 4
    n: int = 1000
    diagnostic_runs: int = 20
    diagnostic_min_pass: int = 18

    @classmethod
    def from_dict(cls, raw: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        clean = {}
        for key, value in raw.items():
            name = key.replace("-", "_")
            if name not in known:
                raise ConfigError(key, "unknown configuration key")
            clean[name] = value
        if "experiment" not in clean:
            raise ConfigError("experiment", "missing")
        cfg = cls(**clean)
        cfg.validate()
        return cfg

    def dims(self) -> list[int]:
        return [self.d] if isinstance(self.d, int) else list(self.d)

    def validate(self) -> None:
        if self.experiment not in EXPERIMENTS:
            raise ConfigError("experiment", f"unknown experiment {self.experiment!r}")
        dims = self.dims()
        if not dims or any(not isinstance(x, int) or x < 1 for x in dims):
            raise ConfigError("d", "dimensions must be positive integers")
        if self.r is not None and (not isinstance(self.r, int) or self.r < 1):
            raise ConfigError("r", "rank must be a positive integer")
        grid = list(self.n_grid)
        if not grid or any(not isinstance(x, int) or x < 1 for x in grid):
            raise ConfigError("n_grid", "counts must be positive integers")
        if any(b <= a for a, b in zip(grid, grid[1:])):
            raise ConfigError("n_grid", "must be strictly ascending")
        for name in ("trials", "mc_samples", "k_max", "n", "diagnostic_runs"):
            value = getattr(self, name)
            if not isinstance(value, int) or value < 1:
                raise ConfigError(name, "must be a positive integer")
        if not isinstance(self.seed, int) or not 0 <= self.seed < 2**64:
            raise ConfigError("seed", "must be an integer in [0, 2**64)")
        if not 0 < self.gamma < 1:
            raise ConfigError("gamma", "must lie in (0, 1)")
        if not 0 < self.delta < 1:
            raise ConfigError("delta", "must lie in (0, 1)")
        if self.epsilon < 0:
            raise ConfigError("epsilon", "must be nonnegative")
        if self.C <= 0:
            raise ConfigError("C", "must be positive")
        if self.spectrum is not None:
            s = np.asarray(self.spectrum, dtype=float)
            if np.any(s < 0) or abs(s.sum() - 1) > 1e-12:
                raise ConfigError("spectrum", "must be nonnegative and sum to 1")


@dataclass
class ResultRow:
    experiment: str
    metric: str
    estimate: float
    trial: int | None = None
    d: int | None = None
    r: int | None = None
    n: int | None = None
    gamma: float | None = None
    epsilon: float | None = None
    C: float | None = None
    std_error: float | None = None
    bound: float | None = None
    passed: bool | None = None

    def __post_init__(self):
        if not math.isfinite(self.estimate):
            raise ValueError(f"non-finite value for {self.metric}")


COLUMNS = ["experiment", "trial", "d", "r", "n", "gamma", "epsilon", "C",
           "metric", "estimate", "std_error", "bound", "pass"]


@dataclass
class SlopeFit:
    slope: float
    intercept: float
    stderr: float
    ci_low: float
    ci_high: float


def fit_loglog(x, y, level: float = 0.95) -> SlopeFit:
    """Least-squares fit of ``log y = slope log x + intercept`` with a t-based CI."""
    lx, ly = np.log(np.asarray(x, float)), np.log(np.asarray(y, float))
    if lx.size < 2:
        raise ValueError("need at least two points to fit a slope")
    res = stats.linregress(lx, ly)
    dof = lx.size - 2
    half = stats.t.ppf(0.5 + level / 2, dof) * res.stderr if dof > 0 else math.inf
    stderr = float(res.stderr) if dof > 0 else math.inf
    slope = float(res.slope)
    return SlopeFit(slope, float(res.intercept), stderr, slope - half, slope + half)


def _band_row(experiment, metric, fit: SlopeFit, band, **kw) -> ResultRow:
    lo, hi = band
    return ResultRow(experiment, metric, fit.slope, std_error=fit.stderr if math.isfinite(fit.stderr) else None,
                     bound=None, passed=bool(lo <= fit.slope <= hi), **kw)


def _map(fn: Callable, tasks: list, threads: int) -> list:
    if threads <= 1:
        return [fn(t) for t in tasks]
    with ThreadPoolExecutor(max_workers=threads) as pool:
        return list(pool.map(fn, tasks))


def _random_full_rank(d: int, rng) -> np.ndarray:
    return random_state(d, rng.dirichlet(np.ones(d)), rng)


# ---------------------------------------------------------------------------


def run_rate_sweep(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRow]:
    d = cfg.dims()[0]
    rho = _random_full_rank(d, stream(cfg.seed, STATE_STREAM))
    grid = list(cfg.n_grid)

    def task(item):
        trial, k = item
        rng = stream(cfg.seed, trial * len(grid) + k)
        n = grid[k]
        est = h_n(uniform_povm_vectors(rho, n, rng)).estimate
        return ResultRow("rate-sweep", "op_error", op_norm(est - rho), trial=trial, d=d, n=n,
                         bound=predicted_error_bound(d, n, cfg.delta))

    items = [(t, k) for t in range(cfg.trials) for k in range(len(grid))]
    rows = _map(task, items, threads)
    med = [float(np.median([r.estimate for r in rows if r.n == n])) for n in grid]
    fit = fit_loglog(grid, med)
    rows.append(_band_row("rate-sweep", "slope", fit, DEFAULT_BANDS[("rate-sweep", "slope")], d=d))
    c_fit = float(np.median([r.estimate / r.bound for r in rows if r.metric == "op_error"]))
    rows.append(ResultRow("rate-sweep", "fitted_C", c_fit, d=d))
    return rows


def _adaptive_trial(cfg, rho, d, r, n, rng):
    oracle = SimulatedOracle(rho, n, rng)
    est = run_adaptive(oracle, d, r, cfg.gamma, cfg.delta, n)
    return est


def run_adaptive_vs_nonadaptive(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRow]:
    spectrum = cfg.spectrum if cfg.spectrum is not None else [0.5, 0.25, 0.125, 0.125]
    d = len(spectrum)
    r = cfg.r if cfg.r is not None else d
    rho = random_state(d, spectrum, stream(cfg.seed, STATE_STREAM))
    grid = list(cfg.n_grid)
    name = "adaptive-vs-nonadaptive"

    def task(item):
        trial, k = item
        n = grid[k]
        rng = stream(cfg.seed, trial * len(grid) + k)
        est = _adaptive_trial(cfg, rho, d, r, n, rng)
        base = nonadaptive_baseline(SimulatedOracle(rho, n, rng), d, n, cfg.delta)
        common = dict(trial=trial, d=d, r=r, n=n, gamma=cfg.gamma)
        return [
            ResultRow(name, "infidelity_adaptive", infidelity(rho, est.state), **common),
            ResultRow(name, "infidelity_nonadaptive", infidelity(rho, base), **common),
        ]

    items = [(t, k) for t in range(cfg.trials) for k in range(len(grid))]
    rows = [row for pair in _map(task, items, threads) for row in pair]

    med = {}
    for arm in ("adaptive", "nonadaptive"):
        med[arm] = [float(np.median([x.estimate for x in rows if x.n == n and x.metric == f"infidelity_{arm}"]))
                    for n in grid]
        fit = fit_loglog(grid, med[arm])
        rows.append(_band_row(name, f"slope_{arm}", fit, DEFAULT_BANDS[(name, f"slope_{arm}")], d=d, r=r,
                              gamma=cfg.gamma))
    rows.append(ResultRow(name, "adaptive_minus_nonadaptive_at_max_n", med["adaptive"][-1] - med["nonadaptive"][-1],
                          d=d, r=r, n=grid[-1], gamma=cfg.gamma, bound=0.0,
                          passed=bool(med["adaptive"][-1] < med["nonadaptive"][-1])))

    n_max = grid[-1]

    def diag_task(run):
        rng = stream(cfg.seed, (1 << 32) + run)
        est = _adaptive_trial(cfg, rho, d, r, n_max, rng)
        return diagnostics_check(rho, est, true_rank=int(np.sum(np.asarray(spectrum) > 0)))

    reports = _map(diag_task, list(range(cfg.diagnostic_runs)), threads)
    for run, rep in enumerate(reports):
        rows.append(ResultRow(name, "diagnostics_pass", float(rep.passed), trial=run, d=d, r=r, n=n_max,
                              gamma=cfg.gamma))
        worst_eps = max(rd.eps_ratio for rd in rep.rounds)
        rows.append(ResultRow(name, "eps_ratio_max", worst_eps, trial=run, d=d, r=r, n=n_max, gamma=cfg.gamma))
    passes = sum(rep.passed for rep in reports)
    rows.append(ResultRow(name, "diagnostics_pass_count", float(passes), d=d, r=r, n=n_max, gamma=cfg.gamma,
                          bound=float(cfg.diagnostic_min_pass), passed=passes >= cfg.diagnostic_min_pass))
    return rows


def run_moment_check(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRow]:
    items = [(d, k) for d in cfg.dims() for k in range(1, cfg.k_max + 1)]

    def task(item):
        d, k = item
        idx = d * 100 + k
        rng = stream(cfg.seed, idx)
        u = haar_pure(d, rng)
        rho = _random_full_rank(d, rng)
        est, se = moment_check(k, rho, u, cfg.mc_samples, rng)
        bound = moment_bound(k)
        mixed = ResultRow("moment-check", "moment_mixed", est, d=d, n=k, std_error=se, bound=bound,
                          passed=est <= bound + 3 * se)
        pure = np.outer(u, u.conj())
        est_p, se_p = moment_check(k, pure, u, cfg.mc_samples, rng)
        exact = exact_pure_moment(d, k)
        pure_row = ResultRow("moment-check", "moment_pure", est_p, d=d, n=k, std_error=se_p, bound=exact,
                             passed=abs(est_p - exact) <= 3 * se_p and est_p <= bound + 3 * se_p)
        return [mixed, pure_row]

    return [row for pair in _map(task, items, threads) for row in pair]


def run_unbiasedness(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRow]:
    samples = cfg.mc_samples

    def task(d):
        rng = stream(cfg.seed, d)
        rho = _random_full_rank(d, rng)
        vecs = uniform_povm_vectors(rho, samples, rng)
        mean = h_n(vecs).estimate
        err = float(np.linalg.norm(mean - rho))
        tol = 4 * d / math.sqrt(samples)
        out = [ResultRow("unbiasedness", "h1_mean_error", err, d=d, n=samples, bound=tol, passed=err <= tol)]
        r = math.ceil(d / 2)
        basis = haar_unitary(d, rng)[:, :r]
        transcript = projected_povm_transcript(rho, basis, samples, rng)
        proj = basis @ basis.conj().T
        mean_p = h_n_projected(transcript, basis).estimate
        err_p = float(np.linalg.norm(mean_p - proj @ rho @ proj))
        out.append(ResultRow("unbiasedness", "projected_mean_error", err_p, d=d, r=r, n=samples, bound=tol,
                             passed=err_p <= tol))
        return out

    return [row for pair in _map(task, cfg.dims(), threads) for row in pair]


def _good_prior_state(d: int, rng) -> np.ndarray:
    params = HardPriorParams(d)
    while True:
        rho0 = hard_prior_sample(params, rng)
        if is_good(rho0, params):
            return rho0


def adaptive_transcript(rho0, length: int, rng, gamma: float = 1 / 16) -> np.ndarray:
    """Unit vectors chosen by the adaptive algorithm when run on ``rho0``.

    The algorithm is run with enough copies that its rounds together yield at
    least ``length`` rank-1 outcomes; those are then thinned evenly, keeping
    their order, to exactly ``length`` vectors.
    """
    d = rho0.shape[0]
    t_rounds = max(math.ceil(math.log2(d / gamma)) + 4, 5)
    n = t_rounds * length
    while True:
        oracle = SimulatedOracle(rho0, n, rng, record=True)
        run_adaptive(oracle, d, d, gamma, 0.05, n)
        vecs = np.concatenate([t.vectors[~t.bottom] for t in oracle.history])
        if vecs.shape[0] >= length:
            keep = np.linspace(0, vecs.shape[0] - 1, length).round().astype(int)
            return vecs[keep]
        n *= 2


def fixed_basis_transcript(d: int, length: int) -> np.ndarray:
    return np.eye(d, dtype=complex)[np.arange(length) % d]


def run_tilt(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRow]:
    params = lb.NeighborhoodParams(cfg.epsilon, cfg.C)
    items = [(d, strategy) for d in cfg.dims() for strategy in ("adaptive", "fixed")]

    def task(item):
        d, strategy = item
        rho0 = _good_prior_state(d, stream(cfg.seed, STATE_STREAM + d))
        rng = stream(cfg.seed, d * 10 + (strategy == "fixed"))
        if strategy == "adaptive":
            x = adaptive_transcript(rho0, cfg.n, rng)
        else:
            x = fixed_basis_transcript(d, cfg.n)
        est, se = lb.tilt_per_measurement(rho0, x, params, cfg.mc_samples, rng)
        bound = lb.tilt_bound(params, d)
        return ResultRow("tilt", f"tilt_{strategy}", est, d=d, n=cfg.n, epsilon=cfg.epsilon, C=cfg.C,
                         std_error=se, bound=bound, passed=bound - 3 * se <= est <= 3 * se)

    return _map(task, items, threads)


def density_chi2_d2(samples: int, rng, bins: int = 20) -> tuple[float, float]:
    """Chi-square test of the top eigenvalue of 2x2 uniform-ball draws against density ``8 lam`` on [0, 1/2].

    Returns ``(statistic, p_value)``; bins have equal probability under the
    model (CDF ``4 lam^2``).
    """
    x = lb.uniform_ball_samples(2, samples, rng)
    top = np.linalg.eigvalsh(x)[:, -1]
    edges = np.sqrt(np.linspace(0, 1, bins + 1) / 4.0)
    counts, _ = np.histogram(top, bins=edges)
    res = stats.chisquare(counts)
    return float(res.statistic), float(res.pvalue)


def run_volume_ratio(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRow]:
    name = "volume-ratio"
    rows: list[ResultRow] = []
    samples = cfg.mc_samples

    def vol_task(d):
        est, se = lb.volume_ratio_mc(d, samples, stream(cfg.seed, 10 + d))
        if d == 2:
            return ResultRow(name, "volume_ratio", est, d=d, std_error=se, bound=1.0, passed=est == 1.0)
        bound = math.exp(-3 * d * d)
        return ResultRow(name, "volume_ratio", est, d=d, std_error=se, bound=bound, passed=est >= bound)

    vol_dims = [d for d in cfg.dims() if d <= 4]
    rows += _map(vol_task, vol_dims, threads)

    stat, p = density_chi2_d2(samples, stream(cfg.seed, 5))
    rows.append(ResultRow(name, "density_chi2_pvalue", p, d=2, bound=0.01, passed=p >= 0.01))

    def sweep_task(d):
        rng = stream(cfg.seed, 100 + d)
        g = lb.sample_gamma_points(d, samples, rng)
        gam_ok = sum(lb.check_gamma_lower(lam)[2] for lam in g)
        contain = sum(lb.in_delta_prime(lam) for lam in g)
        pts = lb.sample_delta_points(d, samples, rng)
        del_ok = sum(lb.check_delta_upper(lam)[2] for lam in pts)
        worst_gamma = min(lb.log_eigen_density_f(lam) for lam in g) - lb.gamma_log_lower_bound(d)
        worst_delta = lb.delta_log_upper_bound(d) - max(lb.log_eigen_density_f(lam) for lam in pts)
        return [
            ResultRow(name, "gamma_lower_pass_fraction", gam_ok / samples, d=d, n=samples, bound=1.0,
                      passed=gam_ok == samples),
            ResultRow(name, "gamma_lower_log_margin", worst_gamma, d=d, n=samples),
            ResultRow(name, "delta_upper_pass_fraction", del_ok / samples, d=d, n=samples, bound=1.0,
                      passed=del_ok == samples),
            ResultRow(name, "delta_upper_log_margin", worst_delta, d=d, n=samples),
            ResultRow(name, "gamma_in_delta_prime_fraction", contain / samples, d=d, n=samples, bound=1.0,
                      passed=contain == samples),
        ]

    rows += [row for group in _map(sweep_task, [d for d in cfg.dims() if d >= 2], threads) for row in group]
    for d in (2, 3):
        vols = lb.simplex_volumes_mc(d, samples, stream(cfg.seed, 200 + d))
        rows.append(ResultRow(name, "vol_delta", vols["vol_delta"], d=d, n=samples))
        rows.append(ResultRow(name, "vol_gamma", vols["vol_gamma"], d=d, n=samples))
    return rows


def random_pd(d: int, rng, cond: float = 1e3) -> np.ndarray:
    """Random positive definite matrix with eigenvalues log-uniform in ``[1, cond]``."""
    u = haar_unitary(d, rng)
    a = (u * np.exp(rng.uniform(0.0, math.log(cond), d))) @ u.conj().T
    return 0.5 * (a + a.conj().T)


def random_hermitian(d: int, rng) -> np.ndarray:
    b = rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))
    return 0.5 * (b + b.conj().T)


def random_sqrt_instance(rng, c1: float = 0.25, c2: float = 1 / 64, max_dim: int = 4):
    """Admissible ``(M, N, E)``: spectra uniform in ``[c1, 4c1]`` and ``[c2, 2c1]``, ``||E|| <= sqrt(c1 c2)``."""
    d1, d2 = (int(x) for x in rng.integers(1, max_dim + 1, size=2))
    u = haar_unitary(d1, rng)
    m = (u * rng.uniform(c1, 4 * c1, d1)) @ u.conj().T
    v = haar_unitary(d2, rng)
    n = (v * rng.uniform(c2, 2 * c1, d2)) @ v.conj().T
    e = rng.standard_normal((d1, d2)) + 1j * rng.standard_normal((d1, d2))
    e *= math.sqrt(c1 * c2) * rng.uniform(0.0, 1.0) / np.linalg.norm(e, 2)
    return 0.5 * (m + m.conj().T), 0.5 * (n + n.conj().T), e


def run_certificates(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRow]:
    name = "certificates"
    count = cfg.trials
    rng = stream(cfg.seed, 1)
    hess_ok, worst_margin, worst_equality = 0, math.inf, 0.0
    for _ in range(count):
        d = int(rng.integers(1, 7))
        a, b = random_pd(d, rng), random_hermitian(d, rng)
        chk = hessian_lower_bound_check(a, b)
        hess_ok += chk.passed
        worst_margin = min(worst_margin, (chk.lhs - chk.rhs) / (1 + np.linalg.norm(b) ** 2))
        ac = np.diag(np.exp(rng.uniform(0.0, math.log(1e3), d)))
        # unit direction: the finite-difference truncation error grows like ||B||^4 h^2
        bc = np.diag(rng.standard_normal(d))
        bc /= np.linalg.norm(bc)
        eq = hessian_lower_bound_check(ac, bc)
        worst_equality = max(worst_equality, abs(eq.lhs - eq.rhs))
    rows = [
        ResultRow(name, "hessian_pass_count", float(hess_ok), n=count, bound=float(count), passed=hess_ok == count),
        ResultRow(name, "hessian_min_normalized_margin", worst_margin, n=count),
        ResultRow(name, "hessian_commuting_max_gap", worst_equality, n=count, bound=1e-6,
                  passed=worst_equality <= 1e-6),
    ]
    rng = stream(cfg.seed, 2)
    worst_res, worst_gap, worst_trace = 0.0, math.inf, math.inf
    for _ in range(count):
        cert = off_diag_certificate(*random_sqrt_instance(rng), 0.25, 1 / 64)
        worst_res = max(worst_res, cert.sylvester_residual)
        worst_gap = min(worst_gap, cert.min_eig_gap)
        worst_trace = min(worst_trace, cert.trace_gap)
    rows += [
        ResultRow(name, "sqrt_sylvester_residual_max", worst_res, n=count, bound=1e-10, passed=worst_res <= 1e-10),
        ResultRow(name, "sqrt_min_eig_gap_min", worst_gap, n=count, bound=-1e-8, passed=worst_gap >= -1e-8),
        ResultRow(name, "sqrt_trace_gap_min", worst_trace, n=count, bound=-1e-8, passed=worst_trace >= -1e-8),
    ]
    return rows


def run_fidelity_toolkit(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRow]:
    name = "fidelity-toolkit"
    rng = stream(cfg.seed, 3)
    count = cfg.trials
    bures_worst = fvdg_low = fvdg_high = fvdg_high2 = mix_worst = comm_worst = sym_worst = -math.inf
    for _ in range(count):
        d = int(rng.integers(2, 17))
        r1, r2, r3 = (_random_full_rank(d, rng) if rng.random() < 0.5 else random_state(d, [1.0], rng)
                      for _ in range(3))
        bures_worst = max(bures_worst, bures_distance(r1, r3) - bures_distance(r1, r2) - bures_distance(r2, r3))
        f = fidelity(r1, r2)
        td = trace_distance(r1, r2)
        fvdg_low = max(fvdg_low, (1 - f) - td)
        fvdg_high = max(fvdg_high, td - math.sqrt(2 * (1 - f)))
        # with the unnormalized trace norm the sharp upper constant is 2 sqrt(1 - F)
        fvdg_high2 = max(fvdg_high2, td - 2 * math.sqrt(1 - f))
        sym_worst = max(sym_worst, abs(f - fidelity(r2, r1)))
        g = float(rng.uniform(0, 0.5))
        mix_worst = max(mix_worst, (1 - fidelity(r1, mix_with_identity(r1, g))) - 2 * g)
        p, q = rng.dirichlet(np.ones(d)), rng.dirichlet(np.ones(d))
        comm_worst = max(comm_worst, abs(fidelity(np.diag(p), np.diag(q)) - bhattacharyya(p, q) ** 2))
    tol = 1e-8
    return [
        ResultRow(name, "bures_triangle_max_excess", bures_worst, n=count, bound=tol, passed=bures_worst <= tol),
        ResultRow(name, "fuchs_lower_max_excess", fvdg_low, n=count, bound=tol, passed=fvdg_low <= tol),
        ResultRow(name, "fuchs_upper_max_excess", fvdg_high, n=count, bound=tol, passed=fvdg_high <= tol),
        ResultRow(name, "fuchs_upper_sharp_max_excess", fvdg_high2, n=count, bound=tol, passed=fvdg_high2 <= tol),
        ResultRow(name, "fidelity_symmetry_max_gap", sym_worst, n=count, bound=tol, passed=sym_worst <= tol),
        ResultRow(name, "mix_infidelity_max_excess", mix_worst, n=count, bound=tol, passed=mix_worst <= tol),
        ResultRow(name, "commuting_bc_max_gap", comm_worst, n=count, bound=tol, passed=comm_worst <= tol),
    ]


RUNNERS = {
    "rate-sweep": run_rate_sweep,
    "adaptive-vs-nonadaptive": run_adaptive_vs_nonadaptive,
    "moment-check": run_moment_check,
    "unbiasedness": run_unbiasedness,
    "tilt": run_tilt,
    "volume-ratio": run_volume_ratio,
    "certificates": run_certificates,
    "fidelity-toolkit": run_fidelity_toolkit,
}


def run_experiment(cfg: ExperimentConfig, threads: int = 1) -> list[ResultRow]:
    return RUNNERS[cfg.experiment](cfg, threads)


def all_checks_pass(rows: list[ResultRow]) -> bool:
    return all(r.passed for r in rows if r.passed is not None)
