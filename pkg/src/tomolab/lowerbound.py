"""Monte-Carlo checks of the ingredients behind the trace-distance lower bound.

Conventions: ``U0`` is the space of real symmetric traceless ``d x d``
matrices with the Frobenius inner product; the trace norm is unnormalized.

Uniform sampling on orthogonally invariant subsets of ``U0`` uses the Weyl
integration formula: a uniformly distributed matrix is ``O diag(lam) O^T``
with ``O`` Haar-orthogonal and ``lam`` distributed with density proportional
to the Vandermonde product ``prod_{i<j} |lam_i - lam_j|`` on the corresponding
eigenvalue set.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from functools import lru_cache

import numpy as np
from numpy.polynomial import legendre

from .linalg import InvariantError
from .measurement import Transcript
from .seeding import as_generator
from .states import HardPriorParams, haar_orthogonal, hard_prior_sample, prior_log_ratio

SUM_ATOL = 1e-12
MAX_PROPOSALS = 10**7


@dataclass(frozen=True)
class NeighborhoodParams:
    """Neighborhood ``{||rho - rho0||_op <= C eps / d, ||rho - rho0||_tr <= C eps}``."""

    epsilon: float
    C: float = math.exp(20)

    def op_cap(self, d: int) -> float:
        return self.C * self.epsilon / d

    @property
    def trace_cap(self) -> float:
        return self.C * self.epsilon

    def in_regime(self, params: HardPriorParams) -> bool:
        return self.epsilon <= params.prior_sigma / self.C


# ---------------------------------------------------------------------------
# likelihood ratios and the posterior tilt


def _vectors(x) -> np.ndarray:
    if isinstance(x, Transcript):
        if x.bottom.any():
            raise InvariantError("likelihood ratio needs rank-1 outcomes only")
        return x.vectors
    return np.atleast_2d(np.asarray(x, dtype=complex))


def _quadratic_forms(mats: np.ndarray, vecs: np.ndarray) -> np.ndarray:
    """``x_i^H A x_i`` for each matrix (leading axes) and vector; real part."""
    return np.real(np.einsum("ni,...ij,nj->...n", vecs.conj(), mats, vecs))


def transcript_likelihood_ratio(rho, rho0, x) -> float:
    """``sum_i log(x_i^H rho x_i / x_i^H rho0 x_i)``."""
    vecs = _vectors(x)
    num = _quadratic_forms(np.asarray(rho), vecs)
    den = _quadratic_forms(np.asarray(rho0), vecs)
    if np.any(den <= 0):
        raise ZeroDivisionError("reference state gives an outcome zero probability")
    return float(np.sum(np.log(num / den)))


@lru_cache(maxsize=None)
def vandermonde_log_max(d: int) -> float:
    """``log max prod_{i<j} |x_i - x_j|`` over ``[-1, 1]^d``.

    The maximiser is the Gauss-Lobatto-Legendre node set: ``+-1`` and the
    roots of ``P'_{d-1}``.
    """
    if d < 2:
        return 0.0
    coef = np.zeros(d)
    coef[-1] = 1.0
    inner = legendre.legroots(legendre.legder(coef)) if d > 2 else np.array([])
    nodes = np.concatenate([[-1.0], np.sort(inner), [1.0]])
    return _log_vandermonde(nodes[None, :])[0]


def _log_vandermonde(lam: np.ndarray) -> np.ndarray:
    d = lam.shape[-1]
    iu, ju = np.triu_indices(d, 1)
    with np.errstate(divide="ignore"):
        return np.sum(np.log(np.abs(lam[..., iu] - lam[..., ju])), axis=-1)


def sample_opball_spectra(d: int, radius: float, size: int, rng=None) -> np.ndarray:
    """Eigenvalues of uniform draws from ``{X in U0 : ||X||_op <= radius}``.

    Rows are unsorted. Proposals are uniform on the trace-zero slice of the
    cube (the first ``d - 1`` coordinates uniform, the last one fixed by the
    trace), accepted with probability ``V(lam) / max V``.
    """
    rng = as_generator(rng)
    if d < 2:
        raise ValueError("need d >= 2")
    log_vmax = vandermonde_log_max(d) + 1e-9
    out, have, proposals = [], 0, 0
    batch = 4096 if d <= 4 else 1 << 18
    while have < size:
        if proposals > MAX_PROPOSALS * max(1, size // 1000):
            raise RuntimeError("spectral rejection sampler exhausted its proposal budget")
        head = rng.uniform(-1.0, 1.0, size=(batch, d - 1))
        last = -head.sum(axis=1)
        lam = np.column_stack([head, last])
        ok = np.abs(last) <= 1.0
        u = rng.random(batch)
        ok &= np.log(u) < _log_vandermonde(lam) - log_vmax
        proposals += batch
        out.append(lam[ok])
        have += int(ok.sum())
    return radius * np.concatenate(out)[:size]


def sample_isotropic_neighborhood(rho0, params: NeighborhoodParams, rng=None, size: int | None = None):
    """Uniform draw(s) from the isotropic neighborhood of ``rho0`` inside ``U``.

    ``||rho - rho0||_op <= C eps / d`` already forces ``||rho - rho0||_tr <= C eps``,
    so the neighborhood is the operator-norm ball and is sampled exactly by
    the spectral method. Returns one ``d x d`` matrix, or ``(size, d, d)``.
    """
    rng = as_generator(rng)
    rho0 = np.asarray(rho0)
    if np.max(np.abs(rho0.imag if np.iscomplexobj(rho0) else 0)) > 1e-12:
        raise InvariantError("the neighborhood is defined for real symmetric states")
    rho0 = np.real(rho0)
    d = rho0.shape[0]
    cap = params.op_cap(d)
    if np.linalg.eigvalsh(rho0)[0] <= cap:
        raise ValueError("neighborhood leaves the PSD cone; rho0 is too close to the boundary")
    m = 1 if size is None else size
    lam = sample_opball_spectra(d, cap, m, rng)
    o = haar_orthogonal(d, rng, size=m)
    deltas = np.einsum("sij,sj,skj->sik", o, lam, o)
    deltas = 0.5 * (deltas + np.swapaxes(deltas, -1, -2))
    out = rho0 + deltas
    return out[0] if size is None else out


def tilt_per_measurement(rho0, x, params: NeighborhoodParams, mc_samples: int, rng=None,
                         chunk: int = 500) -> tuple[float, float]:
    """MC estimate of ``(1/n) E_{rho ~ neighborhood} log dT_rho/dT_rho0 (x)`` and its standard error."""
    rng = as_generator(rng)
    vecs = _vectors(x)
    rho0 = np.asarray(rho0)
    if np.iscomplexobj(rho0) and np.any(np.abs(rho0.imag) > 1e-12):
        raise InvariantError("the neighborhood is defined around real symmetric states")
    rho0 = np.real(rho0)
    base = _quadratic_forms(rho0, vecs)
    if np.any(base <= 0):
        raise ZeroDivisionError("reference state gives an outcome zero probability")
    if params.epsilon == 0:
        return 0.0, 0.0
    vals = np.empty(mc_samples)
    done = 0
    while done < mc_samples:
        k = min(chunk, mc_samples - done)
        rhos = sample_isotropic_neighborhood(rho0, params, rng, size=k)
        q = _quadratic_forms(rhos - rho0, vecs)
        vals[done:done + k] = np.mean(np.log1p(q / base), axis=1)
        done += k
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(mc_samples))


def tilt_bound(params: NeighborhoodParams, d: int) -> float:
    """Per-measurement lower bound ``-C^2 eps^2 / d``."""
    return -(params.C**2) * params.epsilon**2 / d


# ---------------------------------------------------------------------------
# trace-norm ball and the eigenvalue simplex


def _traceless_gaussian(d: int, size: int, rng) -> np.ndarray:
    # isotropic in the Frobenius geometry of U0
    a = rng.standard_normal((size, d, d))
    g = (a + np.swapaxes(a, 1, 2)) / 2.0
    tr = np.trace(g, axis1=1, axis2=2) / d
    return g - tr[:, None, None] * np.eye(d)


def uniform_ball_samples(d: int, size: int, rng=None) -> np.ndarray:
    """Uniform draws from the unit trace-norm ball of ``U0``, shape ``(size, d, d)``.

    Rejection from the unit Frobenius ball, which contains the trace-norm ball.
    """
    if d < 2:
        raise ValueError("need d >= 2")
    rng = as_generator(rng)
    dim = (d + 2) * (d - 1) // 2
    out, have = [], 0
    while have < size:
        batch = max(2 * (size - have), 256)
        g = _traceless_gaussian(d, batch, rng)
        norms = np.sqrt(np.sum(g * g, axis=(1, 2)))
        radii = rng.random(batch) ** (1.0 / dim)
        x = g * (radii / norms)[:, None, None]
        tn = np.sum(np.abs(np.linalg.eigvalsh(x)), axis=1)
        keep = x[tn <= 1.0]
        out.append(keep)
        have += keep.shape[0]
    return np.concatenate(out)[:size]


def uniform_ball_sample(d: int, rng=None) -> np.ndarray:
    return uniform_ball_samples(d, 1, rng)[0]


def _as_simplex_point(lam) -> np.ndarray:
    lam = np.asarray(lam, dtype=float)
    if lam.ndim != 1:
        raise InvariantError("eigenvalue tuple must be one-dimensional")
    if np.any(np.diff(lam) > 0):
        raise InvariantError("eigenvalues must be sorted in descending order")
    return lam


def in_delta(lam) -> bool:
    lam = np.asarray(lam, dtype=float)
    return bool(
        np.all(np.diff(lam) <= 0)
        and abs(lam.sum()) <= SUM_ATOL
        and np.abs(lam).sum() <= 1.0 + SUM_ATOL
    )


def in_delta_prime(lam) -> bool:
    lam = np.asarray(lam, dtype=float)
    return in_delta(lam) and bool(np.max(np.abs(lam)) <= 1.0 / lam.size + SUM_ATOL)


def gamma_centers(d: int) -> np.ndarray:
    i = np.arange(1, d + 1)
    return (d - 2 * i + 1) / d**2


def in_gamma(lam) -> bool:
    lam = np.asarray(lam, dtype=float)
    d = lam.size
    return bool(
        abs(lam.sum()) <= SUM_ATOL
        and np.all(np.abs(lam - gamma_centers(d)) <= 1.0 / d**4 + SUM_ATOL)
    )


def log_eigen_density_f(lam) -> float:
    lam = _as_simplex_point(lam)
    if not in_delta(lam):
        return -math.inf
    return float(_log_vandermonde(lam[None, :])[0])


def eigen_density_f(lam) -> float:
    """``1{lam in Delta} prod_{i<j} |lam_i - lam_j|`` for a descending tuple.

    Raises:
        InvariantError: if ``lam`` is not sorted in descending order.
    """
    return math.exp(log_eigen_density_f(lam))


def gamma_log_lower_bound(d: int) -> float:
    """``log(1 / ((2e)^{d^2/2} d^{d(d-1)/2}))``."""
    return -(d * d / 2) * math.log(2 * math.e) - (d * (d - 1) / 2) * math.log(d)


def delta_log_upper_bound(d: int) -> float:
    """``log(e^{2 d^2} / d^{d(d-1)/2})``."""
    return 2 * d * d - (d * (d - 1) / 2) * math.log(d)


def check_gamma_lower(lam) -> tuple[float, float, bool]:
    lam = _as_simplex_point(lam)
    if not in_gamma(lam):
        raise InvariantError("point is not in Gamma")
    logf = log_eigen_density_f(lam)
    logb = gamma_log_lower_bound(lam.size)
    return math.exp(logf), math.exp(logb), bool(logf >= logb)


def check_delta_upper(lam) -> tuple[float, float, bool]:
    lam = _as_simplex_point(lam)
    if not in_delta(lam):
        raise InvariantError("point is not in Delta")
    logf = log_eigen_density_f(lam)
    logb = delta_log_upper_bound(lam.size)
    return math.exp(logf), math.exp(logb), bool(logf <= logb)


def sample_gamma_points(d: int, size: int, rng=None) -> np.ndarray:
    """Uniform points of Gamma: box ``1/d^4`` around ``(d - 2i + 1)/d^2`` on the trace-zero plane."""
    rng = as_generator(rng)
    out, have = [], 0
    while have < size:
        head = rng.uniform(-1.0, 1.0, size=(2 * (size - have) + 16, d - 1))
        last = -head.sum(axis=1)
        ok = np.abs(last) <= 1.0
        mu = np.column_stack([head, last])[ok]
        out.append(mu)
        have += mu.shape[0]
    mu = np.concatenate(out)[:size]
    lam = gamma_centers(d) + mu / d**4
    # remove the rounding residue of the trace
    return lam - lam.mean(axis=1, keepdims=True)


def sample_delta_points(d: int, size: int, rng=None) -> np.ndarray:
    """Points spread over Delta (not uniform), sorted descending.

    Random trace-zero directions scaled to trace norm ``u^(1/(d-1))`` with
    ``u`` uniform, so both the interior and the boundary are exercised.
    """
    rng = as_generator(rng)
    g = rng.standard_normal((size, d))
    g -= g.mean(axis=1, keepdims=True)
    g /= np.abs(g).sum(axis=1, keepdims=True)
    g *= rng.random((size, 1)) ** (1.0 / (d - 1))
    # normalising a near-zero draw amplifies the trace residue; recentre
    g -= g.mean(axis=1, keepdims=True)
    return -np.sort(-g, axis=1)


def volume_ratio_mc(d: int, samples: int, rng=None) -> tuple[float, float]:
    """Fraction of uniform trace-norm-ball draws with ``||X||_op <= 1/d``, with standard error."""
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    x = uniform_ball_samples(d, samples, rng)
    op = np.max(np.abs(np.linalg.eigvalsh(x)), axis=1)
    hits = op <= 1.0 / d + SUM_ATOL
    p = float(hits.mean())
    return p, math.sqrt(max(p * (1 - p), 0.0) / samples)


def simplex_volumes_mc(d: int, samples: int, rng=None) -> dict:
    """Descriptive MC volumes of Delta and Gamma in ``Leb_V`` (meaningful for small ``d``).

    Points of ``V`` are parametrised by their first ``d - 1`` coordinates;
    that map scales volume by ``sqrt(d)``.
    """
    rng = as_generator(rng)
    jac = math.sqrt(d)
    head = rng.uniform(-1.0, 1.0, size=(samples, d - 1))
    lam = np.column_stack([head, -head.sum(axis=1)])
    sorted_ok = np.all(np.diff(lam, axis=1) <= 0, axis=1)
    in_l1 = np.abs(lam).sum(axis=1) <= 1.0
    p_delta = float(np.mean(sorted_ok & in_l1))
    vol_delta = jac * 2.0 ** (d - 1) * p_delta
    head = rng.uniform(-1.0, 1.0, size=(samples, d - 1))
    p_gamma = float(np.mean(np.abs(head.sum(axis=1)) <= 1.0))
    vol_gamma = jac * (2.0 / d**4) ** (d - 1) * p_gamma
    return {"vol_delta": vol_delta, "vol_gamma": vol_gamma, "p_delta": p_delta, "p_gamma": p_gamma}


# ---------------------------------------------------------------------------
# prior ratio


def mu_ratio_extremes(params: HardPriorParams, samples: int, rng=None) -> tuple[float, bool]:
    """Largest ``|log mu(rho) - log mu(rho')|`` over sampled prior pairs, against ``4 d^2``."""
    rng = as_generator(rng)
    d = params.dim
    worst = 0.0
    for _ in range(samples):
        a = hard_prior_sample(params, rng)
        b = hard_prior_sample(params, rng)
        worst = max(worst, abs(prior_log_ratio(a, b, params)))
    return worst, bool(worst <= 4 * d * d)
