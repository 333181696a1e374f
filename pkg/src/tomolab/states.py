"""Random test states and the Gaussian hard prior around the maximally mixed state."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import InvariantError, check_distribution, op_norm
from .seeding import as_generator

MAX_REJECTIONS = 10**6


@dataclass(frozen=True)
class HardPriorParams:
    """Parameters of the prior ``rho = (I + sigma G) / d`` with ``G`` a conditioned GOE*."""

    dim: int
    prior_sigma: float = 0.01
    op_cutoff: float = 4.0
    good_cutoff: float = 3.0

    def __post_init__(self):
        if self.dim < 2:
            raise ValueError("hard prior needs dim >= 2")
        if not 0 < self.good_cutoff < self.op_cutoff:
            raise ValueError("need 0 < good_cutoff < op_cutoff")
        if self.prior_sigma <= 0:
            raise ValueError("prior_sigma must be positive")


def haar_pure(d: int, rng=None, size: int | None = None) -> np.ndarray:
    """Haar-random unit vector(s) in ``C^d``.

    With ``size`` given, returns an array of shape ``(size, d)``.
    """
    if d < 1:
        raise ValueError("dimension must be at least 1")
    rng = as_generator(rng)
    shape = (d,) if size is None else (size, d)
    z = rng.standard_normal(shape) + 1j * rng.standard_normal(shape)
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


def haar_unitary(d: int, rng=None) -> np.ndarray:
    """Haar-random ``d x d`` unitary via phase-corrected QR."""
    rng = as_generator(rng)
    z = (rng.standard_normal((d, d)) + 1j * rng.standard_normal((d, d))) / np.sqrt(2)
    q, r = np.linalg.qr(z)
    ph = np.diag(r) / np.abs(np.diag(r))
    return q * ph


def haar_orthogonal(d: int, rng=None, size: int | None = None) -> np.ndarray:
    """Haar-random real orthogonal matrices, shape ``(size, d, d)`` if ``size`` is set."""
    rng = as_generator(rng)
    shape = (d, d) if size is None else (size, d, d)
    q, r = np.linalg.qr(rng.standard_normal(shape))
    signs = np.sign(np.diagonal(r, axis1=-2, axis2=-1))
    signs[signs == 0] = 1.0
    return q * signs[..., None, :]


def random_state(d: int, spectrum, rng=None) -> np.ndarray:
    """``U diag(spectrum) U^H`` for Haar ``U``; short spectra are zero-padded."""
    spectrum = np.asarray(spectrum, dtype=float)
    if spectrum.size > d:
        raise InvariantError(f"spectrum has {spectrum.size} entries for dimension {d}")
    spectrum = check_distribution(np.concatenate([spectrum, np.zeros(d - spectrum.size)]))
    u = haar_unitary(d, rng)
    rho = (u * spectrum) @ u.conj().T
    return 0.5 * (rho + rho.conj().T)


def goe_sample(d: int, rng=None) -> np.ndarray:
    """GOE(d): symmetric, diagonal variance 2/d, off-diagonal variance 1/d."""
    rng = as_generator(rng)
    a = rng.standard_normal((d, d)) / np.sqrt(d)
    return (a + a.T) / np.sqrt(2)


def goe_star_sample(d: int, rng=None) -> np.ndarray:
    """Trace-centered GOE: ``G - (tr G / d) I``."""
    if d < 2:
        raise ValueError("GOE* needs d >= 2")
    g = goe_sample(d, rng)
    g -= (np.trace(g) / d) * np.eye(d)
    return g


def hard_prior_sample(params: HardPriorParams, rng=None) -> np.ndarray:
    """Draw ``(I + sigma G) / d`` with ``G ~ GOE*`` conditioned on ``||G||_op <= op_cutoff``."""
    rng = as_generator(rng)
    d = params.dim
    for _ in range(MAX_REJECTIONS):
        g = goe_star_sample(d, rng)
        if op_norm(g) <= params.op_cutoff:
            return (np.eye(d) + params.prior_sigma * g) / d
    raise RuntimeError("hard prior rejection sampler exhausted its budget")


def deviation_from_mixed(rho) -> float:
    """``|| rho - I/d ||_op``."""
    rho = np.asarray(rho)
    return op_norm(rho - np.eye(rho.shape[0]) / rho.shape[0])


def is_good(rho, params: HardPriorParams, cutoff: float | None = None) -> bool:
    """Membership in the good set ``||rho - I/d||_op <= good_cutoff * sigma / d``."""
    c = params.good_cutoff if cutoff is None else cutoff
    d = np.asarray(rho).shape[0]
    return deviation_from_mixed(rho) <= c * params.prior_sigma / d


def in_support(rho, params: HardPriorParams) -> bool:
    return is_good(rho, params, cutoff=params.op_cutoff)


def prior_log_density(rho, params: HardPriorParams) -> float:
    """Unnormalized log prior: ``-(d^3 / (4 sigma^2)) ||rho - I/d||_F^2``."""
    rho = np.asarray(rho)
    d = rho.shape[0]
    dev = rho - np.eye(d) / d
    return float(-(d**3) / (4 * params.prior_sigma**2) * np.sum(np.abs(dev) ** 2))


def prior_log_ratio(rho, rho_prime, params: HardPriorParams) -> float:
    """``log mu(rho) - log mu(rho')`` for two states in the prior's support."""
    return prior_log_density(rho, params) - prior_log_density(rho_prime, params)
