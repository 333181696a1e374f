"""Numerical certificates for two matrix inequalities used in the fidelity analysis.

* :func:`hessian_lower_bound_check` compares the second directional
  derivative of ``f(X) = tr sqrt(X)`` with ``-1/4 tr(B A^{-3/2} B)``.
* :func:`off_diag_certificate` builds the explicit PSD lower bound ``B`` for
  ``A_diag^{1/2} A A_diag^{1/2}`` and checks ``B^2`` against it.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .linalg import check_hermitian, inv_power_pd, sqrt_psd, trace_sqrt

MAX_SERIES_TERMS = 10**4
SERIES_TOL = 1e-14
PRECONDITION_ATOL = 1e-12


class PreconditionError(ValueError):
    pass


class SeriesDivergence(RuntimeError):
    pass


def _tr_sqrt_pd(x: np.ndarray) -> float:
    return float(np.sum(np.sqrt(np.linalg.eigvalsh(0.5 * (x + x.conj().T)))))


def hessian_quadratic_form(a, b) -> float:
    """Exact ``d^2/dh^2 tr sqrt(A + hB)`` at ``h = 0`` via divided differences.

    In the eigenbasis of ``A`` (eigenvalues ``a_i``) with ``B~ = V^H B V`` the
    value is ``-sum_ij |B~_ij|^2 / (2 sqrt(a_i a_j) (sqrt(a_i) + sqrt(a_j)))``.
    """
    w, v = np.linalg.eigh(check_hermitian(a))
    if w[0] <= 0:
        raise PreconditionError("A must be positive definite")
    bt = v.conj().T @ np.asarray(b) @ v
    s = np.sqrt(w)
    kernel = 1.0 / (2.0 * np.outer(s, s) * (s[:, None] + s[None, :]))
    return float(-np.sum(np.abs(bt) ** 2 * kernel))


@dataclass
class HessianCheck:
    lhs: float
    rhs: float
    passed: bool


def hessian_lower_bound_check(a, b, h: float = 1e-3) -> HessianCheck:
    """Central second difference of ``tr sqrt`` along ``B`` against ``-1/4 tr(B A^{-3/2} B)``.

    Passes when ``lhs >= rhs - 1e-4 (1 + ||B||_F^2)``.

    Raises:
        PreconditionError: if ``h`` is outside ``[1e-5, 1e-3]`` or
            ``lambda_min(A) < 10 h``.
    """
    a = check_hermitian(a)
    b = check_hermitian(b)
    if not 1e-5 <= h <= 1e-3:
        raise PreconditionError(f"step {h} outside [1e-5, 1e-3]")
    lam_min = np.linalg.eigvalsh(a)[0]
    if lam_min < 10 * h:
        raise PreconditionError(f"lambda_min(A) = {lam_min:.3e} is below 10 h")
    bn = np.linalg.norm(b)
    lhs = (_tr_sqrt_pd(a + h * b) - 2.0 * _tr_sqrt_pd(a) + _tr_sqrt_pd(a - h * b)) / h**2
    rhs = -0.25 * float(np.trace(b @ inv_power_pd(a, 1.5) @ b).real)
    tol = 1e-4 * (1.0 + bn**2)
    return HessianCheck(float(lhs), rhs, bool(lhs >= rhs - tol))


@dataclass
class SqrtCertificate:
    min_eig_gap: float
    trace_gap: float
    converged: bool
    sylvester_residual: float
    terms: int
    x: np.ndarray


def _check_block_bounds(m, lo, hi, name):
    w = np.linalg.eigvalsh(m)
    if w[0] < lo - PRECONDITION_ATOL or w[-1] > hi + PRECONDITION_ATOL:
        raise PreconditionError(f"spectrum of {name} [{w[0]:.4g}, {w[-1]:.4g}] not within [{lo:.4g}, {hi:.4g}]")


def off_diag_certificate(m, n, e, c1: float, c2: float) -> SqrtCertificate:
    """Certificate that ``tr sqrt(A_diag^{1/2} A A_diag^{1/2}) >= tr A - c2 (d1 + d2)``.

    ``A = [[M, E], [E^H, N]]``. The candidate lower bound is
    ``B = [[M - c2 I, X], [X^H, N - c2 I]]`` where ``X`` solves the Sylvester
    equation ``(M - c2) X + X (N - c2) = M^{1/2} E N^{1/2}``, expanded as the
    Neumann series ``X = sum_{i>=1} P^{-i} S (-R)^{i-1}`` with
    ``P = M + (c1 - c2) I``, ``R = N - (c1 + c2) I`` and ``S = M^{1/2} E N^{1/2}``.
    The series is truncated once a term's operator norm drops below ``1e-14``.

    Returns:
        A :class:`SqrtCertificate` with ``min_eig_gap`` =
        ``lambda_min(A_diag^{1/2} A A_diag^{1/2} - B^2)`` and ``trace_gap`` =
        ``tr sqrt(A_diag^{1/2} A A_diag^{1/2}) - (tr A - c2 (d1 + d2))``.
    """
    m = check_hermitian(np.asarray(m, dtype=complex))
    n = check_hermitian(np.asarray(n, dtype=complex))
    e = np.asarray(e, dtype=complex)
    d1, d2 = m.shape[0], n.shape[0]
    if e.shape != (d1, d2):
        raise PreconditionError(f"E has shape {e.shape}, expected {(d1, d2)}")
    if not (0 < c2 <= c1 / 10 and c1 < 1):
        raise PreconditionError("need 0 < c2 <= c1 / 10 and c1 < 1")
    _check_block_bounds(m, c1, 4 * c1, "M")
    _check_block_bounds(n, c2, 2 * c1, "N")
    if np.linalg.norm(e, 2) > np.sqrt(c1 * c2) + PRECONDITION_ATOL:
        raise PreconditionError("||E||_op exceeds sqrt(c1 c2)")
    a = np.block([[m, e], [e.conj().T, n]])
    if np.linalg.eigvalsh(a)[0] < -PRECONDITION_ATOL:
        raise PreconditionError("A is not PSD")

    m_half, n_half = sqrt_psd(m), sqrt_psd(n)
    s = m_half @ e @ n_half
    p_inv = np.linalg.inv(m + (c1 - c2) * np.eye(d1))
    neg_r = (c1 + c2) * np.eye(d2) - n
    term = p_inv @ s
    x = np.zeros_like(s)
    converged = False
    terms = 0
    for terms in range(1, MAX_SERIES_TERMS + 1):
        x += term
        term = p_inv @ term @ neg_r
        if np.linalg.norm(term, 2) < SERIES_TOL:
            converged = True
            break
    if not converged:
        raise SeriesDivergence(f"series did not converge in {MAX_SERIES_TERMS} terms")

    m_c2 = m - c2 * np.eye(d1)
    n_c2 = n - c2 * np.eye(d2)
    residual = float(np.linalg.norm(m_c2 @ x + x @ n_c2 - s, 2))

    bmat = np.block([[m_c2, x], [x.conj().T, n_c2]])
    a_diag_half = np.block([[m_half, np.zeros((d1, d2))], [np.zeros((d2, d1)), n_half]])
    k = a_diag_half @ a @ a_diag_half
    k = 0.5 * (k + k.conj().T)
    gap = k - bmat @ bmat
    min_gap = float(np.linalg.eigvalsh(0.5 * (gap + gap.conj().T))[0])
    trace_gap = trace_sqrt(k) - (float(np.trace(a).real) - c2 * (d1 + d2))
    return SqrtCertificate(min_gap, trace_gap, converged, residual, terms, x)
