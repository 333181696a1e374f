"""Dense Hermitian linear algebra and distances between quantum states.

All matrices are plain ``numpy`` arrays. Real symmetric inputs are accepted
anywhere a Hermitian matrix is expected.

Trace-distance convention: :func:`trace_distance` returns the *unnormalized*
trace norm ``sum |eig(rho - sigma)|``, so orthogonal pure states are at
distance 2, not 1.
"""

from __future__ import annotations

import numpy as np

HERMITIAN_ATOL = 1e-10
STATE_ATOL = 1e-9
NEGATIVE_EIG_CUTOFF = -1e-6
PROB_ATOL = 1e-12


class InvariantError(ValueError):
    """An input violates a structural invariant (Hermiticity, shape, ...)."""


class NotPSDError(InvariantError):
    """Matrix has an eigenvalue clearly below zero."""


class DegenerateError(ValueError):
    """Result would be undefined, e.g. normalising a matrix with no positive part."""


def _as_square(a) -> np.ndarray:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        raise InvariantError(f"expected a square matrix, got shape {a.shape}")
    return a


def is_hermitian(a, atol: float = HERMITIAN_ATOL) -> bool:
    a = np.asarray(a)
    if a.ndim != 2 or a.shape[0] != a.shape[1]:
        return False
    return bool(np.max(np.abs(a - a.conj().T), initial=0.0) <= atol)


def check_hermitian(a, atol: float = HERMITIAN_ATOL) -> np.ndarray:
    a = _as_square(a)
    if not is_hermitian(a, atol):
        err = np.max(np.abs(a - a.conj().T))
        raise InvariantError(f"matrix is not Hermitian (max |A - A^H| = {err:.3e})")
    return a


def check_state(rho, atol: float = STATE_ATOL) -> np.ndarray:
    """Validate a density matrix and return it as an array."""
    rho = check_hermitian(rho)
    tr = np.trace(rho).real
    if abs(tr - 1.0) > atol:
        raise InvariantError(f"trace {tr!r} differs from 1")
    lam_min = np.linalg.eigvalsh(rho)[0]
    if lam_min < -atol:
        raise NotPSDError(f"minimum eigenvalue {lam_min:.3e} is negative")
    return rho


def check_distribution(p) -> np.ndarray:
    p = np.asarray(p, dtype=float)
    if p.ndim != 1:
        raise InvariantError("a distribution must be a 1-d array")
    if np.any(p < 0):
        raise InvariantError("probabilities must be nonnegative")
    if abs(p.sum() - 1.0) > PROB_ATOL:
        raise InvariantError(f"probabilities sum to {p.sum()!r}, not 1")
    return p


def is_orthonormal(basis, atol: float = HERMITIAN_ATOL) -> bool:
    basis = np.asarray(basis)
    gram = basis.conj().T @ basis
    return bool(np.max(np.abs(gram - np.eye(basis.shape[1])), initial=0.0) <= atol)


def projector(basis) -> np.ndarray:
    """Orthogonal projector ``B B^H`` onto the column span of ``basis``."""
    basis = np.asarray(basis)
    return basis @ basis.conj().T


def eig_hermitian(a) -> tuple[np.ndarray, np.ndarray]:
    """Eigendecomposition with eigenvalues sorted in descending order.

    Returns:
        ``(eigenvalues, eigenvectors)`` where column ``k`` of ``eigenvectors``
        belongs to ``eigenvalues[k]``.

    Raises:
        InvariantError: if ``a`` is not Hermitian.
    """
    a = check_hermitian(a)
    w, v = np.linalg.eigh(a)
    return w[::-1], v[:, ::-1]


def _psd_eig(a) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(check_hermitian(a))
    scale = 1.0 + np.linalg.norm(a)
    if w[0] < NEGATIVE_EIG_CUTOFF * scale:
        raise NotPSDError(f"minimum eigenvalue {w[0]:.3e} is below {NEGATIVE_EIG_CUTOFF}")
    return np.clip(w, 0.0, None), v


def sqrt_psd(a) -> np.ndarray:
    """Principal square root of a PSD matrix; tiny negative eigenvalues are zeroed."""
    w, v = _psd_eig(a)
    return (v * np.sqrt(w)) @ v.conj().T


def inv_power_pd(a, power: float) -> np.ndarray:
    """``a ** (-power)`` for a positive definite Hermitian matrix."""
    w, v = np.linalg.eigh(check_hermitian(a))
    if w[0] <= 0:
        raise NotPSDError("matrix is not positive definite")
    return (v * w ** (-power)) @ v.conj().T


def trace_sqrt(a) -> float:
    """``tr sqrt(a)`` for PSD ``a``."""
    w, _ = _psd_eig(a)
    return float(np.sum(np.sqrt(w)))


def _same_dims(rho, sigma) -> tuple[np.ndarray, np.ndarray]:
    rho, sigma = _as_square(rho), _as_square(sigma)
    if rho.shape != sigma.shape:
        raise InvariantError(f"dimension mismatch: {rho.shape} vs {sigma.shape}")
    return rho, sigma


def fidelity(rho, sigma) -> float:
    """Uhlmann fidelity ``tr(sqrt(sqrt(rho) sigma sqrt(rho)))**2``, clipped to [0, 1].

    Computed as the squared nuclear norm of ``sqrt(rho) sqrt(sigma)``, which
    equals the defining expression, is symmetric in its arguments and avoids
    square roots of tiny eigenvalues when a state is rank-deficient.
    """
    rho, sigma = _same_dims(rho, sigma)
    svals = np.linalg.svd(sqrt_psd(rho) @ sqrt_psd(sigma), compute_uv=False)
    f = float(np.sum(svals)) ** 2
    return float(min(max(f, 0.0), 1.0))


def infidelity(rho, sigma) -> float:
    return 1.0 - fidelity(rho, sigma)


def bhattacharyya(p, q) -> float:
    """Classical Bhattacharyya coefficient ``sum sqrt(p_i q_i)``."""
    p, q = check_distribution(p), check_distribution(q)
    if p.shape != q.shape:
        raise InvariantError(f"support sizes differ: {p.size} vs {q.size}")
    return float(min(np.sum(np.sqrt(p * q)), 1.0))


def chi_squared(p_tilde, p) -> float:
    """``sum (p~_i - p_i)**2 / p~_i`` with the perturbed law in the denominator.

    Note the nonstandard orientation: the first argument supplies the
    denominator. Terms with ``p~_i = 0`` and zero numerator contribute nothing.

    Raises:
        DegenerateError: if some ``p~_i = 0`` while ``p_i > 0``.
    """
    p_tilde, p = check_distribution(p_tilde), check_distribution(p)
    if p_tilde.shape != p.shape:
        raise InvariantError(f"support sizes differ: {p_tilde.size} vs {p.size}")
    num = (p_tilde - p) ** 2
    zero = p_tilde == 0
    if np.any(num[zero] > 0):
        raise DegenerateError("p~ vanishes where p has mass")
    return float(np.sum(num[~zero] / p_tilde[~zero]))


def bures_distance(rho, sigma) -> float:
    """Bures metric ``sqrt(2 (1 - sqrt F))``."""
    f = fidelity(rho, sigma)
    return float(np.sqrt(max(2.0 * (1.0 - np.sqrt(f)), 0.0)))


def trace_norm(a) -> float:
    """Sum of singular values (Hermitian input: sum of |eigenvalues|)."""
    return float(np.sum(np.abs(np.linalg.eigvalsh(check_hermitian(a)))))


def trace_distance(rho, sigma) -> float:
    """Unnormalized trace distance ``||rho - sigma||_tr`` (in [0, 2] for states)."""
    rho, sigma = _same_dims(rho, sigma)
    return trace_norm(rho - sigma)


def op_norm(a) -> float:
    """Largest absolute eigenvalue of a Hermitian matrix."""
    return float(np.max(np.abs(np.linalg.eigvalsh(check_hermitian(a)))))


def mix_with_identity(rho, gamma: float) -> np.ndarray:
    """``(1 - gamma) rho + gamma I / d``."""
    if not 0.0 <= gamma <= 1.0:
        raise ValueError(f"gamma must lie in [0, 1], got {gamma}")
    rho = _as_square(rho)
    d = rho.shape[0]
    return (1.0 - gamma) * rho + (gamma / d) * np.eye(d)


def psd_clip_normalize(h) -> np.ndarray:
    """Project a Hermitian matrix to a state: zero negative eigenvalues, rescale to trace 1.

    Raises:
        DegenerateError: if no eigenvalue is positive.
    """
    w, v = np.linalg.eigh(check_hermitian(h))
    w = np.clip(w, 0.0, None)
    total = w.sum()
    if total <= 0:
        raise DegenerateError("matrix has no positive part to normalise")
    out = (v * (w / total)) @ v.conj().T
    return 0.5 * (out + out.conj().T)
