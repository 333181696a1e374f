"""Linear-inversion estimators built from uniform-POVM outcomes, and their predicted error rates."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import InvariantError
from .measurement import Transcript


@dataclass
class EstimatorReport:
    estimate: np.ndarray
    copies_used: int
    subspace_rank: int
    bottom_count: int = 0
    predicted_bound: float | None = None

    def to_dict(self) -> dict:
        from .serialize import matrix_to_dict

        out = matrix_to_dict(self.estimate)
        out.update(
            copies_used=self.copies_used,
            subspace_rank=self.subspace_rank,
            bottom_count=self.bottom_count,
            predicted_bound=self.predicted_bound,
        )
        return out


def _outer_sum(vectors: np.ndarray) -> np.ndarray:
    # sum_i |v_i><v_i|
    return vectors.T @ vectors.conj()


def h_n(outcomes, d: int | None = None) -> EstimatorReport:
    """``(1/n) sum_i ((d+1)|v_i><v_i| - I)`` over uniform-POVM outcomes.

    ``outcomes`` may be a :class:`Transcript` or an ``(n, d)`` array of vectors.
    """
    if not isinstance(outcomes, Transcript):
        outcomes = Transcript(outcomes)
    n = len(outcomes)
    if n == 0:
        raise InvariantError("empty transcript")
    if outcomes.bottom.any():
        raise InvariantError("uniform-POVM estimator received a complement outcome")
    d = outcomes.dim if d is None else d
    if outcomes.dim != d:
        raise InvariantError(f"outcomes have dimension {outcomes.dim}, expected {d}")
    est = (d + 1) / n * _outer_sum(outcomes.vectors) - np.eye(d)
    est = 0.5 * (est + est.conj().T)
    return EstimatorReport(est, n, d, 0)


def h_n_projected(outcomes: Transcript, basis, normalize_by: str = "total") -> EstimatorReport:
    """Projected estimator averaging ``(r+1)|v_i><v_i| - P`` over non-complement outcomes.

    Args:
        outcomes: transcript measured against ``basis``.
        basis: ``d x r`` matrix with orthonormal columns spanning ``P``.
        normalize_by: ``"total"`` divides by all ``n`` copies (complement
            outcomes count as zero terms); ``"kept"`` divides by the number
            of non-complement outcomes instead.
    """
    basis = np.asarray(basis, dtype=complex)
    n = len(outcomes)
    if n == 0:
        raise InvariantError("empty transcript")
    d, r = basis.shape
    if outcomes.dim != d:
        raise InvariantError("transcript and basis dimensions differ")
    kept = outcomes.vectors[~outcomes.bottom]
    k = kept.shape[0]
    if normalize_by == "total":
        denom = n
    elif normalize_by == "kept":
        denom = max(k, 1)
    else:
        raise ValueError(f"unknown normalisation {normalize_by!r}")
    proj = basis @ basis.conj().T
    if k == 0:
        est = np.zeros((d, d), dtype=complex)
    else:
        est = ((r + 1) * _outer_sum(kept) - k * proj) / denom
        est = 0.5 * (est + est.conj().T)
    return EstimatorReport(est, n, r, n - k)


def _check_delta(delta: float) -> float:
    if not 0 < delta < 1:
        raise ValueError(f"delta must lie in (0, 1), got {delta}")
    return math.log(1.0 / delta)


def predicted_error_bound(d: int, n: int, delta: float, c: float = 1.0) -> float:
    """``C max(x, sqrt(x))`` with ``x = (d + log 1/delta) / n``."""
    if n < 1:
        raise ValueError("n must be positive")
    x = (d + _check_delta(delta)) / n
    return c * max(x, math.sqrt(x))


def predicted_projected_bound(alpha: float, d: int, n: int, delta: float, c: float = 1.0) -> float:
    """``C max(x, sqrt(alpha x))``, the subspace-weighted version of the bound above."""
    if not 0.0 <= alpha <= 1.0:
        raise ValueError(f"alpha must lie in [0, 1], got {alpha}")
    if n < 1:
        raise ValueError("n must be positive")
    x = (d + _check_delta(delta)) / n
    return c * max(x, math.sqrt(alpha * x))
