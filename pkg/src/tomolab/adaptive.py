"""Multi-round adaptive tomography in fidelity.

Round ``j`` measures fresh copies with the uniform POVM projected onto the
still-unresolved subspace ``Gamma_j``, forms the projected estimate
``sigma_j``, and peels off the eigenvectors of ``sigma_j`` whose eigenvalue is
at least ``2**-j``. Those vectors span the band ``Pi_j``; the rest of
``Gamma_j`` becomes ``Gamma_{j+1}``. The output is the block-diagonal matrix
``sum_j Pi_j sigma_j Pi_j`` projected onto the state space.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .estimators import h_n_projected
from .linalg import check_state, mix_with_identity, op_norm, psd_clip_normalize
from .measurement import Transcript, projected_povm_transcript
from .seeding import as_generator
from .serialize import basis_to_list, matrix_to_dict

MIN_ROUNDS = 5
DIAG_ATOL = 1e-9


class BudgetExhausted(RuntimeError):
    pass


class MeasurementOracle:
    """Source of projected-POVM outcomes for an unknown state, with a copy budget."""

    def __init__(self, dim: int, budget: int):
        self.dim = dim
        self.budget = budget
        self.consumed = 0

    def _draw(self, basis: np.ndarray, copies: int) -> Transcript:
        raise NotImplementedError

    def measure(self, basis, copies: int) -> Transcript:
        basis = np.asarray(basis, dtype=complex)
        if basis.shape[0] != self.dim:
            raise ValueError(f"basis has ambient dimension {basis.shape[0]}, oracle has {self.dim}")
        if self.consumed + copies > self.budget:
            raise BudgetExhausted(f"requested {copies} copies with {self.budget - self.consumed} left")
        self.consumed += copies
        if basis.shape[1] == 0:
            # nothing left to resolve: every copy lands on the complement outcome
            return Transcript(
                np.zeros((copies, self.dim), dtype=complex),
                np.ones(copies, dtype=bool),
                np.zeros(copies, dtype=int),
            )
        return self._draw(basis, copies)


class SimulatedOracle(MeasurementOracle):
    """Oracle backed by a known state; every call uses the same random stream."""

    def __init__(self, rho, budget: int, rng=None, record: bool = False):
        rho = check_state(rho)
        super().__init__(rho.shape[0], budget)
        self._rho = rho
        self._rng = as_generator(rng)
        self.history: list[Transcript] | None = [] if record else None

    def _draw(self, basis, copies):
        t = projected_povm_transcript(self._rho, basis, copies, self._rng)
        if self.history is not None:
            self.history.append(t)
        return t


def round_count(r: int, gamma: float) -> int:
    """Number of rounds: ``ceil(log2(r / gamma)) + 4``, never fewer than 5."""
    if r < 1:
        raise ValueError("rank must be at least 1")
    if not 0 < gamma < 1:
        raise ValueError(f"target infidelity must lie in (0, 1), got {gamma}")
    return max(math.ceil(math.log2(r / gamma)) + 4, MIN_ROUNDS)


@dataclass
class BandDecomposition:
    """Per-round output of the adaptive algorithm.

    ``bases[j]`` spans band ``j + 1`` (possibly zero columns), ``blocks[j]``
    is ``sigma_j`` compressed to that band, ``sigmas[j]`` is the full
    ``d x d`` projected estimate, ``round_bases[j]`` spans ``Gamma_{j+1}``
    (the subspace measured in that round) and ``residual`` spans what was
    never resolved.
    """

    thresholds: list[float]
    bases: list[np.ndarray]
    blocks: list[np.ndarray]
    sigmas: list[np.ndarray]
    round_bases: list[np.ndarray]
    residual: np.ndarray

    @property
    def rounds(self) -> int:
        return len(self.thresholds)

    @property
    def dim(self) -> int:
        return self.residual.shape[0]

    def ranks(self) -> list[int]:
        return [b.shape[1] for b in self.bases]

    def sigma_hat(self) -> np.ndarray:
        d = self.dim
        out = np.zeros((d, d), dtype=complex)
        for b, blk in zip(self.bases, self.blocks):
            if b.shape[1]:
                out += b @ blk @ b.conj().T
        return 0.5 * (out + out.conj().T)

    def resolution_of_identity(self) -> np.ndarray:
        total = sum(b @ b.conj().T for b in self.bases)
        return total + self.residual @ self.residual.conj().T

    def to_dict(self) -> dict:
        return {
            "rounds": self.rounds,
            "thresholds": self.thresholds,
            "bases": [basis_to_list(b) for b in self.bases],
            "blocks": [matrix_to_dict(b) if b.size else None for b in self.blocks],
            "residual": basis_to_list(self.residual),
        }


@dataclass
class AdaptiveEstimate:
    state: np.ndarray
    decomposition: BandDecomposition
    copies_per_round: int
    copies_discarded: int
    rank_hint: int
    gamma: float
    mixed: bool = False

    def to_dict(self) -> dict:
        out = {
            "state": matrix_to_dict(self.state),
            "decomposition": self.decomposition.to_dict(),
            "copies_per_round": self.copies_per_round,
            "copies_discarded": self.copies_discarded,
            "rank_hint": self.rank_hint,
            "gamma": self.gamma,
            "mixed": self.mixed,
        }
        return out


def _split_band(sigma: np.ndarray, basis: np.ndarray, threshold: float):
    """Split ``span(basis)`` by the eigenvalues of ``sigma`` compressed to it."""
    compressed = basis.conj().T @ sigma @ basis
    compressed = 0.5 * (compressed + compressed.conj().T)
    w, v = np.linalg.eigh(compressed)
    keep = w >= threshold
    band = basis @ v[:, keep]
    rest = basis @ v[:, ~keep]
    return band, np.diag(w[keep]).astype(complex), rest


def run_adaptive(
    oracle: MeasurementOracle,
    d: int,
    r: int,
    gamma: float,
    delta: float,
    n: int,
    mix: bool = False,
) -> AdaptiveEstimate:
    """Run the band-peeling algorithm with a total budget of ``n`` copies.

    Each of the ``t = round_count(r, gamma)`` rounds uses ``n // t`` copies;
    the remainder is left unused. ``delta`` only enters the analysis, not the
    procedure, and is accepted for interface symmetry with the baseline.

    Raises:
        ValueError: for inconsistent dimensions or ``n < t``.
        BudgetExhausted: if the oracle cannot supply the copies.
    """
    if oracle.dim != d:
        raise ValueError(f"oracle dimension {oracle.dim} does not match d={d}")
    if not 1 <= r <= d:
        raise ValueError(f"rank hint {r} outside 1..{d}")
    if not 0 < delta < 1:
        raise ValueError("delta must lie in (0, 1)")
    t = round_count(r, gamma)
    per_round = n // t
    if per_round < 1:
        raise ValueError(f"need at least {t} copies for {t} rounds, got {n}")

    current = np.eye(d, dtype=complex)
    thresholds, bases, blocks, sigmas, round_bases = [], [], [], [], []
    for j in range(1, t + 1):
        threshold = 2.0**-j
        transcript = oracle.measure(current, per_round)
        round_bases.append(current)
        if current.shape[1]:
            sigma = h_n_projected(transcript, current).estimate
            band, block, rest = _split_band(sigma, current, threshold)
        else:
            sigma = np.zeros((d, d), dtype=complex)
            band, block, rest = current, np.zeros((0, 0), dtype=complex), current
        thresholds.append(threshold)
        bases.append(band)
        blocks.append(block)
        sigmas.append(sigma)
        current = rest

    decomp = BandDecomposition(thresholds, bases, blocks, sigmas, round_bases, current)
    state = assemble_estimate(decomp)
    if mix:
        state = mix_with_identity(state, gamma)
    return AdaptiveEstimate(state, decomp, per_round, n - t * per_round, r, gamma, mix)


def assemble_estimate(decomposition: BandDecomposition) -> np.ndarray:
    """``sigma_hat / tr(sigma_hat)`` after clipping negative eigenvalues."""
    return psd_clip_normalize(decomposition.sigma_hat())


def nonadaptive_baseline(oracle: MeasurementOracle, d: int, n: int, delta: float = 0.05) -> np.ndarray:
    """Full-space linear inversion from ``n`` uniform-POVM copies, projected to a state."""
    if n < 1:
        raise ValueError("n must be positive")
    if oracle.dim != d:
        raise ValueError(f"oracle dimension {oracle.dim} does not match d={d}")
    basis = np.eye(d, dtype=complex)
    transcript = oracle.measure(basis, n)
    return psd_clip_normalize(h_n_projected(transcript, basis).estimate)


@dataclass
class RoundDiagnostics:
    j: int
    rank: int
    gamma_norm: float          # ||Gamma_j rho Gamma_j||_op
    sigma_norm: float          # ||sigma_j||_op
    band_min_eig: float        # lambda_min(B_j^H rho B_j); +inf for an empty band
    estimation_error: float    # ||sigma_j - Gamma_j rho Gamma_j||_op
    alpha: float               # tr(Pi_j rho Pi_j)
    subspace_mass: float       # tr(Gamma_j rho Gamma_j)
    eps_ratio: float           # estimation_error * 2**((j + t) / 2)
    check_gamma_norm: bool
    check_sigma_norm: bool
    check_band_min_eig: bool
    check_rank: bool


@dataclass
class DiagnosticsReport:
    rounds: list[RoundDiagnostics] = field(default_factory=list)
    residual_mass: float = 0.0
    check_residual: bool = True

    @property
    def projected_norm_ok(self) -> bool:
        return self.check_residual and all(
            rd.check_gamma_norm and rd.check_sigma_norm and rd.check_band_min_eig for rd in self.rounds
        )

    @property
    def rank_ok(self) -> bool:
        return all(rd.check_rank for rd in self.rounds)

    @property
    def passed(self) -> bool:
        return self.projected_norm_ok and self.rank_ok

    def failures(self) -> list[str]:
        out = []
        for rd in self.rounds:
            for name in ("check_gamma_norm", "check_sigma_norm", "check_band_min_eig", "check_rank"):
                if not getattr(rd, name):
                    out.append(f"round {rd.j}: {name}")
        if not self.check_residual:
            out.append("residual mass")
        return out


def diagnostics_check(rho_true, est: AdaptiveEstimate, true_rank: int | None = None) -> DiagnosticsReport:
    """Compare a run against the known state (simulation only).

    Per round ``j`` (1-based): ``||Gamma_j rho Gamma_j||_op <= 2**-(j-1)``,
    ``||sigma_j||_op <= 2**-(j-2)``, ``lambda_min(B_j^H rho B_j) >= 2**-(j+1)``,
    ``rank(Pi_j) <= r``; and ``tr(Gamma_{t+1} rho Gamma_{t+1}) <= gamma / 2``.
    Comparisons carry an absolute slack of ``1e-9`` for rounding.
    """
    rho = np.asarray(rho_true)
    dec = est.decomposition
    t = dec.rounds
    r = est.rank_hint if true_rank is None else true_rank
    report = DiagnosticsReport()
    for j in range(1, t + 1):
        c = dec.round_bases[j - 1]
        b = dec.bases[j - 1]
        sigma = dec.sigmas[j - 1]
        if c.shape[1]:
            proj = c @ c.conj().T
            compressed = proj @ rho @ proj
            gamma_norm = op_norm(0.5 * (compressed + compressed.conj().T))
            mass = float(np.trace(compressed).real)
        else:
            compressed = np.zeros_like(rho)
            gamma_norm, mass = 0.0, 0.0
        err = op_norm(sigma - compressed)
        if b.shape[1]:
            band = b.conj().T @ rho @ b
            band_min = float(np.linalg.eigvalsh(0.5 * (band + band.conj().T))[0])
            alpha = float(np.trace(band).real)
        else:
            band_min, alpha = math.inf, 0.0
        report.rounds.append(
            RoundDiagnostics(
                j=j,
                rank=b.shape[1],
                gamma_norm=gamma_norm,
                sigma_norm=op_norm(sigma),
                band_min_eig=band_min,
                estimation_error=err,
                alpha=alpha,
                subspace_mass=mass,
                eps_ratio=err * 2.0 ** ((j + t) / 2),
                check_gamma_norm=gamma_norm <= 2.0 ** -(j - 1) + DIAG_ATOL,
                check_sigma_norm=op_norm(sigma) <= 2.0 ** -(j - 2) + DIAG_ATOL,
                check_band_min_eig=band_min >= 2.0 ** -(j + 1) - DIAG_ATOL,
                check_rank=b.shape[1] <= r,
            )
        )
    res = dec.residual
    report.residual_mass = float(np.real(np.trace(res.conj().T @ rho @ res))) if res.shape[1] else 0.0
    report.check_residual = report.residual_mass <= est.gamma / 2 + DIAG_ATOL
    return report
