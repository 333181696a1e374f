"""Exact sampling of the uniform rank-1 POVM and its projected variant.

The uniform POVM ``{d |v><v| dv}`` yields an outcome ``v`` whose density
against the Haar measure is ``d <v|rho|v>``. Writing
``rho = sum_i lam_i |u_i><u_i|``, that density is a mixture over ``i`` of
``d |<u_i|v>|^2``. Under that component the overlap ``|<u_i|v>|^2`` is
``Beta(2, d - 1)`` (the size-biased Haar overlap law), the phase is uniform
and the remainder is Haar on the orthogonal complement, so sampling is exact
and rejection-free.

The projected POVM ``{I - P} + {r |v><v| dv on span(P)}`` is sampled by a
Bernoulli draw for the complement outcome followed by the uniform POVM on the
compressed state ``B^H rho B / tr(P rho P)``.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .linalg import InvariantError, check_hermitian
from .seeding import as_generator
from .states import haar_pure


@dataclass(frozen=True)
class MeasurementOutcome:
    """A single POVM outcome; ``vector is None`` marks the complement outcome."""

    vector: np.ndarray | None
    rank: int

    @property
    def is_bottom(self) -> bool:
        return self.vector is None


@dataclass
class Transcript:
    """Ordered outcomes of a sequence of single-copy measurements.

    ``vectors`` has one row per copy (zero rows for complement outcomes),
    ``bottom`` flags complement outcomes and ``ranks`` records the rank of the
    subspace measured on each copy.
    """

    vectors: np.ndarray
    bottom: np.ndarray = field(default=None)
    ranks: np.ndarray = field(default=None)

    def __post_init__(self):
        self.vectors = np.atleast_2d(np.asarray(self.vectors, dtype=complex))
        n, d = self.vectors.shape
        if self.bottom is None:
            self.bottom = np.zeros(n, dtype=bool)
        if self.ranks is None:
            self.ranks = np.full(n, d, dtype=int)
        self.bottom = np.asarray(self.bottom, dtype=bool)
        self.ranks = np.asarray(self.ranks, dtype=int)
        if self.bottom.shape != (n,) or self.ranks.shape != (n,):
            raise InvariantError("transcript fields have inconsistent lengths")

    def __len__(self) -> int:
        return self.vectors.shape[0]

    @property
    def dim(self) -> int:
        return self.vectors.shape[1]

    @property
    def bottom_count(self) -> int:
        return int(self.bottom.sum())

    def __iter__(self):
        for vec, bot, r in zip(self.vectors, self.bottom, self.ranks):
            yield MeasurementOutcome(None if bot else vec, int(r))

    @classmethod
    def empty(cls, d: int) -> "Transcript":
        return cls(np.zeros((0, d), dtype=complex), np.zeros(0, bool), np.zeros(0, int))

    @classmethod
    def concatenate(cls, parts: Iterable["Transcript"]) -> "Transcript":
        parts = list(parts)
        return cls(
            np.concatenate([p.vectors for p in parts]),
            np.concatenate([p.bottom for p in parts]),
            np.concatenate([p.ranks for p in parts]),
        )

    def to_jsonl(self) -> str:
        lines = []
        for vec, bot, r in zip(self.vectors, self.bottom, self.ranks):
            if bot:
                rec = {"kind": "bot", "re": [], "im": [], "r": int(r)}
            else:
                rec = {"kind": "vec", "re": vec.real.tolist(), "im": vec.imag.tolist(), "r": int(r)}
            lines.append(json.dumps(rec))
        return "\n".join(lines) + ("\n" if lines else "")

    @classmethod
    def from_jsonl(cls, text: str, d: int | None = None) -> "Transcript":
        recs = [json.loads(line) for line in text.splitlines() if line.strip()]
        if d is None:
            dims = {len(r["re"]) for r in recs if r["kind"] == "vec"}
            if len(dims) != 1:
                raise InvariantError("cannot infer dimension from transcript")
            d = dims.pop()
        vecs = np.zeros((len(recs), d), dtype=complex)
        bottom = np.zeros(len(recs), dtype=bool)
        ranks = np.zeros(len(recs), dtype=int)
        for i, rec in enumerate(recs):
            ranks[i] = rec["r"]
            if rec["kind"] == "bot":
                bottom[i] = True
            elif rec["kind"] == "vec":
                vecs[i] = np.asarray(rec["re"]) + 1j * np.asarray(rec["im"])
            else:
                raise InvariantError(f"unknown outcome kind {rec['kind']!r}")
        return cls(vecs, bottom, ranks)


def _clipped_spectrum(rho) -> tuple[np.ndarray, np.ndarray]:
    w, v = np.linalg.eigh(check_hermitian(rho))
    w = np.clip(w, 0.0, None)
    total = w.sum()
    if total <= 0:
        raise InvariantError("state has no positive part")
    return w / total, v


def uniform_povm_vectors(rho, n: int, rng=None) -> np.ndarray:
    """Draw ``n`` uniform-POVM outcomes for ``rho``; returns shape ``(n, d)``."""
    rng = as_generator(rng)
    w, v = _clipped_spectrum(rho)
    d = w.size
    idx = rng.choice(d, size=n, p=w)
    u = v[:, idx].T
    phase = np.exp(2j * np.pi * rng.random(n))[:, None]
    if d == 1:
        return phase * u
    overlap = rng.beta(2.0, d - 1.0, size=n)[:, None]
    z = rng.standard_normal((n, d)) + 1j * rng.standard_normal((n, d))
    z -= u * np.sum(u.conj() * z, axis=1, keepdims=True)
    z /= np.linalg.norm(z, axis=1, keepdims=True)
    out = np.sqrt(overlap) * phase * u + np.sqrt(1.0 - overlap) * z
    return out / np.linalg.norm(out, axis=1, keepdims=True)


def sample_uniform_povm(rho, rng=None) -> MeasurementOutcome:
    vec = uniform_povm_vectors(rho, 1, rng)[0]
    return MeasurementOutcome(vec, vec.size)


def rejection_uniform_povm_vectors(rho, n: int, rng=None) -> np.ndarray:
    """Reference sampler: Haar proposals accepted with probability ``<v|rho|v> / lam_max``."""
    rng = as_generator(rng)
    w, v = _clipped_spectrum(rho)
    rho = (v * w) @ v.conj().T
    lam_max = w.max()
    d = w.size
    out = []
    count = 0
    while count < n:
        prop = haar_pure(d, rng, size=max(2 * (n - count), 16))
        dens = np.real(np.einsum("ni,ij,nj->n", prop.conj(), rho, prop))
        keep = prop[rng.random(prop.shape[0]) * lam_max < dens]
        out.append(keep)
        count += keep.shape[0]
    return np.concatenate(out)[:n]


def projected_povm_transcript(rho, basis, n: int, rng=None) -> Transcript:
    """Measure ``n`` copies of ``rho`` with the POVM projected onto ``span(basis)``."""
    rng = as_generator(rng)
    rho = check_hermitian(rho)
    basis = np.asarray(basis, dtype=complex)
    if basis.ndim != 2 or basis.shape[0] != rho.shape[0]:
        raise InvariantError("basis ambient dimension does not match the state")
    d, r = basis.shape
    if r == 0:
        raise InvariantError("cannot measure on a rank-0 subspace")
    compressed = basis.conj().T @ rho @ basis
    alpha = float(np.clip(np.trace(compressed).real, 0.0, 1.0))
    inside = rng.random(n) < alpha
    k = int(inside.sum())
    vectors = np.zeros((n, d), dtype=complex)
    if k:
        ys = uniform_povm_vectors(compressed / alpha, k, rng)
        vectors[inside] = ys @ basis.T
    return Transcript(vectors, ~inside, np.full(n, r, dtype=int))


def sample_projected_povm(rho, basis, rng=None) -> MeasurementOutcome:
    t = projected_povm_transcript(rho, basis, 1, rng)
    return next(iter(t))


def uniform_povm_transcript(rho, n: int, rng=None) -> Transcript:
    vecs = uniform_povm_vectors(rho, n, rng)
    return Transcript(vecs)


def exact_pure_moment(d: int, k: int) -> float:
    """``E[(d+1)^k |<u|v>|^{2k}]`` when measuring ``|u><u|`` itself.

    Equals ``(d+1)^k d (k+1)! (d-1)! / (k+d)!``.
    """
    log = (
        k * math.log(d + 1)
        + math.log(d)
        + math.lgamma(k + 2)
        + math.lgamma(d)
        - math.lgamma(k + d + 1)
    )
    return math.exp(log)


def moment_bound(k: int) -> float:
    return float((k + 1) ** (k + 1))


def moment_check(k: int, rho, u, samples: int, rng=None) -> tuple[float, float]:
    """Monte-Carlo estimate of ``E[(d+1)^k |<u|v>|^{2k}]`` with its standard error."""
    if not 1 <= k <= 8:
        raise ValueError("k must lie in 1..8")
    if samples < 1000:
        raise ValueError("need at least 1000 samples")
    u = np.asarray(u, dtype=complex)
    u = u / np.linalg.norm(u)
    d = u.size
    vecs = uniform_povm_vectors(rho, samples, rng)
    ov = np.abs(vecs @ u.conj()) ** 2
    vals = (d + 1) ** k * ov**k
    return float(vals.mean()), float(vals.std(ddof=1) / math.sqrt(samples))
