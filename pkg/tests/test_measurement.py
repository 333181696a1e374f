import math

import numpy as np
import pytest
from scipy import stats

from tomolab.linalg import InvariantError
from tomolab.measurement import (
    Transcript,
    exact_pure_moment,
    moment_bound,
    moment_check,
    projected_povm_transcript,
    rejection_uniform_povm_vectors,
    sample_projected_povm,
    sample_uniform_povm,
    uniform_povm_vectors,
)
from tomolab.states import haar_pure, random_state


def _overlaps(vecs, u):
    return np.abs(vecs @ u.conj()) ** 2


def test_maximally_mixed_gives_haar_overlap(rng):
    d, n = 4, 100_000
    u = haar_pure(d, rng)
    ov = _overlaps(uniform_povm_vectors(np.eye(d) / d, n, rng), u)
    assert abs(ov.mean() - 1 / d) <= 4 * ov.std() / math.sqrt(n)


def test_pure_state_overlap_mean(rng):
    d, n = 4, 100_000
    u = haar_pure(d, rng)
    ov = _overlaps(uniform_povm_vectors(np.outer(u, u.conj()), n, rng), u)
    assert abs(ov.mean() - 2 / (d + 1)) <= 4 * ov.std() / math.sqrt(n)


def test_exact_sampler_matches_rejection_oracle(rng):
    d = 4
    rho = random_state(d, [0.5, 0.25, 0.125, 0.125], rng)
    u = haar_pure(d, rng)
    a = _overlaps(uniform_povm_vectors(rho, 20_000, rng), u)
    b = _overlaps(rejection_uniform_povm_vectors(rho, 20_000, rng), u)
    assert stats.ks_2samp(a, b).pvalue > 0.001


def test_outcomes_are_unit_vectors(rng):
    vecs = uniform_povm_vectors(np.eye(3) / 3, 100, rng)
    np.testing.assert_allclose(np.linalg.norm(vecs, axis=1), 1.0, atol=1e-12)
    out = sample_uniform_povm(np.eye(3) / 3, rng)
    assert out.rank == 3 and not out.is_bottom


def test_projected_example_rank_one(rng):
    rho = np.diag([0.75, 0.25]).astype(complex)
    basis = np.array([[1.0], [0.0]], dtype=complex)
    n = 40_000
    t = projected_povm_transcript(rho, basis, n, rng)
    p = t.bottom_count / n
    assert abs(p - 0.25) <= 4 * math.sqrt(0.25 * 0.75 / n)
    kept = t.vectors[~t.bottom]
    np.testing.assert_allclose(np.abs(kept[:, 0]), 1.0, atol=1e-12)
    np.testing.assert_allclose(kept[:, 1], 0.0, atol=1e-12)


def test_projected_born_totals(rng):
    d, r, n = 5, 2, 50_000
    rho = random_state(d, rng.dirichlet(np.ones(d)), rng)
    q, _ = np.linalg.qr(rng.standard_normal((d, r)) + 1j * rng.standard_normal((d, r)))
    alpha = np.trace(q.conj().T @ rho @ q).real
    t = projected_povm_transcript(rho, q, n, rng)
    p = 1 - alpha
    assert abs(t.bottom_count / n - p) <= 4 * math.sqrt(p * (1 - p) / n)
    kept = t.vectors[~t.bottom]
    # outcomes stay inside the measured subspace
    np.testing.assert_allclose(np.linalg.norm(kept @ q.conj(), axis=1), 1.0, atol=1e-12)


def test_projected_single_outcome_and_rank0_error(rng):
    out = sample_projected_povm(np.eye(2) / 2, np.eye(2, dtype=complex)[:, :1], rng)
    assert out.rank == 1
    with pytest.raises(InvariantError):
        projected_povm_transcript(np.eye(2) / 2, np.zeros((2, 0)), 3, rng)


def test_transcript_jsonl_round_trip(rng):
    rho = np.diag([0.6, 0.4]).astype(complex)
    t = projected_povm_transcript(rho, np.eye(2, dtype=complex)[:, :1], 30, rng)
    back = Transcript.from_jsonl(t.to_jsonl(), d=2)
    np.testing.assert_array_equal(back.vectors, t.vectors)
    np.testing.assert_array_equal(back.bottom, t.bottom)
    np.testing.assert_array_equal(back.ranks, t.ranks)
    joined = Transcript.concatenate([t, back])
    assert len(joined) == 60 and joined.bottom_count == 2 * t.bottom_count


def test_exact_pure_moment_values():
    for d in (2, 4, 8):
        assert exact_pure_moment(d, 1) == pytest.approx(2.0, rel=1e-12)
        k = 3
        direct = (d + 1) ** k * d * math.factorial(k + 1) * math.factorial(d - 1) / math.factorial(k + d)
        assert exact_pure_moment(d, k) == pytest.approx(direct, rel=1e-12)
    assert moment_bound(1) == 4


def test_moment_check_mixed_k1(rng):
    d = 4
    u = haar_pure(d, rng)
    est, se = moment_check(1, np.eye(d) / d, u, 50_000, rng)
    assert abs(est - (d + 1) / d) <= 3 * se


def test_moment_check_validation(rng):
    with pytest.raises(ValueError):
        moment_check(0, np.eye(2) / 2, [1, 0], 1000, rng)
    with pytest.raises(ValueError):
        moment_check(1, np.eye(2) / 2, [1, 0], 10, rng)
