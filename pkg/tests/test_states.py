import numpy as np
import pytest
from scipy import stats

from tomolab.linalg import InvariantError
from tomolab.states import (
    HardPriorParams,
    deviation_from_mixed,
    goe_star_sample,
    haar_orthogonal,
    haar_pure,
    haar_unitary,
    hard_prior_sample,
    in_support,
    is_good,
    prior_log_ratio,
    random_state,
)


def test_haar_pure_moments(rng):
    d, n = 4, 200_000
    v = haar_pure(d, rng, size=n)
    ov = np.abs(v[:, 0]) ** 2
    se1 = ov.std() / np.sqrt(n)
    se2 = (ov**2).std() / np.sqrt(n)
    assert abs(ov.mean() - 1 / d) <= 4 * se1
    assert abs((ov**2).mean() - 2 / (d * (d + 1))) <= 4 * se2


def test_haar_unitary_and_orthogonal_are_unitary(rng):
    u = haar_unitary(5, rng)
    np.testing.assert_allclose(u.conj().T @ u, np.eye(5), atol=1e-12)
    q = haar_orthogonal(4, rng, size=3)
    for m in q:
        np.testing.assert_allclose(m.T @ m, np.eye(4), atol=1e-12)


def test_random_state_spectrum(rng):
    spec = [0.5, 0.25, 0.125, 0.125]
    rho = random_state(4, spec, rng)
    np.testing.assert_allclose(np.sort(np.linalg.eigvalsh(rho))[::-1], spec, atol=1e-12)


def test_random_state_rejects_bad_spectrum(rng):
    with pytest.raises(InvariantError):
        random_state(2, [0.7, 0.7], rng)
    with pytest.raises(InvariantError):
        random_state(2, [0.2, 0.3, 0.5], rng)


def test_random_state_unitary_invariance(rng):
    d, n = 4, 4000
    spec = [0.5, 0.25, 0.125, 0.125]
    u0 = haar_pure(d, rng)
    w = haar_unitary(d, rng)
    a = [np.real(u0.conj() @ random_state(d, spec, rng) @ u0) for _ in range(n)]
    u1 = w @ u0
    b = [np.real(u1.conj() @ random_state(d, spec, rng) @ u1) for _ in range(n)]
    assert stats.ks_2samp(a, b).pvalue > 0.001


def test_goe_star_traceless_and_offdiag_variance(rng):
    d, n = 4, 100_000
    samples = np.array([goe_star_sample(d, rng) for _ in range(n)])
    np.testing.assert_allclose(np.trace(samples, axis1=1, axis2=2), 0, atol=1e-12)
    x = samples[:, 0, 1]
    var = x.var()
    # standard error of a Gaussian sample variance is var * sqrt(2 / n)
    assert abs(var - 1 / d) <= 3 * (1 / d) * np.sqrt(2 / n)


def test_goe_op_norm_concentration(rng):
    for d in (16, 32):
        hits = sum(np.linalg.norm(goe_star_sample(d, rng), 2) <= 3 for _ in range(2000))
        assert hits / 2000 >= 0.99


def test_hard_prior_support_and_good_fraction(rng):
    params = HardPriorParams(16)
    rhos = [hard_prior_sample(params, rng) for _ in range(1000)]
    assert all(deviation_from_mixed(r) <= 0.04 / 16 + 1e-15 for r in rhos)
    assert all(in_support(r, params) for r in rhos)
    assert np.mean([is_good(r, params) for r in rhos]) >= 0.99
    for r in rhos[:10]:
        assert np.trace(r).real == pytest.approx(1.0, abs=1e-14)
        assert np.linalg.eigvalsh(r)[0] > 0


def test_prior_log_ratio_boundary_value():
    d, sigma = 8, 0.01
    params = HardPriorParams(d, sigma)
    # deviation with every eigenvalue at +-4 sigma / d
    dev = np.diag([4 * sigma / d if i % 2 == 0 else -4 * sigma / d for i in range(d)])
    boundary = np.eye(d) / d + dev
    assert prior_log_ratio(np.eye(d) / d, boundary, params) == pytest.approx(4 * d * d, rel=1e-12)


def test_prior_log_ratio_within_band(rng):
    params = HardPriorParams(8)
    for _ in range(1000):
        a, b = hard_prior_sample(params, rng), hard_prior_sample(params, rng)
        assert abs(prior_log_ratio(a, b, params)) <= 4 * 64


def test_hard_prior_params_validation():
    with pytest.raises(ValueError):
        HardPriorParams(1)
    with pytest.raises(ValueError):
        HardPriorParams(4, good_cutoff=5)
