import math

import numpy as np
import pytest

from tomolab import lowerbound as lb
from tomolab.experiments import density_chi2_d2
from tomolab.linalg import InvariantError
from tomolab.measurement import Transcript
from tomolab.states import HardPriorParams


def test_likelihood_ratio_single_outcome():
    val = lb.transcript_likelihood_ratio(np.diag([0.75, 0.25]), np.eye(2) / 2, [[1.0, 0.0]])
    assert val == pytest.approx(math.log(1.5), abs=1e-14)


def test_likelihood_ratio_rejects_bottom():
    t = Transcript(np.zeros((1, 2)), np.array([True]), np.array([1]))
    with pytest.raises(InvariantError):
        lb.transcript_likelihood_ratio(np.eye(2) / 2, np.eye(2) / 2, t)


def test_vandermonde_max_small_cases():
    assert lb.vandermonde_log_max(2) == pytest.approx(math.log(2.0))
    # nodes -1, 0, 1
    assert lb.vandermonde_log_max(3) == pytest.approx(math.log(2.0))


def test_neighborhood_caps_and_mean(rng):
    d = 8
    params = lb.NeighborhoodParams(0.05, 10.0)
    rho0 = np.eye(d) / d
    n = 20_000
    rhos = lb.sample_isotropic_neighborhood(rho0, params, rng, size=n)
    dev = rhos - rho0
    w = np.linalg.eigvalsh(dev)
    assert np.all(np.abs(w) <= params.op_cap(d) + 1e-12)
    assert np.all(np.abs(w).sum(axis=1) <= params.trace_cap + 1e-12)
    np.testing.assert_allclose(np.trace(dev, axis1=1, axis2=2), 0.0, atol=1e-12)
    assert np.linalg.norm(dev.mean(axis=0)) <= 4 / math.sqrt(n)
    frob2 = np.mean(np.sum(np.abs(dev) ** 2, axis=(1, 2)))
    assert frob2 <= params.C**2 * params.epsilon**2 / d


def test_tilt_bounds(rng):
    d = 4
    params = lb.NeighborhoodParams(0.05, 10.0)
    rho0 = np.eye(d) / d
    x = np.eye(d, dtype=complex)[np.arange(200) % d]
    est, se = lb.tilt_per_measurement(rho0, x, params, 2000, rng)
    assert lb.tilt_bound(params, d) - 3 * se <= est <= 3 * se
    assert lb.tilt_per_measurement(rho0, x, lb.NeighborhoodParams(0.0, 10.0), 10, rng) == (0.0, 0.0)


def test_d2_ball_spectrum_is_symmetric(rng):
    x = lb.uniform_ball_samples(2, 5000, rng)
    w = np.linalg.eigvalsh(x)
    np.testing.assert_allclose(w[:, 0], -w[:, 1], atol=1e-14)
    assert np.all(2 * w[:, 1] <= 1 + 1e-12)


def test_d2_top_eigenvalue_density(rng):
    _, p = density_chi2_d2(20_000, rng)
    assert p >= 0.01


def test_eigen_density_examples():
    assert lb.eigen_density_f([0.5, -0.5]) == pytest.approx(1.0)
    assert lb.eigen_density_f([1 / 3, 0, -1 / 3]) == pytest.approx(2 / 27)
    assert lb.eigen_density_f([0.9, -0.9]) == 0.0
    with pytest.raises(InvariantError):
        lb.eigen_density_f([-0.5, 0.5])


def test_gamma_bound_examples():
    assert math.exp(lb.gamma_log_lower_bound(2)) == pytest.approx(1 / ((2 * math.e) ** 2 * 2), rel=1e-12)
    f, bound, ok = lb.check_gamma_lower([0.25, -0.25])
    assert f == pytest.approx(0.5) and ok and bound == pytest.approx(0.01692, abs=1e-5)
    corner = np.array([0.25 + 1 / 16, -0.25 - 1 / 16])
    f, _, ok = lb.check_gamma_lower(corner)
    assert ok and f >= 0.375


def test_delta_bound_examples():
    f, bound, ok = lb.check_delta_upper([0.5, -0.5])
    assert f == pytest.approx(1.0) and bound == pytest.approx(math.exp(8) / 2) and ok


def test_gamma_points_inside_delta_prime(rng):
    for d in range(2, 9):
        pts = lb.sample_gamma_points(d, 500, rng)
        assert all(lb.in_gamma(p) and lb.in_delta_prime(p) for p in pts)
        assert all(lb.check_gamma_lower(p)[2] for p in pts)


def test_delta_sweep_d5(rng):
    pts = lb.sample_delta_points(5, 10_000, rng)
    assert all(lb.check_delta_upper(p)[2] for p in pts)


def test_volume_ratio_values(rng):
    p2, _ = lb.volume_ratio_mc(2, 10_000, rng)
    assert p2 == 1.0
    p3, se3 = lb.volume_ratio_mc(3, 20_000, rng)
    p4, se4 = lb.volume_ratio_mc(4, 20_000, rng)
    assert 0 < p3 < 1 and p3 >= math.exp(-27)
    assert p4 <= p3 + 3 * math.hypot(se3, se4)


def test_mu_ratio_extremes(rng):
    worst, ok = lb.mu_ratio_extremes(HardPriorParams(8), 200, rng)
    assert ok and worst <= 4 * 64


def test_in_regime():
    assert lb.NeighborhoodParams(1e-12).in_regime(HardPriorParams(8))
    assert not lb.NeighborhoodParams(0.05, 10.0).in_regime(HardPriorParams(8))
