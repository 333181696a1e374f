import json

import numpy as np
import pytest

from tomolab.adaptive import (
    BandDecomposition,
    BudgetExhausted,
    SimulatedOracle,
    assemble_estimate,
    diagnostics_check,
    nonadaptive_baseline,
    round_count,
    run_adaptive,
)
from tomolab.linalg import infidelity
from tomolab.states import haar_pure, random_state


def test_round_count_examples():
    assert round_count(4, 1 / 16) == 10
    assert round_count(1, 0.5) == 5
    with pytest.raises(ValueError):
        round_count(1, 1.5)


def test_assemble_normalizes_blocks():
    e = np.eye(2, dtype=complex)
    dec = BandDecomposition(
        thresholds=[0.5, 0.25],
        bases=[e[:, :1], e[:, 1:]],
        blocks=[np.array([[0.6]], dtype=complex), np.array([[0.2]], dtype=complex)],
        sigmas=[np.zeros((2, 2)), np.zeros((2, 2))],
        round_bases=[e, e[:, 1:]],
        residual=np.zeros((2, 0), dtype=complex),
    )
    np.testing.assert_allclose(assemble_estimate(dec), np.diag([0.75, 0.25]), atol=1e-15)


def test_pure_state_first_band_captures_it(rng):
    d, n = 4, 100_000
    u = haar_pure(d, rng)
    rho = np.outer(u, u.conj())
    est = run_adaptive(SimulatedOracle(rho, n, rng), d, 1, 0.5, 0.05, n)
    ranks = est.decomposition.ranks()
    assert ranks[0] == 1 and all(r == 0 for r in ranks[1:])
    b = est.decomposition.bases[0]
    assert np.linalg.norm(b.conj().T @ u) ** 2 >= 0.99
    report = diagnostics_check(rho, est)
    assert report.passed, report.failures()
    assert report.residual_mass <= 1e-2


def test_maximally_mixed_first_band_empty(rng):
    d, n = 4, 200_000
    est = run_adaptive(SimulatedOracle(np.eye(d) / d, n, rng), d, 4, 1 / 16, 0.05, n)
    ranks = est.decomposition.ranks()
    assert ranks[0] == 0
    # eigenvalues sit exactly on the 1/4 threshold, so noise splits them
    # between bands 2 and 3; by threshold 1/8 all of them are captured
    assert ranks[1] + ranks[2] == 4
    report = diagnostics_check(np.eye(d) / d, est)
    for rd in report.rounds[:3]:
        assert rd.check_gamma_norm


def test_decomposition_is_orthogonal_partition(rng):
    d, n = 5, 20_000
    rho = random_state(d, rng.dirichlet(np.ones(d)), rng)
    est = run_adaptive(SimulatedOracle(rho, n, rng), d, d, 0.1, 0.05, n)
    np.testing.assert_allclose(est.decomposition.resolution_of_identity(), np.eye(d), atol=1e-10)
    w = np.linalg.eigvalsh(est.state)
    assert w[0] >= -1e-12 and np.trace(est.state).real == pytest.approx(1.0, abs=1e-12)
    t = round_count(d, 0.1)
    assert est.copies_per_round == n // t and est.copies_discarded == n - t * (n // t)
    json.dumps(est.to_dict())


def test_mixing_option(rng):
    d, n = 3, 5000
    rho = random_state(d, [0.7, 0.3], rng)
    est = run_adaptive(SimulatedOracle(rho, n, rng), d, 2, 0.2, 0.05, n, mix=True)
    assert np.linalg.eigvalsh(est.state)[0] >= 0.2 / d / 2 - 1e-12
    assert est.mixed


def test_budget_and_argument_errors(rng):
    rho = np.eye(2) / 2
    with pytest.raises(BudgetExhausted):
        run_adaptive(SimulatedOracle(rho, 10, rng), 2, 1, 0.5, 0.05, 100)
    with pytest.raises(ValueError):
        run_adaptive(SimulatedOracle(rho, 100, rng), 3, 1, 0.5, 0.05, 100)
    with pytest.raises(ValueError):
        run_adaptive(SimulatedOracle(rho, 100, rng), 2, 1, 0.5, 0.05, 3)


def test_adaptive_beats_nonadaptive_on_rank_deficient_state(rng):
    d, n = 4, 2**16
    rho = random_state(d, [0.6, 0.4], rng)
    ad, na = [], []
    for _ in range(10):
        ad.append(infidelity(rho, run_adaptive(SimulatedOracle(rho, n, rng), d, 2, 1 / 16, 0.05, n).state))
        na.append(infidelity(rho, nonadaptive_baseline(SimulatedOracle(rho, n, rng), d, n)))
    assert np.median(ad) < np.median(na)
