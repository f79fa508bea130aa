from __future__ import annotations

import math

import numpy as np
import pytest

from rationale_metrics.theory import (
    CorrelatedNoiseSpec,
    LipschitzLossSpec,
    RidgeProblem,
    check_coverage_bound,
    check_ridge_bounds,
    check_variance_reduction,
    coverage_bound_sweep,
    equicorrelated_mean_variance,
    ridge_variance_sweep,
    sample_equicorrelated,
)


# --- coverage bound --------------------------------------------------------------

def test_loss_family_is_exactly_lipschitz():
    rng = np.random.default_rng(0)
    loss = LipschitzLossSpec(lipschitz_l=2.5, center=(0.2, -1.0), offset=0.3)
    u, v = rng.normal(size=(2, 2))
    lhs = abs(float(loss(u)[0] - loss(v)[0]))
    assert lhs <= 2.5 * np.linalg.norm(u - v) + 1e-12


def test_bound_tight_when_selected_equals_pool():
    pool = np.array([[0.0, 0.0], [1.0, 2.0], [3.0, -1.0]])
    loss = LipschitzLossSpec(lipschitz_l=1.5, center=(0.0, 0.0), offset=-0.2)
    check = check_coverage_bound(pool, pool, loss)
    assert check.lhs == check.rhs
    assert check.holds


def test_bound_hand_case():
    pool = np.array([[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]])
    loss = LipschitzLossSpec(lipschitz_l=2.0, center=(0.0, 0.0), offset=0.0)
    check = check_coverage_bound(pool, pool[:1], loss)
    assert check.lhs == 2.0          # farthest pool point at distance 1, L = 2
    assert check.rhs == 2.0          # 0 at the selected origin + 2 * r_max(=1)
    assert check.slack == 0.0


def test_bound_sweep_no_violations():
    result = coverage_bound_sweep(2000, seed=1)
    assert result["violations"] == 0
    assert result["min_slack"] >= -1e-9


def test_loss_spec_validation():
    with pytest.raises(ValueError):
        LipschitzLossSpec(lipschitz_l=0.0, center=(0.0,), offset=0.0)


# --- ridge bounds -----------------------------------------------------------------

def test_ridge_identity_case_algebra():
    problem = RidgeProblem(design=np.eye(2), lam=1.0, sigma=1.0, theta_star=np.zeros(2))
    check = check_ridge_bounds(problem, trials=100_000, seed=2)
    assert math.isclose(check.variance_term, 0.5, rel_tol=1e-12)
    assert math.isclose(check.variance_bound, 1.0, rel_tol=1e-12)
    assert check.bias_bound == 0.0
    assert abs(check.mc_mse - 0.5) <= 3 * check.mc_se
    assert check.holds


def test_ridge_variance_term_via_eigenvalues():
    rng = np.random.default_rng(3)
    h = rng.normal(size=(6, 4))
    problem = RidgeProblem(design=h, lam=0.7, sigma=1.3, theta_star=rng.normal(size=4))
    check = check_ridge_bounds(problem, trials=10, seed=0)
    eigs = np.linalg.eigvalsh(h.T @ h)
    expected = 1.3**2 * float((eigs / (eigs + 0.7) ** 2).sum())
    assert math.isclose(check.variance_term, expected, rel_tol=1e-9)
    expected_bound = 1.3**2 * float((1.0 / (eigs + 0.7)).sum())
    assert math.isclose(check.variance_bound, expected_bound, rel_tol=1e-9)


def test_ridge_rank_deficient_design():
    h = np.array([[1.0, 2.0], [1.0, 2.0], [0.5, 1.0]])  # rank 1
    problem = RidgeProblem(design=h, lam=0.5, sigma=0.8,
                           theta_star=np.array([1.0, -1.0]))
    check = check_ridge_bounds(problem, trials=60_000, seed=4)
    assert check.holds


def test_ridge_sweep_no_violations():
    result = ridge_variance_sweep(300, seed=5)
    assert result["violations"] == 0


def test_ridge_validation():
    with pytest.raises(ValueError):
        RidgeProblem(design=np.eye(2), lam=0.0, sigma=1.0, theta_star=np.zeros(2))
    with pytest.raises(ValueError):
        RidgeProblem(design=np.eye(2), lam=1.0, sigma=1.0, theta_star=np.zeros(3))


# --- variance identity ----------------------------------------------------------------

def test_variance_trivial_cases():
    assert equicorrelated_mean_variance(1.0, 5, 0.0) == 0.2
    assert equicorrelated_mean_variance(1.0, 4, 1.0) == 1.0
    assert math.isclose(equicorrelated_mean_variance(1.0, 4, 0.5), 0.625)


def test_variance_monotone_in_rho():
    values = [equicorrelated_mean_variance(1.3, 6, rho) for rho in np.linspace(-0.19, 1.0, 25)]
    assert all(b >= a for a, b in zip(values, values[1:]))


def test_sampler_hits_target_correlation():
    spec = CorrelatedNoiseSpec(sigma=2.0, m=4, rho_bar=0.5)
    rng = np.random.default_rng(6)
    z = sample_equicorrelated(spec, 200_000, rng)
    emp = np.corrcoef(z.T)
    off_diag = emp[np.triu_indices(4, k=1)]
    assert np.all(np.abs(off_diag - 0.5) < 0.02)
    assert np.all(np.abs(z.var(axis=0, ddof=1) - 4.0) < 0.15)


def test_sampler_negative_rho():
    spec = CorrelatedNoiseSpec(sigma=1.0, m=3, rho_bar=-0.4)
    rng = np.random.default_rng(7)
    z = sample_equicorrelated(spec, 200_000, rng)
    emp = np.corrcoef(z.T)
    off_diag = emp[np.triu_indices(3, k=1)]
    assert np.all(np.abs(off_diag + 0.4) < 0.02)


def test_variance_check_mc_agreement():
    check = check_variance_reduction(CorrelatedNoiseSpec(sigma=1.0, m=4, rho_bar=0.5),
                                     trials=200_000, seed=8)
    assert math.isclose(check.analytic_var, 0.625)
    assert check.holds


def test_variance_check_against_multivariate_normal_oracle():
    # independent sampling route: numpy's multivariate_normal with the same covariance
    m, rho, sigma = 5, 0.3, 1.4
    cov = sigma**2 * ((1 - rho) * np.eye(m) + rho * np.ones((m, m)))
    rng = np.random.default_rng(9)
    means = rng.multivariate_normal(np.zeros(m), cov, size=200_000).mean(axis=1)
    oracle_var = float(means.var(ddof=1))
    analytic = equicorrelated_mean_variance(sigma, m, rho)
    assert abs(oracle_var - analytic) / analytic < 0.02
    check = check_variance_reduction(CorrelatedNoiseSpec(sigma=sigma, m=m, rho_bar=rho),
                                     trials=200_000, seed=10)
    assert check.holds


def test_variance_spec_validation():
    with pytest.raises(ValueError):
        CorrelatedNoiseSpec(sigma=1.0, m=4, rho_bar=-0.5)   # below -1/(m-1)
    with pytest.raises(ValueError):
        CorrelatedNoiseSpec(sigma=0.0, m=4, rho_bar=0.5)
    with pytest.raises(ValueError):
        check_variance_reduction(CorrelatedNoiseSpec(sigma=1.0, m=4, rho_bar=0.5),
                                 trials=100, seed=0)
