"""Numerical verification of the coverage bound, the ridge error bounds, and
the correlated-supervision variance identity.

Each check pits the closed-form quantity against an independent brute-force or
Monte Carlo estimate on synthetic constructions.  The coverage bound uses a
distance-to-center witness loss, which is exactly L-Lipschitz in the embedding
by the reverse triangle inequality.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .diversity import coverage
from .util import derived_rng

BOUND_SLACK_TOL = 1e-9


@dataclass(frozen=True, slots=True)
class LipschitzLossSpec:
    """Witness loss ell(r) = L * ||psi(r) - center|| + offset."""

    lipschitz_l: float
    center: tuple[float, ...]
    offset: float

    def __post_init__(self) -> None:
        if self.lipschitz_l <= 0:
            raise ValueError(f"Lipschitz constant must be > 0, got {self.lipschitz_l}")

    def __call__(self, points: np.ndarray) -> np.ndarray:
        points = np.atleast_2d(np.asarray(points, dtype=float))
        dists = np.linalg.norm(points - np.asarray(self.center), axis=1)
        return self.lipschitz_l * dists + self.offset


@dataclass(slots=True)
class CoverageBoundCheck:
    lhs: float
    rhs: float
    slack: float
    holds: bool


@dataclass(frozen=True, slots=True)
class RidgeProblem:
    design: np.ndarray
    lam: float
    sigma: float
    theta_star: np.ndarray

    def __post_init__(self) -> None:
        if self.lam <= 0:
            raise ValueError(f"lambda must be > 0, got {self.lam}")
        if self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.design.shape[1] != self.theta_star.shape[0]:
            raise ValueError("design width and theta_star length differ")


@dataclass(slots=True)
class RidgeCheck:
    variance_term: float
    variance_bound: float
    bias_bound: float
    mc_mse: float
    mc_se: float
    holds_variance: bool
    holds_mse: bool

    @property
    def holds(self) -> bool:
        return self.holds_variance and self.holds_mse


@dataclass(frozen=True, slots=True)
class CorrelatedNoiseSpec:
    sigma: float
    m: int
    rho_bar: float
    target: float = 0.0

    def __post_init__(self) -> None:
        if self.sigma <= 0:
            raise ValueError(f"sigma must be > 0, got {self.sigma}")
        if self.m < 1:
            raise ValueError(f"m must be >= 1, got {self.m}")
        if self.m > 1 and not -1.0 / (self.m - 1) < self.rho_bar <= 1.0:
            raise ValueError(
                f"rho_bar must lie in (-1/(m-1), 1] = ({-1.0 / (self.m - 1)}, 1], got {self.rho_bar}")


@dataclass(slots=True)
class VarianceCheck:
    analytic_var: float
    mc_var: float
    rel_err: float
    tol: float
    holds: bool


def check_coverage_bound(pool, selected, loss: LipschitzLossSpec) -> CoverageBoundCheck:
    """Worst pool loss vs worst selected loss plus L times the covering radius."""
    pool = np.atleast_2d(np.asarray(pool, dtype=float))
    selected = np.atleast_2d(np.asarray(selected, dtype=float))
    lhs = float(loss(pool).max())
    r_max = coverage(pool, selected).r_max
    rhs = float(loss(selected).max()) + loss.lipschitz_l * r_max
    slack = rhs - lhs
    return CoverageBoundCheck(lhs=lhs, rhs=rhs, slack=slack, holds=slack >= -BOUND_SLACK_TOL)


def coverage_bound_sweep(trials: int, seed: int = 0, max_m: int = 8,
                         max_dim: int = 8) -> dict:
    """Random (pool, subset, witness loss) draws; counts bound violations."""
    violations = 0
    min_slack = math.inf
    for trial in range(trials):
        rng = derived_rng(seed, trial)
        m = int(rng.integers(1, max_m + 1))
        d = int(rng.integers(1, max_dim + 1))
        pool = rng.normal(scale=rng.uniform(0.1, 3.0), size=(m, d))
        n_sel = int(rng.integers(1, m + 1))
        sel_rows = rng.choice(m, size=n_sel, replace=False)
        loss = LipschitzLossSpec(
            lipschitz_l=float(rng.uniform(0.05, 10.0)),
            center=tuple(rng.normal(size=d)),
            offset=float(rng.normal()),
        )
        check = check_coverage_bound(pool, pool[sel_rows], loss)
        min_slack = min(min_slack, check.slack)
        if not check.holds:
            violations += 1
    return {"trials": trials, "violations": violations, "min_slack": min_slack}


def check_ridge_bounds(problem: RidgeProblem, trials: int = 10_000, seed: int = 0) -> RidgeCheck:
    """Closed-form variance term vs trace bound, plus Monte Carlo MSE vs the full bound."""
    if trials < 1:
        raise ValueError(f"trials must be >= 1, got {trials}")
    h = np.asarray(problem.design, dtype=float)
    p = h.shape[1]
    hth = h.T @ h
    a_inv = np.linalg.inv(hth + problem.lam * np.eye(p))
    variance_term = problem.sigma**2 * float(np.trace(a_inv @ hth @ a_inv))
    variance_bound = problem.sigma**2 * float(np.trace(a_inv))
    op_norm = float(np.linalg.eigvalsh(a_inv).max())
    bias_bound = problem.lam**2 * float(problem.theta_star @ problem.theta_star) * op_norm**2

    rng = derived_rng(seed)
    noise = rng.standard_normal((trials, h.shape[0])) * problem.sigma
    y = h @ problem.theta_star + noise
    theta_hat = y @ h @ a_inv
    errors = ((theta_hat - problem.theta_star) ** 2).sum(axis=1)
    mc_mse = float(errors.mean())
    mc_se = float(errors.std(ddof=1) / math.sqrt(trials)) if trials > 1 else math.inf

    holds_variance = variance_term <= variance_bound * (1 + 1e-12) + 1e-15
    holds_mse = mc_mse <= variance_bound + bias_bound + 3 * mc_se
    return RidgeCheck(variance_term=variance_term, variance_bound=variance_bound,
                      bias_bound=bias_bound, mc_mse=mc_mse, mc_se=mc_se,
                      holds_variance=holds_variance, holds_mse=holds_mse)


def random_ridge_problem(rng: np.random.Generator, max_m: int = 12, max_p: int = 8) -> RidgeProblem:
    m = int(rng.integers(1, max_m + 1))
    p = int(rng.integers(1, max_p + 1))
    h = rng.normal(scale=rng.uniform(0.1, 3.0), size=(m, p))
    if m > 1 and rng.random() < 0.25:
        h[int(rng.integers(0, m))] = h[0]  # deliberate rank deficiency
    return RidgeProblem(design=h, lam=float(rng.uniform(1e-3, 10.0)),
                        sigma=float(rng.uniform(0.1, 2.0)),
                        theta_star=rng.normal(size=p))


def ridge_variance_sweep(instances: int, seed: int = 0) -> dict:
    """variance_term <= variance_bound across random problems; counts violations."""
    violations = 0
    for trial in range(instances):
        rng = derived_rng(seed, trial)
        check = check_ridge_bounds(random_ridge_problem(rng), trials=1, seed=seed + trial)
        if not check.holds_variance:
            violations += 1
    return {"instances": instances, "violations": violations}


def equicorrelated_mean_variance(sigma: float, m: int, rho_bar: float) -> float:
    """Variance of the mean of m equicorrelated noise terms."""
    return sigma**2 / m * (1.0 + (m - 1) * rho_bar)


def sample_equicorrelated(spec: CorrelatedNoiseSpec, trials: int,
                          rng: np.random.Generator) -> np.ndarray:
    """(trials, m) draws with exact pairwise correlation rho_bar."""
    m, rho = spec.m, spec.rho_bar
    if rho >= 0.0:
        shared = rng.standard_normal((trials, 1))
        own = rng.standard_normal((trials, m))
        z = math.sqrt(rho) * shared + math.sqrt(1.0 - rho) * own
    else:
        corr = (1.0 - rho) * np.eye(m) + rho * np.ones((m, m))
        eigvals, eigvecs = np.linalg.eigh(corr)
        root = eigvecs @ np.diag(np.sqrt(np.maximum(eigvals, 0.0))) @ eigvecs.T
        z = rng.standard_normal((trials, m)) @ root
    return spec.target + spec.sigma * z


def check_variance_reduction(spec: CorrelatedNoiseSpec, trials: int = 1_000_000,
                             seed: int = 0) -> VarianceCheck:
    """Monte Carlo variance of the m-member mean vs the closed form."""
    if trials < 10_000:
        raise ValueError(f"trials must be >= 10000 for a stable variance estimate, got {trials}")
    analytic = equicorrelated_mean_variance(spec.sigma, spec.m, spec.rho_bar)
    rng = derived_rng(seed)
    means = sample_equicorrelated(spec, trials, rng).mean(axis=1)
    mc_var = float(means.var(ddof=1))
    scale = analytic if analytic > 0.0 else spec.sigma**2 / spec.m
    rel_err = abs(mc_var - analytic) / scale
    tol = max(0.02, 4.0 / math.sqrt(trials))
    return VarianceCheck(analytic_var=analytic, mc_var=mc_var, rel_err=rel_err,
                         tol=tol, holds=rel_err <= tol)
