"""Orthogonal targets at evenly spaced times: the uniform-spectrum candidate.

When the targets are orthonormal and t_i = (i-1) t, the overlap constraints
collapse to

    sum_k L_k exp(i l eps_k t) = 0   for l = 1 .. m-1,

and a closed-form feasible candidate places the eigenphases uniformly on the
unit circle:

    eps_k t = 2 pi k / n + theta0,    L_k = 1/n,    theta_i = 0.

The lag-l sum then vanishes whenever n does not divide l: for prime n the
rotated phases are again n uniform points, and when l divides n they are n/l
uniform points.  At l = n the sum has magnitude 1, which is why m <= n is
required.  Whether this candidate is stationary for the energy objective is
an open question; is_eoi_stationary gathers numerical evidence instead of
asserting an answer.

The raw objective sum(eps^2) depends on theta0; all reported comparisons use
the trace-zero regauged value, which is theta0-independent.  The default
theta0 = -(n+1) pi / n centers the spectrum so the raw candidate is already
trace-zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kkt import Multipliers, multipliers_least_squares, objective
from .problem import ProblemSpec, SolutionCandidate, apply_energy_shift

VERDICT_STATIONARY = "STATIONARY"
VERDICT_NOT_STATIONARY = "NOT_STATIONARY"
VERDICT_INCONCLUSIVE = "INCONCLUSIVE"

STATIONARY_TOL = 1e-8
NOT_STATIONARY_TOL = 1e-4


def default_theta0(n: int) -> float:
    """Spectrum offset centering the uniform eigenphases (trace-zero raw seed)."""
    return -(n + 1) * np.pi / n


@dataclass(frozen=True)
class UniformSeed:
    """Uniform-circle candidate for orthogonal, evenly spaced instances."""

    n: int
    m: int
    t: float
    theta0: float
    candidate: SolutionCandidate


def uniform_seed(n: int, m: int, t: float, theta0: float | None = None) -> UniformSeed:
    """Build the uniform-spectrum candidate; requires 2 <= m <= n and t > 0."""
    if m < 2:
        raise ValueError("need at least two targets")
    if m > n:
        raise ValueError(f"orthogonal targets require m <= n (got m={m}, n={n})")
    if t <= 0:
        raise ValueError("time spacing must be positive")
    if theta0 is None:
        theta0 = default_theta0(n)
    k = np.arange(1, n + 1)
    eps = (2.0 * np.pi * k / n + theta0) / t
    cand = SolutionCandidate(
        eigenvalues=eps, weights=np.full(n, 1.0 / n), phases=np.zeros(m)
    )
    return UniformSeed(n=n, m=m, t=float(t), theta0=float(theta0), candidate=cand)


def circle_sum(n: int, l: int, theta0: float) -> complex:
    """(1/n) sum_{k=1..n} exp(i l (2 pi k / n + theta0)).

    Zero exactly when n does not divide l; e^{i l theta0} when it does.
    """
    if n < 1:
        raise ValueError("n must be >= 1")
    if l < 0:
        raise ValueError("l must be >= 0")
    k = np.arange(1, n + 1)
    return complex(np.mean(np.exp(1j * l * (2.0 * np.pi * k / n + theta0))))


def interpolation_residuals(seed: UniformSeed) -> np.ndarray:
    """Lag sums sum_k L_k exp(i l eps_k t) for l = 1 .. m-1 (all should vanish)."""
    cand = seed.candidate
    ls = np.arange(1, seed.m)
    phases = np.exp(1j * np.multiply.outer(ls, cand.eigenvalues * seed.t))
    return phases @ cand.weights


def orthogonal_spec(n: int, m: int, t: float) -> ProblemSpec:
    """Standard-basis targets e_1..e_m at times 0, t, ..., (m-1) t."""
    states = np.eye(n, dtype=np.complex128)[:m]
    return ProblemSpec(states=states, times=np.arange(m) * float(t))


def regauged_candidate(seed: UniformSeed) -> SolutionCandidate:
    """Trace-zero gauge of the seed candidate (phases shifted accordingly)."""
    spec = orthogonal_spec(seed.n, seed.m, seed.t)
    delta = -float(np.mean(seed.candidate.eigenvalues))
    return apply_energy_shift(seed.candidate, delta, spec)


def regauged_objective(seed: UniformSeed) -> float:
    """Energy objective of the seed after trace-zero regauging.

    Closed form pi^2 (n^2 - 1) / (3 n t^2); independent of theta0.
    """
    return objective(regauged_candidate(seed))


@dataclass(frozen=True)
class StationarityReport:
    """Numerical evidence on whether the uniform candidate is energy-stationary."""

    residual_norm: float
    verdict: str
    multipliers: Multipliers
    seed_objective: float  # regauged
    solver_objective: float | None
    solver_status: str | None
    solver_found_lower: bool | None


def is_eoi_stationary(
    seed: UniformSeed, config=None, compare_solver: bool = True
) -> StationarityReport:
    """Fit multipliers at the regauged seed and report the best residual norm.

    Stationarity is linear in the multipliers at a fixed candidate, so the fit
    is a least-squares solve.  The candidate is regauged first because a
    nonzero spectrum sum already rules out stationarity of the energy
    objective.  Optionally also runs the general solver on the induced
    orthogonal instance and reports whether it found a lower objective.
    """
    spec = orthogonal_spec(seed.n, seed.m, seed.t)
    cand = regauged_candidate(seed)
    mult, resid = multipliers_least_squares(spec, cand, active_tol=0.0)
    if resid < STATIONARY_TOL:
        verdict = VERDICT_STATIONARY
    elif resid > NOT_STATIONARY_TOL:
        verdict = VERDICT_NOT_STATIONARY
    else:
        verdict = VERDICT_INCONCLUSIVE
    seed_obj = objective(cand)
    solver_obj = None
    solver_status = None
    found_lower = None
    if compare_solver:
        from .solver import SolverConfig, solve  # deferred: solver seeds from here

        cfg = config if config is not None else SolverConfig(num_starts=8, rng_seed=0)
        result = solve(spec, cfg)
        solver_obj = result.objective_value
        solver_status = result.status
        found_lower = bool(solver_obj < seed_obj - 1e-7)
    return StationarityReport(
        residual_norm=resid,
        verdict=verdict,
        multipliers=mult,
        seed_objective=seed_obj,
        solver_objective=solver_obj,
        solver_status=solver_status,
        solver_found_lower=found_lower,
    )
