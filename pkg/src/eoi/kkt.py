"""Variational function, objective, and stationarity residuals.

The constrained problem is

    minimize   sum_k eps_k^2
    subject to the overlap-matching residuals (problem.constraint_residuals)
               and sum_k L_k = 1,

with multipliers alpha_p / beta_p attached to the real / imaginary residual
of constraint pair p and gamma attached to the weight normalization.  The
variational function is

    S = sum_k eps_k^2
        + sum_p [alpha_p * re_p + beta_p * im_p]
        + gamma * (sum_k L_k - 1).

stationarity_residuals returns the exact gradient of S with respect to
(eps_1..eps_n, L_1..L_n, theta_1..theta_m), in that order.  The weight block
is the derivative in L_k itself (not |lambda_k|), which stays informative at
L_k = 0; there the complementarity convention applies: a boundary weight is
stationary when its residual is nonnegative, which projected_stationarity_norm
implements by clipping positive boundary entries to zero.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .problem import ProblemSpec, SolutionCandidate, pair_indices, residual_parts


@dataclass(frozen=True)
class Multipliers:
    """Constraint multipliers in canonical pair order plus the weight multiplier."""

    alpha: np.ndarray  # (P,) real-part constraint multipliers
    beta: np.ndarray  # (P,) imaginary-part constraint multipliers
    gamma: float

    def __post_init__(self):
        alpha = np.asarray(self.alpha, dtype=float)
        beta = np.asarray(self.beta, dtype=float)
        if alpha.ndim != 1 or alpha.shape != beta.shape:
            raise ValueError("alpha and beta must be 1-D arrays of equal length")
        alpha, beta = alpha.copy(), beta.copy()
        alpha.setflags(write=False)
        beta.setflags(write=False)
        object.__setattr__(self, "alpha", alpha)
        object.__setattr__(self, "beta", beta)
        object.__setattr__(self, "gamma", float(self.gamma))

    @property
    def pair_count(self) -> int:
        return self.alpha.size

    def stacked(self) -> np.ndarray:
        """Interleaved (alpha_p, beta_p) vector matching the residual layout."""
        y = np.empty(2 * self.pair_count, dtype=float)
        y[0::2] = self.alpha
        y[1::2] = self.beta
        return y


def multipliers_from_stacked(y: np.ndarray, gamma: float) -> Multipliers:
    y = np.asarray(y, dtype=float)
    return Multipliers(alpha=y[0::2], beta=y[1::2], gamma=gamma)


@dataclass(frozen=True)
class KktPoint:
    """A candidate together with multipliers of matching pair count."""

    candidate: SolutionCandidate
    multipliers: Multipliers

    def __post_init__(self):
        m = self.candidate.num_states
        expected = m * (m - 1) // 2
        if self.multipliers.pair_count != expected:
            raise ValueError(
                f"expected {expected} constraint pairs for m={m}, "
                f"got {self.multipliers.pair_count}"
            )


def objective(cand: SolutionCandidate) -> float:
    """sum_k eps_k^2, equal to tr(H^2) of any Hamiltonian with this spectrum."""
    eps = cand.eigenvalues
    return float(eps @ eps)


def lagrangian_raw(times, gram, eps, lam, theta, alpha, beta, gamma) -> float:
    """Value of S on raw arrays (no candidate invariants enforced).

    This is the smooth extension used by finite-difference checks; the public
    lagrangian wraps it.
    """
    rre, rim = residual_parts(times, gram, eps, lam, theta)
    return float(
        np.dot(eps, eps)
        + np.dot(np.asarray(alpha, dtype=float), rre)
        + np.dot(np.asarray(beta, dtype=float), rim)
        + float(gamma) * (float(np.sum(lam)) - 1.0)
    )


def lagrangian(spec: ProblemSpec, point: KktPoint) -> float:
    """Value of the variational function S at the point."""
    cand = point.candidate
    if cand.num_states != spec.num_states:
        raise ValueError("candidate and spec disagree on the number of targets")
    mult = point.multipliers
    return lagrangian_raw(
        spec.times,
        spec.gram,
        cand.eigenvalues,
        cand.weights,
        cand.phases,
        mult.alpha,
        mult.beta,
        mult.gamma,
    )


def incidence(m: int) -> np.ndarray:
    """Dense (m, P) pair incidence: +1 at the later state, -1 at the earlier."""
    ii, jj = pair_indices(m)
    d = np.zeros((m, ii.size), dtype=float)
    d[ii, np.arange(ii.size)] = 1.0
    d[jj, np.arange(jj.size)] = -1.0
    return d


def _tables(times, eps, lam, theta):
    times = np.asarray(times, dtype=float)
    theta = np.asarray(theta, dtype=float)
    ii, jj = pair_indices(times.size)
    tau = times[ii] - times[jj]
    u = np.multiply.outer(np.asarray(eps, dtype=float), tau) + (theta[ii] - theta[jj])
    return tau, np.cos(u), np.sin(u)


def constraint_jacobian(times, eps, lam, theta) -> np.ndarray:
    """Jacobian of the interleaved residual vector wrt (eps, L, theta).

    Shape (m(m-1), 2n+m); row order matches constraint_residuals, column
    order matches stationarity_residuals.
    """
    eps = np.asarray(eps, dtype=float)
    lam = np.asarray(lam, dtype=float)
    n = eps.size
    m = np.asarray(times).size
    tau, cu, su = _tables(times, eps, lam, theta)
    d = incidence(m)
    a = lam @ cu
    b = lam @ su
    lam_tau = lam[:, None] * tau[None, :]
    jre = np.hstack([-(lam_tau * su).T, cu.T, -(b[:, None] * d.T)])
    jim = np.hstack([(lam_tau * cu).T, su.T, a[:, None] * d.T])
    jac = np.empty((2 * tau.size, 2 * n + m), dtype=float)
    jac[0::2] = jre
    jac[1::2] = jim
    return jac


def constraint_hessian_contraction(times, eps, lam, theta, wre, wim) -> np.ndarray:
    """sum_p [wre_p * hess(re_p) + wim_p * hess(im_p)] wrt (eps, L, theta).

    The residuals are trigonometric polynomials, so every block is closed
    form; this is the curvature term the solver adds to the Gauss-Newton
    model to make its inner Newton steps exact.
    """
    eps = np.asarray(eps, dtype=float)
    lam = np.asarray(lam, dtype=float)
    wre = np.asarray(wre, dtype=float)
    wim = np.asarray(wim, dtype=float)
    n = eps.size
    m = np.asarray(times).size
    tau, cu, su = _tables(times, eps, lam, theta)
    d = incidence(m)
    m1 = wre * cu + wim * su
    m2 = -wre * su + wim * cu
    h = np.zeros((2 * n + m, 2 * n + m), dtype=float)
    idx = np.arange(n)
    h[idx, idx] = -lam * (m1 @ (tau * tau))
    h[idx, n + idx] = m2 @ tau
    h[n + idx, idx] = h[idx, n + idx]
    het = -(lam[:, None] * tau[None, :] * m1) @ d.T
    h[:n, 2 * n :] = het
    h[2 * n :, :n] = het.T
    hlt = m2 @ d.T
    h[n : 2 * n, 2 * n :] = hlt
    h[2 * n :, n : 2 * n] = hlt.T
    h1 = lam @ m1
    h[2 * n :, 2 * n :] = -(d * h1[None, :]) @ d.T
    return h


def stationarity_residuals(spec: ProblemSpec, point: KktPoint) -> np.ndarray:
    """Exact gradient of S: blocks d/d eps (n), d/d L (n), d/d theta (m).

    The eps block is 2 eps_k - sum_p L_k tau_p [alpha_p sin(u) - beta_p cos(u)],
    the weight block is gamma + sum_p [alpha_p cos(u) + beta_p sin(u)], and the
    phase block is the exact derivative of S in theta_i, which flips the sign
    of both trigonometric terms on pairs where i is the earlier state.  At any
    point the phase block sums to zero (global-phase redundancy).
    """
    cand = point.candidate
    if cand.num_states != spec.num_states:
        raise ValueError("candidate and spec disagree on the number of targets")
    return stationarity_raw(
        spec.times,
        cand.eigenvalues,
        cand.weights,
        cand.phases,
        point.multipliers.stacked(),
        point.multipliers.gamma,
    )


def stationarity_raw(times, eps, lam, theta, y, gamma) -> np.ndarray:
    eps = np.asarray(eps, dtype=float)
    n = eps.size
    m = np.asarray(times).size
    jac = constraint_jacobian(times, eps, lam, theta)
    g = jac.T @ np.asarray(y, dtype=float)
    g[:n] += 2.0 * eps
    g[n : 2 * n] += float(gamma)
    return g


def projected_stationarity_norm(
    spec: ProblemSpec, point: KktPoint, active_tol: float = 1e-9
) -> float:
    """2-norm of the stationarity residual with boundary weights projected.

    For weights at the L_k = 0 boundary only a negative weight-block entry
    counts as a violation (decreasing S would require L_k < 0).
    """
    g = stationarity_residuals(spec, point)
    n = point.candidate.dimension
    lam = point.candidate.weights
    block = g[n : 2 * n].copy()
    boundary = lam <= active_tol
    block[boundary] = np.minimum(block[boundary], 0.0)
    g = g.copy()
    g[n : 2 * n] = block
    return float(np.linalg.norm(g))


def multipliers_least_squares(
    spec: ProblemSpec, cand: SolutionCandidate, active_tol: float = 1e-9
) -> tuple[Multipliers, float]:
    """Best multipliers at a candidate by least squares on the free components.

    Rows for weights at the L_k = 0 boundary are excluded (complementarity
    permits nonzero residuals there).  Returns the multipliers and the 2-norm
    of the remaining stationarity residual.
    """
    eps = cand.eigenvalues
    n = eps.size
    m = cand.num_states
    jac = constraint_jacobian(spec.times, eps, cand.weights, cand.phases)
    cols = np.vstack([jac, np.concatenate([np.zeros(n), np.ones(n), np.zeros(m)])]).T
    g0 = np.concatenate([2.0 * eps, np.zeros(n), np.zeros(m)])
    free = np.ones(2 * n + m, dtype=bool)
    free[n : 2 * n] = cand.weights > active_tol
    sol, *_ = np.linalg.lstsq(cols[free], -g0[free], rcond=None)
    resid = float(np.linalg.norm(cols[free] @ sol + g0[free]))
    return multipliers_from_stacked(sol[:-1], float(sol[-1])), resid
