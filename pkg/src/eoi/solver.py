"""Multistart solver for the energy-optimal interpolation problem.

minimize sum(eps^2) subject to the overlap-matching constraints and the
weight normalization.  Each start runs an augmented-Lagrangian outer loop
whose inner subproblems are solved by a trust-region Newton method with
analytic gradients and Hessians, followed by a Newton polish of the full
stationarity system that sharpens both feasibility and the reported
multipliers to near machine precision.

Parameterization: weights enter as L_k = s_k^2 / sum(s^2), which keeps
L >= 0 and sum(L) = 1 automatic; s is renormalized (a retraction that does
not change the augmented Lagrangian) after every accepted step.  Levels the
optimizer abandons converge to s_k = 0 quadratically, so boundary optima such
as rank-2 solutions embedded in larger dimensions are identified cleanly.
The weight multiplier gamma is recovered from the weight-stationarity block
at the solution.

The solver sees an instance only through its Gram matrix, times, and
dimension, so unitary changes of the target basis cannot affect the result.
Returned candidates are trace-zero gauged and their phases wrapped to
(-pi, pi].

Least-squares mode minimizes |residual|^2 + mu * sum(eps^2) with a small mu
that picks the minimum-energy point among residual-equivalent candidates;
for feasible instances a final restoration step descends on the residual
alone so the result is feasible to the same tolerance as the main mode.
"""

from __future__ import annotations

import logging
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass

import numpy as np

from .kkt import (
    KktPoint,
    Multipliers,
    constraint_hessian_contraction,
    constraint_jacobian,
    multipliers_from_stacked,
    multipliers_least_squares,
    objective,
    projected_stationarity_norm,
)
from .linalg import wrap_angle
from .problem import (
    REGIME_OVER,
    ProblemSpec,
    SolutionCandidate,
    apply_energy_shift,
    constraint_residuals,
    counting_report,
    pair_indices,
    residual_parts,
)

_log = logging.getLogger(__name__)

STATUS_CONVERGED = "CONVERGED"
STATUS_INFEASIBLE = "INFEASIBLE"
STATUS_MAX_ITERS = "MAX_ITERS"

SEED_UNIFORM = "uniform"
SEED_ANALYTIC_PAIR = "analytic-pair"
SEED_RANK_RANDOM = "rank-restricted-random"
SEED_RANDOM = "random"

_PENALTY_CAP = 1e12
_ACTIVE_WEIGHT_TOL = 1e-12


@dataclass(frozen=True)
class SolverConfig:
    """Tolerances, iteration budgets, and multistart controls."""

    max_outer_iters: int = 40
    max_inner_iters: int = 60
    constraint_tol: float = 1e-9
    stationarity_tol: float = 1e-7
    num_starts: int = 16
    rng_seed: int = 0
    penalty_init: float = 10.0
    penalty_growth: float = 5.0
    rank_hint: int | None = None
    ls_regularization: float = 1e-8
    threads: int = 1

    def __post_init__(self):
        if self.constraint_tol <= 0 or self.stationarity_tol <= 0:
            raise ValueError("tolerances must be positive")
        if self.penalty_growth <= 1:
            raise ValueError("penalty_growth must exceed 1")
        if self.penalty_init <= 0 or self.ls_regularization <= 0:
            raise ValueError("penalty_init and ls_regularization must be positive")
        if self.num_starts < 1:
            raise ValueError("num_starts must be at least 1")
        if self.max_outer_iters < 1 or self.max_inner_iters < 1:
            raise ValueError("iteration budgets must be at least 1")
        if self.threads < 1:
            raise ValueError("threads must be at least 1")
        if self.rank_hint is not None and self.rank_hint < 1:
            raise ValueError("rank_hint must be at least 1 when given")


@dataclass(frozen=True)
class StartSummary:
    """Per-start outcome of the multistart loop."""

    index: int
    kind: str
    status: str
    objective: float
    constraint_residual_norm: float
    stationarity_residual_norm: float
    residual_history: tuple[float, ...]


@dataclass(frozen=True)
class SolveResult:
    candidate: SolutionCandidate
    multipliers: Multipliers
    objective_value: float
    constraint_residual_norm: float
    stationarity_residual_norm: float
    status: str
    starts_summary: tuple[StartSummary, ...]


# ---------------------------------------------------------------------------
# packing and evaluation


def _pack(cand: SolutionCandidate) -> np.ndarray:
    return np.concatenate(
        [cand.eigenvalues, np.sqrt(cand.weights), cand.phases[1:]]
    )


def _unpack(z: np.ndarray, n: int):
    return z[:n], z[n : 2 * n], z[2 * n :]


def _retract(z: np.ndarray, n: int) -> np.ndarray:
    out = z.copy()
    s = out[n : 2 * n]
    norm = np.linalg.norm(s)
    if norm < 1e-12:
        s[:] = 1.0 / np.sqrt(n)
    else:
        s /= norm
    return out


def _lam_theta(z: np.ndarray, n: int, m: int):
    eps, s, phi = _unpack(z, n)
    total = float(s @ s)
    lam = (s * s) / total
    theta = np.concatenate([[0.0], phi])
    return eps, s, lam, theta, total


def _residual_vec(spec: ProblemSpec, eps, lam, theta) -> np.ndarray:
    rre, rim = residual_parts(spec.times, spec.gram, eps, lam, theta)
    out = np.empty(2 * rre.size)
    out[0::2] = rre
    out[1::2] = rim
    return out


def _al_value(spec, z, y, rho, w_obj, n, m) -> float:
    eps, _, lam, theta, _ = _lam_theta(z, n, m)
    r = _residual_vec(spec, eps, lam, theta)
    return float(w_obj * (eps @ eps) + y @ r + 0.5 * rho * (r @ r))


def _al_eval(spec, z, y, rho, w_obj, n, m, want_hess: bool):
    """Value, gradient, and (optionally) exact Hessian of the augmented
    Lagrangian in the packed coordinates (eps, s, phi)."""
    eps, s, lam, theta, total = _lam_theta(z, n, m)
    r = _residual_vec(spec, eps, lam, theta)
    val = float(w_obj * (eps @ eps) + y @ r + 0.5 * rho * (r @ r))
    w = y + rho * r
    jac = constraint_jacobian(spec.times, eps, lam, theta)
    g_x = jac.T @ w
    g_x[:n] += 2.0 * w_obj * eps
    g_lam = g_x[n : 2 * n]
    vbar = float(lam @ g_lam)
    g_s = (2.0 / total) * s * (g_lam - vbar)
    g_z = np.concatenate([g_x[:n], g_s, g_x[2 * n + 1 :]])
    if not want_hess:
        return val, g_z, None
    h_x = constraint_hessian_contraction(
        spec.times, eps, lam, theta, w[0::2], w[1::2]
    )
    h_x += rho * (jac.T @ jac)
    h_x[np.arange(n), np.arange(n)] += 2.0 * w_obj
    dim_z = 2 * n + m - 1
    chain = np.zeros((2 * n + m, dim_z))
    chain[:n, :n] = np.eye(n)
    chain[n : 2 * n, n : 2 * n] = (2.0 / total) * (np.diag(s) - np.outer(lam, s))
    chain[2 * n + 1 :, 2 * n :] = np.eye(m - 1)
    h_z = chain.T @ h_x @ chain
    dv = g_lam - vbar
    curv = np.diag((2.0 / total) * dv)
    curv -= (4.0 / total**2) * (np.outer(s * dv, s) + np.outer(s, s * dv))
    h_z[n : 2 * n, n : 2 * n] += curv
    return val, g_z, h_z


# ---------------------------------------------------------------------------
# trust-region Newton


def _trust_region_step(h: np.ndarray, g: np.ndarray, radius: float):
    """Nearly exact solution of min g'p + p'Hp/2 subject to |p| <= radius."""
    vals, vecs = np.linalg.eigh(h)
    gh = vecs.T @ g
    span = max(1.0, float(abs(vals[0])), float(abs(vals[-1])))

    def step_for(nu):
        return -(gh / (vals + nu))

    def model_decrease(p):
        return float(-(gh @ p) - 0.5 * (p @ (vals * p)))

    if vals[0] > 1e-13 * span:
        p = step_for(0.0)
        if np.linalg.norm(p) <= radius:
            return vecs @ p, model_decrease(p)
    nu_lo = max(0.0, float(-vals[0]))
    nu = nu_lo + 1e-11 * span
    pn = float(np.linalg.norm(step_for(nu)))
    if not np.isfinite(pn) or pn < radius:
        # hard case: no gradient component along the lowest eigenspace
        mask = vals - vals[0] <= 1e-10 * span
        safe = np.where(mask, np.inf, vals + nu_lo)
        p = -(gh / safe)
        pn0 = float(np.linalg.norm(p))
        if pn0 < radius:
            extra = np.sqrt(max(radius * radius - pn0 * pn0, 0.0))
            p = p.copy()
            p[int(np.argmin(vals))] += extra
        return vecs @ p, model_decrease(p)
    hi = max(nu, 1e-6 * span)
    for _ in range(200):
        if float(np.linalg.norm(step_for(hi))) < radius:
            break
        hi *= 4.0
    lo = nu
    for _ in range(120):
        mid = 0.5 * (lo + hi)
        if float(np.linalg.norm(step_for(mid))) > radius:
            lo = mid
        else:
            hi = mid
        if hi - lo <= 1e-14 * max(1.0, hi):
            break
    p = step_for(hi)
    return vecs @ p, model_decrease(p)


def _minimize_al(spec, z0, y, rho, w_obj, gtol, max_iters, n, m):
    """Trust-region Newton on the augmented Lagrangian; returns (z, |grad|)."""
    z = _retract(z0, n)
    val, g, h = _al_eval(spec, z, y, rho, w_obj, n, m, want_hess=True)
    radius = 1.0
    for _ in range(max_iters):
        gnorm = float(np.linalg.norm(g))
        if gnorm <= gtol or radius <= 1e-13:
            break
        step = None
        pred = 0.0
        if h is not None and np.all(np.isfinite(h)):
            try:
                step, pred = _trust_region_step(h, g, radius)
            except np.linalg.LinAlgError:
                step = None
        if step is None or not np.isfinite(pred) or pred <= 0.0:
            # fallback: gradient descent with backtracking
            step = -(radius / max(gnorm, 1e-300)) * g
            trial = _al_value(spec, z + step, y, rho, w_obj, n, m)
            shrink = 0
            while trial > val - 1e-4 * gnorm * np.linalg.norm(step) and shrink < 30:
                step *= 0.5
                trial = _al_value(spec, z + step, y, rho, w_obj, n, m)
                shrink += 1
            if trial >= val:
                break
            z = _retract(z + step, n)
            val, g, h = _al_eval(spec, z, y, rho, w_obj, n, m, want_hess=True)
            continue
        trial_z = z + step
        trial_val = _al_value(spec, trial_z, y, rho, w_obj, n, m)
        actual = val - trial_val
        ratio = actual / pred if pred > 0 else -np.inf
        step_norm = float(np.linalg.norm(step))
        if np.isfinite(trial_val) and ratio >= 1e-4:
            z = _retract(trial_z, n)
            val, g, h = _al_eval(spec, z, y, rho, w_obj, n, m, want_hess=True)
            if ratio >= 0.75 and step_norm >= 0.99 * radius:
                radius = min(radius * 2.0, 1e8)
            elif ratio < 0.25:
                radius = max(0.25 * radius, 1e-14)
        else:
            radius = max(0.25 * min(radius, step_norm), 1e-14)
    return z, float(np.linalg.norm(g))


# ---------------------------------------------------------------------------
# stationarity polish


def _polish_system(spec, u, n, m, npairs, active):
    eps = u[:n]
    lam = u[n : 2 * n]
    phi = u[2 * n : 2 * n + m - 1]
    y = u[2 * n + m - 1 : 2 * n + m - 1 + 2 * npairs]
    gamma = u[-1]
    theta = np.concatenate([[0.0], phi])
    jac = constraint_jacobian(spec.times, eps, lam, theta)
    stat = jac.T @ y
    stat[:n] += 2.0 * eps
    stat[n : 2 * n] += gamma
    rows_lam = np.where(active, lam, stat[n : 2 * n])
    rre, rim = residual_parts(spec.times, spec.gram, eps, lam, theta)
    r = np.empty(2 * npairs)
    r[0::2] = rre
    r[1::2] = rim
    f = np.concatenate(
        [stat[:n], rows_lam, stat[2 * n + 1 :], r, [np.sum(lam) - 1.0]]
    )
    # Jacobian of the system
    xsel = np.concatenate([np.arange(2 * n), np.arange(2 * n + 1, 2 * n + m)])
    h_x = constraint_hessian_contraction(spec.times, eps, lam, theta, y[0::2], y[1::2])
    h_x[np.arange(n), np.arange(n)] += 2.0
    size = u.size
    jf = np.zeros((size, size))
    nx = 2 * n + m - 1
    # eps-stationarity rows
    jf[:n, :nx] = h_x[:n][:, xsel]
    jf[:n, nx : nx + 2 * npairs] = jac[:, :n].T
    # weight rows: pinned or stationarity
    lam_rows = h_x[n : 2 * n][:, xsel]
    lam_jac = jac[:, n : 2 * n].T
    for k in range(n):
        if active[k]:
            jf[n + k, n + k] = 1.0
        else:
            jf[n + k, :nx] = lam_rows[k]
            jf[n + k, nx : nx + 2 * npairs] = lam_jac[k]
            jf[n + k, -1] = 1.0
    # phase-stationarity rows
    jf[2 * n : nx, :nx] = h_x[2 * n + 1 :][:, xsel]
    jf[2 * n : nx, nx : nx + 2 * npairs] = jac[:, 2 * n + 1 :].T
    # residual rows
    jf[nx : nx + 2 * npairs, :nx] = jac[:, xsel]
    # normalization row
    jf[-1, n : 2 * n] = 1.0
    return f, jf


def _kkt_polish(spec, eps, lam, theta, y, n, m, max_iters=30):
    """Newton (with step halving) on the full stationarity + feasibility system.

    The active set (weights at zero) is frozen from the augmented-Lagrangian
    solution; strict complementarity is assumed and checked by the caller
    through the reported residual norms.  Returns the refined
    (eps, lam, theta, y, gamma) or None when no improvement was found.
    """
    npairs = y.size // 2
    active = lam <= _ACTIVE_WEIGHT_TOL
    lam0 = np.where(active, 0.0, lam)
    jac = constraint_jacobian(spec.times, eps, lam0, theta)
    q = (jac.T @ y)[n : 2 * n]
    gamma = -float(lam0 @ q)
    u = np.concatenate([eps, lam0, theta[1:], y, [gamma]])
    f, jf = _polish_system(spec, u, n, m, npairs, active)
    fnorm = float(np.linalg.norm(f))
    start_norm = fnorm
    for _ in range(max_iters):
        if fnorm <= 1e-14:
            break
        try:
            delta = np.linalg.solve(jf, -f)
        except np.linalg.LinAlgError:
            delta, *_ = np.linalg.lstsq(jf, -f, rcond=None)
        improved = False
        scale = 1.0
        for _ in range(8):
            trial = u + scale * delta
            ft, jft = _polish_system(spec, trial, n, m, npairs, active)
            ftn = float(np.linalg.norm(ft))
            if np.isfinite(ftn) and ftn < fnorm:
                u, f, jf, fnorm = trial, ft, jft, ftn
                improved = True
                break
            scale *= 0.5
        if not improved:
            break
    if fnorm >= start_norm:
        return None
    eps_p = u[:n]
    lam_p = u[n : 2 * n]
    if np.min(lam_p) < -1e-9:
        return None
    lam_p = np.maximum(lam_p, 0.0)
    total = float(np.sum(lam_p))
    if not 0.5 < total < 1.5:
        return None
    lam_p = lam_p / total
    theta_p = np.concatenate([[0.0], u[2 * n : 2 * n + m - 1]])
    y_p = u[2 * n + m - 1 : 2 * n + m - 1 + 2 * npairs]
    gamma_p = float(u[-1])
    return eps_p, lam_p, theta_p, y_p, gamma_p


# ---------------------------------------------------------------------------
# seeding


def _uniform_applicable(spec: ProblemSpec) -> bool:
    m, n = spec.num_states, spec.dimension
    if m > n:
        return False
    if np.max(np.abs(spec.gram - np.eye(m))) > 1e-8:
        return False
    gaps = np.diff(spec.times)
    return bool(np.ptp(gaps) <= 1e-8 * max(float(np.mean(gaps)), 1e-12))


def _analytic_pair_candidate(spec: ProblemSpec) -> SolutionCandidate:
    n = spec.dimension
    t = float(spec.times[1])
    delta = complex(spec.gram[0, 1])  # <psi_1|psi_2>
    mag = min(1.0, abs(delta))
    eps_val = 0.0 if 1.0 - mag <= 1e-12 else float(np.arccos(mag)) / t
    eps = np.zeros(n)
    eps[0] = eps_val
    eps[1] = -eps_val
    weights = np.zeros(n)
    weights[:2] = 0.5
    theta2 = wrap_angle(-float(np.angle(delta)))
    return SolutionCandidate(eps, weights, np.array([0.0, theta2]))


def _seeds_with_kinds(spec: ProblemSpec, config: SolverConfig):
    n, m = spec.dimension, spec.num_states
    seeds: list[SolutionCandidate] = []
    kinds: list[str] = []
    if _uniform_applicable(spec):
        from .uniform import uniform_seed  # deferred: uniform compares via solve

        gap = float(np.mean(np.diff(spec.times)))
        seeds.append(uniform_seed(n, m, gap).candidate)
        kinds.append(SEED_UNIFORM)
    if m == 2:
        seeds.append(_analytic_pair_candidate(spec))
        kinds.append(SEED_ANALYTIC_PAIR)
    rank = config.rank_hint if config.rank_hint is not None else m
    rank = max(1, min(rank, n))
    scale0 = np.pi / float(np.mean(np.diff(spec.times)))
    idx = 0
    while len(seeds) < config.num_starts:
        rng = np.random.default_rng(
            np.random.SeedSequence(entropy=config.rng_seed, spawn_key=(idx,))
        )
        scale = scale0 * (0.5, 1.0, 2.0)[idx % 3]
        eps = rng.normal(0.0, scale, n)
        eps -= eps.mean()
        if idx % 2 == 0 and rank < n:
            s = np.zeros(n)
            s[:rank] = np.abs(rng.normal(size=rank)) + 0.1
            kind = SEED_RANK_RANDOM
        else:
            s = np.abs(rng.normal(size=n)) + 0.1
            kind = SEED_RANDOM
        lam = (s * s) / float(s @ s)
        theta = rng.uniform(-np.pi, np.pi, m)
        theta[0] = 0.0
        seeds.append(SolutionCandidate(eps, lam, theta))
        kinds.append(kind)
        idx += 1
    return seeds[: config.num_starts], kinds[: config.num_starts]


def seed_candidates(spec: ProblemSpec, config: SolverConfig) -> list[SolutionCandidate]:
    """Deterministic multistart seeds; a shorter list is a prefix of a longer one.

    Analytic seeds come first (the uniform-circle candidate when the instance
    is orthogonal and evenly spaced, the closed-form pair candidate when
    m = 2), followed by rank-restricted and fully random candidates drawn from
    per-index child generators of rng_seed.
    """
    seeds, _ = _seeds_with_kinds(spec, config)
    return seeds


# ---------------------------------------------------------------------------
# per-start drivers


@dataclass
class _Outcome:
    index: int
    kind: str
    status: str
    candidate: SolutionCandidate
    multipliers: Multipliers
    objective: float
    feasibility: float
    stationarity: float
    history: tuple[float, ...]


def _package(spec, config, index, kind, eps, lam, theta, y, gamma, history):
    """Regauge, wrap phases, and measure the final point with the public API."""
    cand = SolutionCandidate(eps, lam / np.sum(lam), theta)
    cand = apply_energy_shift(cand, -float(np.mean(cand.eigenvalues)), spec)
    phases = wrap_angle(cand.phases)
    phases[0] = 0.0
    cand = SolutionCandidate(cand.eigenvalues, cand.weights, phases)
    mult = multipliers_from_stacked(y, gamma)
    point = KktPoint(cand, mult)
    feas = float(np.linalg.norm(constraint_residuals(spec, cand)))
    stat = projected_stationarity_norm(spec, point, active_tol=1e-9)
    if feas <= config.constraint_tol and stat <= config.stationarity_tol:
        status = STATUS_CONVERGED
    elif feas <= config.constraint_tol:
        status = STATUS_MAX_ITERS
    else:
        status = STATUS_INFEASIBLE
    return _Outcome(
        index=index,
        kind=kind,
        status=status,
        candidate=cand,
        multipliers=mult,
        objective=objective(cand),
        feasibility=feas,
        stationarity=stat,
        history=tuple(history),
    )


def _run_start_eoi(spec, seed, config, index, kind) -> _Outcome:
    n, m = spec.dimension, spec.num_states
    npairs = m * (m - 1) // 2
    z = _pack(seed)
    y = np.zeros(2 * npairs)
    rho = config.penalty_init
    feas_prev = np.inf
    history: list[float] = []
    for _ in range(config.max_outer_iters):
        gtol = max(1e-11, min(1e-4, 0.03 * feas_prev))
        z, _ = _minimize_al(spec, z, y, rho, 1.0, gtol, config.max_inner_iters, n, m)
        eps, _, lam, theta, _ = _lam_theta(z, n, m)
        r = _residual_vec(spec, eps, lam, theta)
        feas = float(np.linalg.norm(r))
        history.append(feas)
        y = y + rho * r
        if feas <= max(0.03 * config.constraint_tol, 1e-14):
            break
        if feas <= config.constraint_tol:
            jac = constraint_jacobian(spec.times, eps, lam, theta)
            q = (jac.T @ y)[n : 2 * n]
            gamma = -float(lam @ q)
            mult = multipliers_from_stacked(y, gamma)
            cand = SolutionCandidate(eps, lam / np.sum(lam), theta)
            stat = projected_stationarity_norm(spec, KktPoint(cand, mult))
            if stat <= 0.1 * config.stationarity_tol:
                break
        if feas > 0.5 * feas_prev:
            rho = min(rho * config.penalty_growth, _PENALTY_CAP)
        feas_prev = max(feas, 1e-300)
    eps, _, lam, theta, _ = _lam_theta(z, n, m)
    gamma = 0.0
    jac = constraint_jacobian(spec.times, eps, lam, theta)
    gamma = -float(lam @ (jac.T @ y)[n : 2 * n])
    polish = None
    if history and history[-1] <= 1e-4:
        polish = _kkt_polish(spec, eps, lam, theta, y, n, m)
    if polish is not None:
        eps, lam, theta, y, gamma = polish
        history.append(float(np.linalg.norm(_residual_vec(spec, eps, lam, theta))))
    return _package(spec, config, index, kind, eps, lam, theta, y, gamma, history)


def _run_start_ls(spec, seed, config, index, kind) -> _Outcome:
    n, m = spec.dimension, spec.num_states
    mu = config.ls_regularization
    z = _pack(seed)
    y0 = np.zeros(m * (m - 1))
    history: list[float] = []
    eps, _, lam, theta, _ = _lam_theta(z, n, m)
    best_r = float(np.linalg.norm(_residual_vec(spec, eps, lam, theta)))
    gnorm = np.inf
    converged = False
    for _ in range(config.max_outer_iters):
        z_new, gnorm = _minimize_al(
            spec, z, y0, 2.0, mu,
            max(0.3 * config.stationarity_tol, 1e-12),
            config.max_inner_iters, n, m,
        )
        eps, _, lam, theta, _ = _lam_theta(z_new, n, m)
        r = float(np.linalg.norm(_residual_vec(spec, eps, lam, theta)))
        if r > best_r + 1e-15:
            history.append(best_r)
            break
        z, best_r = z_new, r
        history.append(best_r)
        if gnorm <= config.stationarity_tol:
            converged = True
            break
    # feasibility restoration for (near-)feasible instances
    if config.constraint_tol < best_r <= 1e-3:
        z_rest, _ = _minimize_al(
            spec, z, y0, 2.0, 0.0, 1e-13, 4 * config.max_inner_iters, n, m
        )
        eps, _, lam, theta, _ = _lam_theta(z_rest, n, m)
        r_rest = float(np.linalg.norm(_residual_vec(spec, eps, lam, theta)))
        if r_rest < best_r:
            z, best_r = z_rest, r_rest
            history.append(best_r)
    eps, _, lam, theta, _ = _lam_theta(z, n, m)
    cand = SolutionCandidate(eps, lam / np.sum(lam), theta)
    mult, _ = multipliers_least_squares(spec, cand, active_tol=1e-9)
    out = _package(
        spec, config, index, kind, eps, lam, theta, mult.stacked(), mult.gamma, history
    )
    status = STATUS_CONVERGED if converged else STATUS_MAX_ITERS
    return _Outcome(
        index=out.index,
        kind=out.kind,
        status=status,
        candidate=out.candidate,
        multipliers=out.multipliers,
        objective=out.objective,
        feasibility=out.feasibility,
        stationarity=out.stationarity,
        history=out.history,
    )


# ---------------------------------------------------------------------------
# multistart drivers


def _run_all(spec, config, runner):
    seeds, kinds = _seeds_with_kinds(spec, config)
    indices = range(len(seeds))
    if config.threads > 1:
        with ThreadPoolExecutor(max_workers=config.threads) as pool:
            outcomes = list(
                pool.map(lambda i: runner(spec, seeds[i], config, i, kinds[i]), indices)
            )
    else:
        outcomes = [runner(spec, seeds[i], config, i, kinds[i]) for i in indices]
    return outcomes


def _summaries(outcomes) -> tuple[StartSummary, ...]:
    return tuple(
        StartSummary(
            index=o.index,
            kind=o.kind,
            status=o.status,
            objective=o.objective,
            constraint_residual_norm=o.feasibility,
            stationarity_residual_norm=o.stationarity,
            residual_history=o.history,
        )
        for o in outcomes
    )


def _pick_best(outcomes):
    converged = [o for o in outcomes if o.status == STATUS_CONVERGED]
    if converged:
        best_obj = min(o.objective for o in converged)
        near = [o for o in converged if o.objective <= best_obj + 1e-10]
        return min(near, key=lambda o: (o.feasibility, o.index)), STATUS_CONVERGED
    feasible = [o for o in outcomes if o.status == STATUS_MAX_ITERS]
    if feasible:
        return min(feasible, key=lambda o: (o.objective, o.index)), STATUS_MAX_ITERS
    return min(outcomes, key=lambda o: (o.feasibility, o.index)), STATUS_INFEASIBLE


def _result_from(best: _Outcome, status: str, outcomes) -> SolveResult:
    return SolveResult(
        candidate=best.candidate,
        multipliers=best.multipliers,
        objective_value=best.objective,
        constraint_residual_norm=best.feasibility,
        stationarity_residual_norm=best.stationarity,
        status=status,
        starts_summary=_summaries(outcomes),
    )


def solve(spec: ProblemSpec, config: SolverConfig | None = None) -> SolveResult:
    """Best feasible minimum-energy candidate over all starts.

    The returned candidate is trace-zero gauged.  Raises on overdetermined
    instances (more constraint equations than unknowns); use
    solve_least_squares for those.  Infeasibility is reported through the
    status, not raised.
    """
    config = config if config is not None else SolverConfig()
    if counting_report(spec).regime == REGIME_OVER:
        raise ValueError(
            "overdetermined instance (more constraint equations than unknowns); "
            "use solve_least_squares"
        )
    outcomes = _run_all(spec, config, _run_start_eoi)
    best, status = _pick_best(outcomes)
    _log.info(
        "solve: status=%s objective=%.12g feasibility=%.3e stationarity=%.3e",
        status, best.objective, best.feasibility, best.stationarity,
    )
    return _result_from(best, status, outcomes)


def solve_least_squares(
    spec: ProblemSpec, config: SolverConfig | None = None
) -> SolveResult:
    """Best-effort interpolation: minimize |residual|^2 + mu * sum(eps^2).

    CONVERGED means the gradient of that merit dropped below the stationarity
    tolerance; per-start residual histories (in starts_summary) are
    non-increasing across outer iterations.  On feasible instances the result
    is feasible to constraint_tol and its objective matches solve().
    """
    config = config if config is not None else SolverConfig()
    outcomes = _run_all(spec, config, _run_start_ls)
    mu = config.ls_regularization
    best = min(
        outcomes,
        key=lambda o: (o.feasibility**2 + mu * o.objective, o.index),
    )
    status = best.status
    _log.info(
        "solve_least_squares: status=%s objective=%.12g residual=%.3e",
        status, best.objective, best.feasibility,
    )
    return _result_from(best, status, outcomes)
