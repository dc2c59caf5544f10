"""Independent oracles and random generators shared by the test suite.

Everything here is deliberately written as straight loops or series so it
stays independent of the library code paths it checks.
"""

from __future__ import annotations

import cmath
import math

import numpy as np

from eoi.problem import ProblemSpec, SolutionCandidate


def loop_inner(a, b) -> complex:
    total = 0j
    for x, y in zip(a, b):
        total += complex(x).conjugate() * complex(y)
    return total


def loop_gram(states) -> np.ndarray:
    m = len(states)
    g = np.empty((m, m), dtype=complex)
    for i in range(m):
        for j in range(m):
            g[i, j] = loop_inner(states[i], states[j])
    return g


def series_expm_apply(h, t, psi) -> np.ndarray:
    """exp(-i h t) psi by scaling-and-squaring of a truncated Taylor series."""
    h = np.asarray(h, dtype=complex)
    a = -1j * float(t) * h
    norm = np.max(np.sum(np.abs(a), axis=1)) if a.size else 0.0
    squarings = max(0, int(math.ceil(math.log2(norm))) + 1) if norm > 1e-300 else 0
    b = a / (2.0**squarings)
    u = np.eye(h.shape[0], dtype=complex)
    term = np.eye(h.shape[0], dtype=complex)
    for k in range(1, 30):
        term = term @ b / k
        u = u + term
    for _ in range(squarings):
        u = u @ u
    return u @ np.asarray(psi, dtype=complex)


def loop_constraint_residuals(times, gram, eps, lam, theta) -> np.ndarray:
    """Straight double-loop evaluation of the overlap-matching residuals."""
    m = len(times)
    out = []
    for i in range(1, m):
        for j in range(i):
            total = 0j
            for k in range(len(eps)):
                total += lam[k] * cmath.exp(
                    1j * (eps[k] * (times[i] - times[j]) + theta[i] - theta[j])
                )
            diff = total - complex(gram[i][j])
            out.append(diff.real)
            out.append(diff.imag)
    return np.array(out)


def loop_lagrangian(times, gram, eps, lam, theta, alpha, beta, gamma) -> float:
    """Straight-loop value of the variational function."""
    m = len(times)
    total = sum(e * e for e in eps)
    p = 0
    for i in range(1, m):
        for j in range(i):
            re = 0.0
            im = 0.0
            for k in range(len(eps)):
                arg = eps[k] * (times[i] - times[j]) + theta[i] - theta[j]
                re += lam[k] * math.cos(arg)
                im += lam[k] * math.sin(arg)
            total += alpha[p] * (re - complex(gram[i][j]).real)
            total += beta[p] * (im - complex(gram[i][j]).imag)
            p += 1
    total += gamma * (sum(lam) - 1.0)
    return total


def fd_gradient(fun, x, step=1e-6) -> np.ndarray:
    """Central finite differences with per-coordinate step max(step, step*|x|)."""
    x = np.asarray(x, dtype=float)
    g = np.empty_like(x)
    for k in range(x.size):
        h = max(step, step * abs(x[k]))
        xp = x.copy()
        xm = x.copy()
        xp[k] += h
        xm[k] -= h
        g[k] = (fun(xp) - fun(xm)) / (2.0 * h)
    return g


def random_state(rng, n) -> np.ndarray:
    vec = rng.normal(size=n) + 1j * rng.normal(size=n)
    return vec / np.linalg.norm(vec)


def random_unitary(rng, n) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    q, r = np.linalg.qr(z)
    return q * (np.diagonal(r) / np.abs(np.diagonal(r)))


def random_hermitian(rng, n, scale=1.0) -> np.ndarray:
    z = rng.normal(size=(n, n)) + 1j * rng.normal(size=(n, n))
    return scale * 0.5 * (z + z.conj().T)


def random_candidate(rng, n, m, eps_scale=2.0) -> SolutionCandidate:
    eps = rng.normal(0.0, eps_scale, n)
    lam = rng.uniform(0.2, 1.0, n)
    lam /= lam.sum()
    theta = rng.uniform(-np.pi, np.pi, m)
    theta[0] = 0.0
    return SolutionCandidate(eps, lam, theta)


def random_spec(rng, n, m, tmax=2.0) -> ProblemSpec:
    states = np.array([random_state(rng, n) for _ in range(m)])
    gaps = rng.uniform(0.3, tmax / m, m - 1)
    times = np.concatenate([[0.0], np.cumsum(gaps)])
    return ProblemSpec(states=states, times=times)


def evolved_spec(rng, n, m, eig_scale=1.5, min_gap=0.25):
    """Feasible instance generated by evolving a random Hamiltonian.

    Returns (spec, h_gauged, generating_candidate) where h_gauged is the
    trace-zero shifted generator and the candidate reads off its spectrum,
    weights, and zero phases.
    """
    h = random_hermitian(rng, n, scale=eig_scale / math.sqrt(n))
    h = h - (np.trace(h).real / n) * np.eye(n)
    w, v = np.linalg.eigh(h)
    psi1 = random_state(rng, n)
    gaps = rng.uniform(min_gap, 2.0 * min_gap, m - 1)
    times = np.concatenate([[0.0], np.cumsum(gaps)])
    states = [psi1]
    for t in times[1:]:
        states.append(v @ (np.exp(-1j * w * t) * (v.conj().T @ psi1)))
    spec = ProblemSpec(states=np.array(states), times=times)
    amps = v.conj().T @ psi1
    cand = SolutionCandidate(w, np.abs(amps) ** 2, np.zeros(m))
    return spec, h, cand
