"""Interpolation problem instances, gauge operations, and constraint residuals.

An instance asks for a time-independent Hermitian Hamiltonian H such that
exp(-i H t_i) |psi_1> = e^{i theta_i} |psi_i> for targets psi_1..psi_m at
times t_1=0 < t_2 < ... < t_m.  In the eigenbasis of H the condition reduces
to matching pairwise overlaps: for every pair j < i,

    sum_k  L_k * exp(i [eps_k (t_i - t_j) + theta_i - theta_j])  =  G[i, j],

where eps_k are the eigenvalues, L_k = |<k|psi_1>|^2 are spectral weights and
G is the Gram matrix of the targets.  The residuals of this system, split
into real and imaginary parts, are the constraint vector used throughout the
package.

Gauge conventions: t_1 = 0, theta_1 = 0.  Shifting the energy zero point
(eps_k + d, theta_i - d t_i) leaves the constraints invariant; the solver
reports candidates in the trace-zero gauge sum(eps) = 0, but candidates away
from that gauge are legal values of SolutionCandidate (analytic seed families
use them).
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .linalg import (
    TOL_NORM,
    TOL_UNITARY,
    check_gram,
    gram_matrix,
    unitarity_defect,
)

REGIME_UNDER = "UNDER"
REGIME_SQUARE = "SQUARE"
REGIME_OVER = "OVER"

# Gram matrices this close to the identity are treated as orthogonal targets.
ORTHOGONAL_GRAM_TOL = 1e-8


def pair_indices(m: int) -> tuple[np.ndarray, np.ndarray]:
    """Constraint pair order: (i, j) with j < i, row-major in i then j.

    Returns 0-based index arrays (ii, jj) of length m(m-1)/2.  The residual
    vector interleaves the real and imaginary part of each pair in this
    order, so its layout is [re(2,1), im(2,1), re(3,1), im(3,1), re(3,2), ...]
    in 1-based labels.
    """
    ii, jj = zip(*[(i, j) for i in range(1, m) for j in range(i)])
    return np.asarray(ii, dtype=np.intp), np.asarray(jj, dtype=np.intp)


@dataclass(frozen=True)
class ProblemSpec:
    """Targets, timestamps, and the cached Gram matrix of an instance."""

    states: np.ndarray  # (m, n) rows are target states
    times: np.ndarray  # (m,) strictly increasing, times[0] == 0
    gram: np.ndarray = field(default=None, repr=False)  # type: ignore[assignment]

    def __post_init__(self):
        states = np.asarray(self.states, dtype=np.complex128)
        if states.ndim != 2:
            raise ValueError("states must be an (m, n) array of row vectors")
        m, n = states.shape
        if m < 2:
            raise ValueError("an instance needs at least two target states")
        times = np.asarray(self.times, dtype=float)
        if times.shape != (m,):
            raise ValueError(f"expected {m} timestamps, got {times.shape}")
        if abs(times[0]) > 1e-12:
            raise ValueError("the first timestamp must be 0 (gauge convention)")
        times = times.copy()
        times[0] = 0.0
        if np.any(np.diff(times) <= 0):
            raise ValueError("timestamps must be strictly increasing")
        norms = np.linalg.norm(states, axis=1)
        bad = np.flatnonzero(np.abs(norms - 1.0) > TOL_NORM)
        if bad.size:
            raise ValueError(f"state {bad[0]} is not normalized (|psi| = {norms[bad[0]]!r})")
        gram = self.gram
        if gram is None:
            gram = gram_matrix(list(states))
        else:
            gram = np.asarray(gram, dtype=np.complex128)
        check_gram(gram)
        require_orthogonal_count(gram, n)
        states = states.copy()
        states.setflags(write=False)
        times.setflags(write=False)
        gram = gram.copy()
        gram.setflags(write=False)
        object.__setattr__(self, "states", states)
        object.__setattr__(self, "times", times)
        object.__setattr__(self, "gram", gram)

    @property
    def dimension(self) -> int:
        return self.states.shape[1]

    @property
    def num_states(self) -> int:
        return self.states.shape[0]


def require_orthogonal_count(gram: np.ndarray, dimension: int) -> None:
    """Orthogonal targets must be linearly independent, hence m <= n."""
    m = gram.shape[0]
    if m > dimension and np.max(np.abs(gram - np.eye(m))) <= ORTHOGONAL_GRAM_TOL:
        raise ValueError(
            f"{m} orthogonal targets cannot fit in dimension {dimension} (m <= n required)"
        )


@dataclass(frozen=True)
class SolutionCandidate:
    """A point in the search space: spectrum, spectral weights, target phases.

    weights[k] is L_k = |<k|psi_1>|^2, so weights are nonnegative and sum to
    one.  phases[0] is pinned to zero by the gauge convention.  The trace-zero
    gauge sum(eigenvalues) = 0 is enforced on solver output, not here.
    """

    eigenvalues: np.ndarray  # (n,)
    weights: np.ndarray  # (n,)
    phases: np.ndarray  # (m,)

    def __post_init__(self):
        eps = np.asarray(self.eigenvalues, dtype=float)
        lam = np.asarray(self.weights, dtype=float)
        theta = np.asarray(self.phases, dtype=float)
        if eps.ndim != 1 or lam.shape != eps.shape:
            raise ValueError("eigenvalues and weights must be 1-D of equal length")
        if theta.ndim != 1 or theta.size < 2:
            raise ValueError("phases must be 1-D with at least two entries")
        if np.min(lam) < -1e-12:
            raise ValueError(f"weights must be nonnegative (min {np.min(lam)!r})")
        total = float(np.sum(lam))
        if abs(total - 1.0) > TOL_NORM:
            raise ValueError(f"weights must sum to 1 (sum {total!r})")
        if abs(theta[0]) > 1e-9:
            raise ValueError("phases[0] must be 0 (gauge convention)")
        eps, lam, theta = eps.copy(), np.maximum(lam, 0.0), theta.copy()
        theta[0] = 0.0
        for arr in (eps, lam, theta):
            arr.setflags(write=False)
        object.__setattr__(self, "eigenvalues", eps)
        object.__setattr__(self, "weights", lam)
        object.__setattr__(self, "phases", theta)

    @property
    def dimension(self) -> int:
        return self.eigenvalues.size

    @property
    def num_states(self) -> int:
        return self.phases.size

    def trace_residual(self) -> float:
        """sum(eigenvalues); zero in the trace-zero gauge."""
        return float(np.sum(self.eigenvalues))


def residual_parts(times, gram, eps, lam, theta):
    """Real and imaginary constraint residuals as separate (P,) arrays.

    This is the single evaluation kernel for the overlap-matching system;
    callers that need the interleaved vector use constraint_residuals.
    """
    times = np.asarray(times, dtype=float)
    m = times.size
    ii, jj = pair_indices(m)
    tau = times[ii] - times[jj]
    u = np.multiply.outer(np.asarray(eps, dtype=float), tau)
    u += (np.asarray(theta, dtype=float)[ii] - np.asarray(theta, dtype=float)[jj])[None, :]
    lam = np.asarray(lam, dtype=float)
    target = np.asarray(gram)[ii, jj]
    rre = lam @ np.cos(u) - target.real
    rim = lam @ np.sin(u) - target.imag
    return rre, rim


def _interleave(rre: np.ndarray, rim: np.ndarray) -> np.ndarray:
    out = np.empty(2 * rre.size, dtype=float)
    out[0::2] = rre
    out[1::2] = rim
    return out


def constraint_residuals(spec: ProblemSpec, cand: SolutionCandidate) -> np.ndarray:
    """Residual vector of the overlap-matching system, length m(m-1).

    Ordering: pairs (i, j), j < i, row-major in i then j; real part before
    imaginary part for each pair.  Diagonal pairs reduce to the weight
    normalization and are deliberately excluded.
    """
    if cand.num_states != spec.num_states:
        raise ValueError(
            f"candidate has {cand.num_states} phases, spec has {spec.num_states} states"
        )
    rre, rim = residual_parts(
        spec.times, spec.gram, cand.eigenvalues, cand.weights, cand.phases
    )
    return _interleave(rre, rim)


def normalization_residual(cand: SolutionCandidate) -> float:
    """sum(weights) - 1."""
    return float(np.sum(cand.weights) - 1.0)


def apply_energy_shift(
    cand: SolutionCandidate, delta: float, spec: ProblemSpec
) -> SolutionCandidate:
    """Shift the energy zero point: eps -> eps + delta, theta_i -> theta_i - delta t_i.

    The constraint residuals are invariant because every phase argument
    eps_k (t_i - t_j) + theta_i - theta_j is unchanged; with t_1 = 0 the
    phase gauge theta_1 = 0 is preserved automatically.
    """
    delta = float(delta)
    return SolutionCandidate(
        eigenvalues=cand.eigenvalues + delta,
        weights=cand.weights,
        phases=cand.phases - delta * spec.times,
    )


def apply_unitary_to_spec(spec: ProblemSpec, unitary) -> ProblemSpec:
    """Replace every target psi_i by U psi_i; the Gram matrix is unchanged."""
    u = np.asarray(unitary, dtype=np.complex128)
    if u.shape != (spec.dimension, spec.dimension):
        raise ValueError(
            f"unitary has shape {u.shape}, expected {(spec.dimension, spec.dimension)}"
        )
    defect = unitarity_defect(u)
    if defect > TOL_UNITARY:
        raise ValueError(f"matrix is not unitary (defect {defect:.3e})")
    return ProblemSpec(states=spec.states @ u.T, times=spec.times)


@dataclass(frozen=True)
class CountingReport:
    """Equation/unknown counts for the constraint system and the full
    stationarity system (constraints + multiplier conditions)."""

    num_constraint_equations: int
    num_unknowns: int
    regime: str
    kkt_equations: int
    kkt_unknowns: int


def counting_report(spec: ProblemSpec) -> CountingReport:
    """Classify the instance by comparing m(m-1) equations with 2n+m unknowns."""
    m = spec.num_states
    n = spec.dimension
    equations = m * (m - 1)
    unknowns = 2 * n + m
    if equations < unknowns:
        regime = REGIME_UNDER
    elif equations == unknowns:
        regime = REGIME_SQUARE
    else:
        regime = REGIME_OVER
    kkt = m * m + 2 * n + 1
    return CountingReport(
        num_constraint_equations=equations,
        num_unknowns=unknowns,
        regime=regime,
        kkt_equations=kkt,
        kkt_unknowns=kkt,
    )
