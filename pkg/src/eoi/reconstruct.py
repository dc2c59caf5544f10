"""Rebuild a concrete Hamiltonian from an abstract solution and verify it.

A candidate (eps, L, theta) fixes the Hamiltonian only in its eigenbasis.  The
bridge back to the original basis is the frame matrix

    A[k, i] = sqrt(L_k) * exp(-i eps_k t_i),

whose columns are the phased targets expressed in the eigenbasis.  When the
candidate satisfies the overlap-matching constraints, the Gram matrices of the
frame columns and of the phased targets e^{i theta_i} psi_i coincide, so a
unitary T mapping one frame onto the other exists.  T is built by
orthonormalizing both column sets with the same pivot order, extending both to
full bases deterministically, and composing; H = T^dag diag(eps) T.

T is not unique when m < n: any unitary acting on the orthogonal complement of
the evolution subspace works.  The deterministic completion pins a canonical
choice; only the action of H on the evolution subspace is determined by the
data.
"""

from __future__ import annotations

import logging
from dataclasses import dataclass

import numpy as np

from .linalg import (
    TOL_RANK,
    _mgs,
    complete_unitary,
    hermitian_expm_apply,
    hermiticity_defect,
    unitarity_defect,
)
from .problem import ProblemSpec, SolutionCandidate, constraint_residuals

_log = logging.getLogger(__name__)

# A unitary frame transform only exists when the candidate is feasible.
RESIDUAL_PRECONDITION = 1e-7
FIDELITY_PASS = 1.0 - 1e-8


@dataclass(frozen=True)
class HamiltonianResult:
    """Hermitian matrix, diagonalizing unitary, spectrum, and frame matrix."""

    matrix: np.ndarray  # (n, n) Hermitian
    transform: np.ndarray  # (n, n) unitary T with T H T^dag = diag(spectrum)
    spectrum: np.ndarray  # (n,)
    frame: np.ndarray  # (n, m)

    def __post_init__(self):
        h = np.asarray(self.matrix, dtype=np.complex128)
        t = np.asarray(self.transform, dtype=np.complex128)
        e = np.asarray(self.spectrum, dtype=float)
        a = np.asarray(self.frame, dtype=np.complex128)
        n = e.size
        if h.shape != (n, n) or t.shape != (n, n) or a.shape[0] != n:
            raise ValueError("inconsistent shapes in HamiltonianResult")
        if hermiticity_defect(h) > 1e-11:
            raise ValueError("reconstructed matrix is not Hermitian")
        if unitarity_defect(t) > 1e-10:
            raise ValueError("transform is not unitary")
        if np.max(np.abs(t @ h @ t.conj().T - np.diag(e))) > 1e-10:
            raise ValueError("transform does not diagonalize the matrix to the spectrum")
        if abs(np.trace(h).real - np.sum(e)) > 1e-11 or abs(np.trace(h).imag) > 1e-11:
            raise ValueError("trace does not match the spectrum sum")
        for arr in (h, t, a):
            arr.setflags(write=False)
        e = e.copy()
        e.setflags(write=False)
        object.__setattr__(self, "matrix", h)
        object.__setattr__(self, "transform", t)
        object.__setattr__(self, "spectrum", e)
        object.__setattr__(self, "frame", a)


@dataclass(frozen=True)
class VerificationReport:
    """Direct-evolution check of a Hamiltonian against an instance."""

    fidelities: np.ndarray  # (m,) phase-invariant fidelity at each timestamp
    recovered_phases: np.ndarray  # (m,) arg <psi_i| exp(-i H t_i) psi_1>
    objective: float  # tr(H^2)
    trace: float  # tr(H) (real part; H is Hermitian within tolerance)
    hermiticity_residual: float
    passed: bool


def build_frame(cand: SolutionCandidate, times) -> np.ndarray:
    """Frame matrix A[k, i] = sqrt(L_k) exp(-i eps_k t_i); unit columns."""
    times = np.asarray(times, dtype=float)
    amp = np.sqrt(cand.weights)
    return amp[:, None] * np.exp(-1j * np.multiply.outer(cand.eigenvalues, times))


def _phased_targets(spec: ProblemSpec, cand: SolutionCandidate) -> np.ndarray:
    return (np.exp(1j * cand.phases)[:, None] * spec.states).T


def reconstruct_hamiltonian(
    spec: ProblemSpec, cand: SolutionCandidate
) -> HamiltonianResult:
    """Produce H = T^dag diag(eps) T acting correctly on the evolution subspace.

    Requires the candidate's constraint residual norm to be at most
    RESIDUAL_PRECONDITION; the evolution fidelity of the result degrades
    linearly with that residual.  Linearly dependent targets are allowed as
    long as the frame columns show the same dependency pattern.
    """
    resid = constraint_residuals(spec, cand)
    rnorm = float(np.linalg.norm(resid))
    if rnorm > RESIDUAL_PRECONDITION:
        raise ValueError(
            f"candidate is not feasible enough to reconstruct "
            f"(residual norm {rnorm:.3e} > {RESIDUAL_PRECONDITION:.0e})"
        )
    targets = _phased_targets(spec, cand)
    frame = build_frame(cand, spec.times)
    qt, rt, kept_t = _mgs(targets, TOL_RANK, allow_dependent=True, sign_fix=False)
    qf, rf, kept_f = _mgs(frame, TOL_RANK, allow_dependent=True, sign_fix=False)
    if kept_t != kept_f:
        raise ValueError(
            "targets and frame disagree on which columns are linearly dependent; "
            "the candidate does not reproduce the target overlaps"
        )
    if len(kept_t) < spec.num_states:
        _log.info(
            "targets are rank deficient (rank %d of %d); pivot columns %s",
            len(kept_t),
            spec.num_states,
            kept_t,
        )
    coeff_gap = float(np.max(np.abs(rt - rf))) if rt.size else 0.0
    if coeff_gap > max(1e-8, 10.0 * rnorm):
        raise ValueError(
            f"frame and target orthonormalization coefficients differ by "
            f"{coeff_gap:.3e}; overlap structure mismatch"
        )
    full_t = complete_unitary(list(qt.T), dim=spec.dimension)
    full_f = complete_unitary(list(qf.T), dim=spec.dimension)
    transform = full_f @ full_t.conj().T
    eps = np.asarray(cand.eigenvalues, dtype=float)
    h = transform.conj().T @ (eps[:, None] * transform)
    h = 0.5 * (h + h.conj().T)
    return HamiltonianResult(matrix=h, transform=transform, spectrum=eps, frame=frame)


def verify(spec: ProblemSpec, ham) -> VerificationReport:
    """Evolve the first target under the stored matrix and compare per timestamp.

    Accepts a HamiltonianResult or a bare matrix; slightly non-Hermitian input
    is symmetrized for the evolution and reported through the hermiticity
    residual.
    """
    h = np.asarray(getattr(ham, "matrix", ham), dtype=np.complex128)
    defect = hermiticity_defect(h)
    hs = 0.5 * (h + h.conj().T)
    psi1 = spec.states[0]
    fidelities = np.empty(spec.num_states)
    phases = np.empty(spec.num_states)
    for i in range(spec.num_states):
        evolved = hermitian_expm_apply(hs, spec.times[i], psi1)
        overlap = np.vdot(spec.states[i], evolved)
        fidelities[i] = min(1.0, abs(overlap))
        phases[i] = float(np.angle(overlap))
    passed = bool(np.all(fidelities >= FIDELITY_PASS))
    fidelities.setflags(write=False)
    phases.setflags(write=False)
    return VerificationReport(
        fidelities=fidelities,
        recovered_phases=phases,
        objective=float(np.real(np.trace(hs @ hs))),
        trace=float(np.real(np.trace(hs))),
        hermiticity_residual=defect,
        passed=passed,
    )
