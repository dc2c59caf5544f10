"""Closed-form solution for the two-target case.

For a single pair (psi_1 -> psi_2 in time t) the optimal Hamiltonian rotates
the state along the geodesic in the two-dimensional subspace spanned by the
targets.  With D = <psi_1|psi_2> and phi = arg(D):

    eps      = arccos(|D|) / t            (principal branch, minimal energy)
    tr(H^2)  = 2 eps^2
    psi_perp = (e^{-i phi} psi_2 - |D| psi_1) / sqrt(1 - |D|^2)
    H        = i eps (|psi_perp><psi_1| - |psi_1><psi_perp|)

H is Hermitian, traceless, rank <= 2, with spectrum {+eps, -eps, 0, ...}.
The abstract candidate carries equal weights 1/2 on the +/-eps levels and
target phase theta_2 = -phi, which makes the phased overlap real nonnegative
at the optimum.

The supporting modulus relation is |D|^2 = 1 - 4 L (1 - L) sin^2(eps t); note
its required rotation angle is minimized at L = 1/2, which is where the eps
formula above comes from.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .kkt import Multipliers
from .linalg import as_state, complete_unitary, wrap_angle
from .problem import ProblemSpec, SolutionCandidate
from .reconstruct import HamiltonianResult, build_frame

# Overlap magnitudes this close to 1 mean the states agree up to a phase
# (Cauchy-Schwarz) and the zero Hamiltonian is the solution.
DEGENERATE_OVERLAP = 1e-12


@dataclass(frozen=True)
class QbpSolution:
    """Analytic two-target solution: scalars, candidate, matrix, geodesic basis."""

    epsilon: float  # energy half-gap, >= 0
    weight: float  # spectral weight on each active level (1/2)
    theta: float  # arg <psi_1|psi_2>
    objective: float  # 2 eps^2 = tr(H^2)
    omega: float  # angular speed of the geodesic, equal to eps
    evolution_time: float
    overlap: complex  # <psi_1|psi_2>
    candidate: SolutionCandidate
    hamiltonian: HamiltonianResult
    psi_start: np.ndarray
    psi_perp: np.ndarray | None  # None in the degenerate (zero-distance) case

    @property
    def degenerate(self) -> bool:
        return self.psi_perp is None


def solve_qbp(psi1, psi2, t: float) -> QbpSolution:
    """Analytic minimal-energy Hamiltonian driving psi1 to psi2 in time t."""
    if t <= 0:
        raise ValueError("evolution time must be positive")
    psi1 = as_state(psi1)
    psi2 = as_state(psi2, dim=psi1.size)
    n = psi1.size
    if n < 2:
        raise ValueError("two-target interpolation needs dimension >= 2")
    overlap = complex(np.vdot(psi1, psi2))
    mag = min(1.0, abs(overlap))
    theta = float(np.angle(overlap))
    weights = np.zeros(n)
    weights[:2] = 0.5
    theta2 = wrap_angle(-theta)

    if 1.0 - mag <= DEGENERATE_OVERLAP:
        eps = 0.0
        spectrum = np.zeros(n)
        candidate = SolutionCandidate(spectrum, weights, np.array([0.0, theta2]))
        amp = np.sqrt(weights)
        transform = (
            complete_unitary([amp]) @ complete_unitary([psi1]).conj().T
        )
        ham = HamiltonianResult(
            matrix=np.zeros((n, n), dtype=np.complex128),
            transform=transform,
            spectrum=spectrum,
            frame=build_frame(candidate, np.array([0.0, t])),
        )
        return QbpSolution(
            epsilon=0.0,
            weight=0.5,
            theta=theta,
            objective=0.0,
            omega=0.0,
            evolution_time=float(t),
            overlap=overlap,
            candidate=candidate,
            hamiltonian=ham,
            psi_start=psi1,
            psi_perp=None,
        )

    eps = float(np.arccos(mag)) / float(t)
    perp = (np.exp(-1j * theta) * psi2 - mag * psi1) / np.sqrt(1.0 - mag * mag)
    perp = perp / np.linalg.norm(perp)
    h = 1j * eps * (np.outer(perp, psi1.conj()) - np.outer(psi1, perp.conj()))
    h = 0.5 * (h + h.conj().T)
    spectrum = np.zeros(n)
    spectrum[0] = eps
    spectrum[1] = -eps
    # Eigenvectors of the geodesic generator for +eps / -eps.
    v_plus = (psi1 + 1j * perp) / np.sqrt(2.0)
    v_minus = (psi1 - 1j * perp) / np.sqrt(2.0)
    transform = complete_unitary([v_plus, v_minus]).conj().T
    candidate = SolutionCandidate(spectrum, weights, np.array([0.0, theta2]))
    ham = HamiltonianResult(
        matrix=h,
        transform=transform,
        spectrum=spectrum,
        frame=build_frame(candidate, np.array([0.0, t])),
    )
    return QbpSolution(
        epsilon=eps,
        weight=0.5,
        theta=theta,
        objective=2.0 * eps * eps,
        omega=eps,
        evolution_time=float(t),
        overlap=overlap,
        candidate=candidate,
        hamiltonian=ham,
        psi_start=psi1,
        psi_perp=perp,
    )


def qbp_trajectory(sol: QbpSolution, tau: float) -> np.ndarray:
    """Geodesic state cos(eps tau) psi_1 + sin(eps tau) psi_perp at time tau >= 0."""
    if tau < 0:
        raise ValueError("trajectory time must be nonnegative")
    if sol.degenerate:
        return sol.psi_start.copy()
    angle = sol.epsilon * float(tau)
    return np.cos(angle) * sol.psi_start + np.sin(angle) * sol.psi_perp


def modulus_relation_check(weight: float, eps_t: float, delta_abs: float) -> float:
    """Residual of |D|^2 = 1 - 4 L (1 - L) sin^2(eps t); zero when consistent."""
    s = np.sin(float(eps_t))
    return float(delta_abs) ** 2 - (1.0 - 4.0 * float(weight) * (1.0 - float(weight)) * s * s)


def rotation_angle_for_weight(weight: float, delta_abs: float) -> float:
    """Rotation angle eps*t forced by the modulus relation at a given weight.

    Returns arcsin(sqrt((1 - |D|^2) / (4 L (1 - L)))); NaN when the argument
    exceeds 1, i.e. when no rotation angle can satisfy the relation at that
    weight.  Minimized over L at L = 1/2 where it equals arccos|D|.
    """
    weight = float(weight)
    if not 0.0 < weight < 1.0:
        return float("nan")
    arg = (1.0 - float(delta_abs) ** 2) / (4.0 * weight * (1.0 - weight))
    if arg > 1.0 + 1e-12:
        return float("nan")
    return float(np.arcsin(np.sqrt(min(arg, 1.0))))


def qbp_kkt_multipliers(sol: QbpSolution, spec: ProblemSpec) -> Multipliers:
    """Multipliers making the stationarity system vanish at the analytic point.

    Solves the two energy-stationarity rows together with the phase
    stationarity row for (alpha, beta) by least squares (the pure 2x2 system
    degenerates at |D| = 0), then recovers gamma from the weight block.
    Weight-block entries for the inactive levels (L_k = 0, n > 2) carry the
    usual complementarity slack and are not driven to zero.
    """
    if sol.epsilon <= 0.0:
        raise ValueError("multiplier system is singular at eps = 0")
    if spec.num_states != 2:
        raise ValueError("expected a two-target instance")
    t = float(spec.times[1])
    eps = sol.epsilon
    theta2 = float(sol.candidate.phases[1])
    u1 = eps * t + theta2
    u2 = -eps * t + theta2
    rows = np.array(
        [
            [np.sin(u1), -np.cos(u1)],
            [np.sin(u2), -np.cos(u2)],
            [
                -0.5 * (np.sin(u1) + np.sin(u2)),
                0.5 * (np.cos(u1) + np.cos(u2)),
            ],
        ]
    )
    rhs = np.array([4.0 * eps / t, -4.0 * eps / t, 0.0])
    (alpha, beta), *_ = np.linalg.lstsq(rows, rhs, rcond=None)
    q1 = alpha * np.cos(u1) + beta * np.sin(u1)
    q2 = alpha * np.cos(u2) + beta * np.sin(u2)
    gamma = -0.5 * (q1 + q2)
    return Multipliers(alpha=np.array([alpha]), beta=np.array([beta]), gamma=float(gamma))
