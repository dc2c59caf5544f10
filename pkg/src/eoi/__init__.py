"""Energy-optimal interpolation: synthesize a time-independent Hermitian
Hamiltonian driving a state through prescribed targets at prescribed times
while minimizing tr(H^2), with every solution verified by direct evolution."""

from .brachistochrone import (
    QbpSolution,
    modulus_relation_check,
    qbp_kkt_multipliers,
    qbp_trajectory,
    rotation_angle_for_weight,
    solve_qbp,
)
from .kkt import (
    KktPoint,
    Multipliers,
    lagrangian,
    multipliers_least_squares,
    objective,
    projected_stationarity_norm,
    stationarity_residuals,
)
from .linalg import (
    RankDeficiencyError,
    as_state,
    complete_unitary,
    gram_matrix,
    hermitian_expm_apply,
    inner_product,
    orthonormalize,
    phase_invariant_fidelity,
)
from .problem import (
    CountingReport,
    ProblemSpec,
    SolutionCandidate,
    apply_energy_shift,
    apply_unitary_to_spec,
    constraint_residuals,
    counting_report,
    normalization_residual,
)
from .reconstruct import (
    HamiltonianResult,
    VerificationReport,
    build_frame,
    reconstruct_hamiltonian,
    verify,
)
from .solver import (
    SolveResult,
    SolverConfig,
    StartSummary,
    seed_candidates,
    solve,
    solve_least_squares,
)
from .uniform import (
    StationarityReport,
    UniformSeed,
    circle_sum,
    is_eoi_stationary,
    orthogonal_spec,
    regauged_objective,
    uniform_seed,
)

__version__ = "0.1.0"

__all__ = [
    "CountingReport",
    "HamiltonianResult",
    "KktPoint",
    "Multipliers",
    "ProblemSpec",
    "QbpSolution",
    "RankDeficiencyError",
    "SolutionCandidate",
    "SolveResult",
    "SolverConfig",
    "StartSummary",
    "StationarityReport",
    "UniformSeed",
    "VerificationReport",
    "apply_energy_shift",
    "apply_unitary_to_spec",
    "as_state",
    "build_frame",
    "circle_sum",
    "complete_unitary",
    "constraint_residuals",
    "counting_report",
    "gram_matrix",
    "hermitian_expm_apply",
    "inner_product",
    "is_eoi_stationary",
    "lagrangian",
    "modulus_relation_check",
    "multipliers_least_squares",
    "normalization_residual",
    "objective",
    "orthogonal_spec",
    "orthonormalize",
    "phase_invariant_fidelity",
    "projected_stationarity_norm",
    "qbp_kkt_multipliers",
    "qbp_trajectory",
    "reconstruct_hamiltonian",
    "regauged_objective",
    "rotation_angle_for_weight",
    "seed_candidates",
    "solve",
    "solve_least_squares",
    "solve_qbp",
    "stationarity_residuals",
    "uniform_seed",
    "verify",
]
