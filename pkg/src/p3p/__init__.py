"""Algebraic three-point camera pose estimation.

Recovers up to four camera poses from three bearing-vector / world-point
correspondences by reducing the problem to one quartic polynomial, and
ships the synthetic benchmark used to measure accuracy, stability and
speed of the solver.
"""

from .geometry import (
    BearingVector,
    Correspondence,
    P3pProblem,
    Pose,
    Solution,
    rotation_from_quaternion,
    rotation_to_quaternion,
)
from .quartic import (
    DegenerateLeading,
    NoPolynomial,
    solve_cubic_one_real,
    solve_quartic_adaptive,
    solve_quartic_classical,
    solve_quartic_ferrari_lagrange,
)
from .solver import (
    CollinearPoints,
    DegenerateInput,
    PairwiseData,
    SolverConfig,
    align_pose,
    canonical_reindex,
    compute_pairwise,
    quartic_coefficients,
    recover_depths,
    recover_y,
    refine_depths_gauss_newton,
    solve,
)
from .bench import (
    AggregateReport,
    GroundTruth,
    TimingStats,
    TrialRecord,
    TrialSpec,
    classify,
    generate_problem,
    pose_error,
    run_ablation,
    run_benchmark,
    run_timing,
)

__version__ = "0.1.0"

__all__ = [
    "BearingVector",
    "Correspondence",
    "P3pProblem",
    "Pose",
    "Solution",
    "rotation_from_quaternion",
    "rotation_to_quaternion",
    "DegenerateLeading",
    "NoPolynomial",
    "solve_cubic_one_real",
    "solve_quartic_adaptive",
    "solve_quartic_classical",
    "solve_quartic_ferrari_lagrange",
    "CollinearPoints",
    "DegenerateInput",
    "PairwiseData",
    "SolverConfig",
    "align_pose",
    "canonical_reindex",
    "compute_pairwise",
    "quartic_coefficients",
    "recover_depths",
    "recover_y",
    "refine_depths_gauss_newton",
    "solve",
    "AggregateReport",
    "GroundTruth",
    "TimingStats",
    "TrialRecord",
    "TrialSpec",
    "classify",
    "generate_problem",
    "pose_error",
    "run_ablation",
    "run_benchmark",
    "run_timing",
    "__version__",
]
