"""Absolute pose from one affine correspondence and an oriented point."""

from ._p1ac import (
    AffineCorrespondence,
    LocalizationResult,
    OrientedPoint,
    P1ACError,
    P1ACProblem,
    Pose,
    RansacConfig,
    SolutionSet,
    generate_problem,
    localize_simulated,
    pose_error,
    project,
    projection_differential,
    run_stability,
    solve_3q3,
    solve_p1ac_3q3,
    solve_p1ac_nullspace,
    solve_p3p,
    solve_p3p_1ac,
    unproject,
)

__all__ = [
    "AffineCorrespondence",
    "LocalizationResult",
    "OrientedPoint",
    "P1ACError",
    "P1ACProblem",
    "Pose",
    "RansacConfig",
    "SolutionSet",
    "generate_problem",
    "localize_simulated",
    "pose_error",
    "project",
    "projection_differential",
    "run_stability",
    "solve_3q3",
    "solve_p1ac_3q3",
    "solve_p1ac_nullspace",
    "solve_p3p",
    "solve_p3p_1ac",
    "unproject",
]
