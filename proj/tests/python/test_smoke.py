import math

import numpy as np
import pytest

import p1ac


def identity_problem():
    op = p1ac.OrientedPoint(np.array([0.1, -0.05]), 4.0, np.array([0.1, 0.2, -1.0]) / math.sqrt(1.05))
    ac = p1ac.AffineCorrespondence(op.x, op.x, np.eye(2))
    return p1ac.P1ACProblem(ac, op)


def best_error(poses, truth):
    return min(max(p1ac.pose_error(p, truth)) for p in poses)


def test_identity_problem_solvers():
    prob = identity_problem()
    for solve in (p1ac.solve_p1ac_nullspace, p1ac.solve_p1ac_3q3):
        sols = solve(prob)
        assert 1 <= len(sols) <= 8
        assert best_error(sols.poses, p1ac.Pose()) < 1e-8


def test_generated_problem_recovered():
    truth, problems = p1ac.generate_problem(3)
    assert len(problems) == 3
    for solve in (p1ac.solve_p1ac_nullspace, p1ac.solve_p1ac_3q3):
        assert best_error(solve(problems[0]).poses, truth) < 1e-8
    # The affine map is the differential of the warp.
    J = p1ac.projection_differential(truth, problems[0].op)
    assert np.allclose(J, problems[0].ac.A, atol=1e-12)


def test_p3p_and_3q3():
    X = np.array([[0.2, 0, 5], [1, 0.3, 6], [-0.4, 1, 4]], dtype=float)
    u = X[:, :2] / X[:, 2:]
    sols = p1ac.solve_p3p(X, u)
    assert best_error(sols.poses, p1ac.Pose()) < 1e-10

    C = np.zeros((3, 10))
    C[0, 0] = C[1, 3] = C[2, 5] = 1
    C[:, 9] = -1
    roots, residuals = p1ac.solve_3q3(C)
    assert len(roots) == 8
    assert max(residuals) < 1e-12


def test_errors_are_value_errors():
    X = np.array([[-1, -1, 2], [0, 0, 2], [1, 1, 2]], dtype=float)
    with pytest.raises(p1ac.P1ACError):
        p1ac.solve_p3p(X, X[:, :2] / X[:, 2:])
    with pytest.raises(ValueError):
        p1ac.run_stability(2, ["p5p"])


def test_stability_is_deterministic():
    a = p1ac.run_stability(5, ["p3p", "p1ac-3q3"], seed=4, include_timing=False)
    b = p1ac.run_stability(5, ["p3p", "p1ac-3q3"], seed=4, include_timing=False)
    assert a == b
    assert a[0].count("\n") == 11


def test_localize_simulated():
    cfg = p1ac.RansacConfig()
    cfg.seed = 1
    result, truth = p1ac.localize_simulated(200, 0.5, scene_seed=2, config=cfg)
    assert result.succeeded
    ang, pos = p1ac.pose_error(result.pose, truth)
    assert ang < 0.1 and pos < 0.01
