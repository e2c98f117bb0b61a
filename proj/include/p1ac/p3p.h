#pragma once

#include <array>

#include <Eigen/Core>

#include "p1ac/geometry.h"
#include "p1ac/p1ac.h"

namespace p1ac {

struct PointCorrespondence {
  Eigen::Vector3d world_point = Eigen::Vector3d::Zero();
  Eigen::Vector2d observation = Eigen::Vector2d::Zero();  // normalized image
};

// Maps canonical offsets into the reference image around x.
struct CanonicalAffineFrame {
  Eigen::Matrix2d Ax = Eigen::Matrix2d::Identity();
};

// Lambda-Twist style P3P. Up to four poses with all points in front of the
// camera; residuals are max reprojection errors. Throws
// kDegenerateConfiguration for collinear points or coincident rays.
SolutionSet solve_p3p(const PointCorrespondence& c1,
                      const PointCorrespondence& c2,
                      const PointCorrespondence& c3);

// The original correspondence plus the points at x + Ax e_i, i = 1, 2, mapped
// through A and back-projected onto the plane of op. World points use
// ref_pose (world to reference).
std::array<PointCorrespondence, 3> expand_ac_to_points(
    const AffineCorrespondence& ac, const OrientedPoint& op,
    const CanonicalAffineFrame& frame, const Pose& ref_pose = Pose());

CanonicalAffineFrame scale_canonical_frame(const CanonicalAffineFrame& frame,
                                           double scale);

// expand_ac_to_points with Ax = scale * I, then solve_p3p.
SolutionSet solve_p3p_1ac(const P1ACProblem& problem, double scale = 1.0);

}  // namespace p1ac
