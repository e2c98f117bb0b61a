#pragma once

#include <Eigen/Core>
#include <Eigen/Geometry>

#include "p1ac/errors.h"

namespace p1ac {

// Numerical guard for |q3|, |m| and |n^T u~|. Solvers apply their own, looser,
// cheirality checks on top of this.
inline constexpr double kGeometryEpsilon = 1e-12;

// Rigid transform taking world (or reference) coordinates into a camera frame:
// X_cam = R * X + t.
struct Pose {
  Eigen::Matrix3d R = Eigen::Matrix3d::Identity();
  Eigen::Vector3d t = Eigen::Vector3d::Zero();

  Pose() = default;
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
      : R(rotation), t(translation) {}

  static Pose Identity() { return Pose(); }

  Eigen::Vector3d apply(const Eigen::Vector3d& X) const { return R * X + t; }
  Eigen::Vector3d center() const { return -R.transpose() * t; }
  Pose inverse() const { return Pose(R.transpose(), -R.transpose() * t); }

  // Frobenius norm of R^T R - I.
  double orthogonality_error() const;
  bool is_valid(double tolerance = 1e-9) const;
};

// a * b applies b first, then a.
Pose operator*(const Pose& a, const Pose& b);

// Cayley parameters c = (x, y, z). Undefined for 180 degree rotations.
struct CayleyRotation {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  double s() const { return 1.0 + x * x + y * y + z * z; }
  Eigen::Vector3d vec() const { return {x, y, z}; }
};

// 3D point p = d * [x; 1] in the reference camera, lying on a local plane with
// unit normal n.
struct OrientedPoint {
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  double d = 1.0;
  Eigen::Vector3d n = Eigen::Vector3d(0.0, 0.0, -1.0);

  Eigen::Vector3d point() const { return d * x.homogeneous(); }
};

// Point match x <-> y with the local affine map A (calibrated coordinates).
struct AffineCorrespondence {
  Eigen::Vector2d x = Eigen::Vector2d::Zero();
  Eigen::Vector2d y = Eigen::Vector2d::Zero();
  Eigen::Matrix2d A = Eigen::Matrix2d::Identity();

  // Singular or non-finite A is allowed but makes the problem ill-posed.
  bool is_well_posed() const;
};

struct ProjectionDifferential {
  Eigen::Vector3d q;  // R * p + t
  Eigen::Vector2d v;  // q(0:1) / q(2)
  double m;           // (n^T x~) * q(2)
  Eigen::Matrix2d J;  // derivative of u -> pi(R * unproject(u) + t) at u = x
};

struct PoseError {
  double angular_deg = 0.0;
  double position = 0.0;
};

Eigen::Vector2d project(const Eigen::Vector3d& p,
                        double epsilon = kGeometryEpsilon);

// Intersects the ray through u with the plane of `op`.
Eigen::Vector3d unproject(const Eigen::Vector2d& u, const OrientedPoint& op,
                          double epsilon = kGeometryEpsilon);

ProjectionDifferential projection_differential(
    const Pose& pose, const OrientedPoint& op,
    double epsilon = kGeometryEpsilon);

Eigen::Matrix3d cayley_to_matrix(const CayleyRotation& c);
CayleyRotation matrix_to_cayley(const Eigen::Matrix3d& R);

PoseError pose_error(const Pose& estimate, const Pose& truth);

// Query pose in world coordinates, given the reference camera pose and the
// query pose solved in the reference camera frame.
Pose change_reference_frame(const Pose& ref_pose, const Pose& solved_pose);

Eigen::Matrix3d skew(const Eigen::Vector3d& v);
Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& M);
Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& axis_angle);

}  // namespace p1ac
