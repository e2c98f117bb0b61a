#include "p1ac/geometry.h"

#include <Eigen/SVD>

#include <algorithm>
#include <cmath>
#include <numbers>

namespace p1ac {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateInput: return "degenerate-input";
    case ErrorCode::kGrazingRay: return "grazing-ray";
    case ErrorCode::kDegenerateDifferential: return "degenerate-differential";
    case ErrorCode::kUnrepresentableRotation: return "unrepresentable-rotation";
    case ErrorCode::kDegenerateConstraint: return "degenerate-constraint";
    case ErrorCode::kEliminationSingular: return "elimination-singular";
    case ErrorCode::kDegenerateSystem: return "degenerate-system";
    case ErrorCode::kRankDeficient: return "rank-deficient";
    case ErrorCode::kDegenerateConfiguration: return "degenerate-configuration";
    case ErrorCode::kInsufficientData: return "insufficient-data";
    case ErrorCode::kInvalidArgument: return "invalid-argument";
    case ErrorCode::kIo: return "io";
    case ErrorCode::kFormat: return "format";
  }
  return "unknown";
}

double Pose::orthogonality_error() const {
  return (R.transpose() * R - Eigen::Matrix3d::Identity()).norm();
}

bool Pose::is_valid(double tolerance) const {
  return R.allFinite() && t.allFinite() && orthogonality_error() <= tolerance &&
         std::abs(R.determinant() - 1.0) <= tolerance;
}

Pose operator*(const Pose& a, const Pose& b) {
  return Pose(a.R * b.R, a.R * b.t + a.t);
}

bool AffineCorrespondence::is_well_posed() const {
  return x.allFinite() && y.allFinite() && A.allFinite() &&
         std::abs(A.determinant()) > 0.0;
}

Eigen::Vector2d project(const Eigen::Vector3d& p, double epsilon) {
  if (!(std::abs(p(2)) >= epsilon)) {
    throw Error(ErrorCode::kDegenerateInput,
                "project: point has (near) zero depth");
  }
  return {p(0) / p(2), p(1) / p(2)};
}

Eigen::Vector3d unproject(const Eigen::Vector2d& u, const OrientedPoint& op,
                          double epsilon) {
  const Eigen::Vector3d u_h = u.homogeneous();
  const double denom = op.n.dot(u_h);
  if (!(std::abs(denom) >= epsilon)) {
    throw Error(ErrorCode::kGrazingRay,
                "unproject: ray is parallel to the local plane");
  }
  const double alpha = op.n.dot(op.point()) / denom;
  return alpha * u_h;
}

ProjectionDifferential projection_differential(const Pose& pose,
                                               const OrientedPoint& op,
                                               double epsilon) {
  const Eigen::Vector3d x_h = op.x.homogeneous();
  const double n_dot_x = op.n.dot(x_h);

  ProjectionDifferential out;
  out.q = pose.R * (op.d * x_h) + pose.t;
  if (!(std::abs(out.q(2)) >= epsilon)) {
    throw Error(ErrorCode::kDegenerateInput,
                "projection_differential: point on the query principal plane");
  }
  out.m = n_dot_x * out.q(2);
  if (!(std::abs(out.m) >= epsilon)) {
    throw Error(ErrorCode::kDegenerateDifferential,
                "projection_differential: |m| below epsilon");
  }
  out.v = out.q.head<2>() / out.q(2);

  const Eigen::Matrix2d rot_part =
      pose.R.topLeftCorner<2, 2>() - out.v * pose.R.block<1, 2>(2, 0);
  const Eigen::Vector2d trans_part = pose.t.head<2>() - pose.t(2) * out.v;
  out.J = (op.d * n_dot_x * rot_part +
           trans_part * op.n.head<2>().transpose()) /
          out.m;
  return out;
}

Eigen::Matrix3d cayley_to_matrix(const CayleyRotation& c) {
  const double x = c.x, y = c.y, z = c.z;
  const double xx = x * x, yy = y * y, zz = z * z;
  Eigen::Matrix3d R;
  R << 1 + xx - yy - zz, 2 * (x * y - z), 2 * (y + x * z),
       2 * (x * y + z), 1 - xx + yy - zz, 2 * (y * z - x),
       2 * (x * z - y), 2 * (x + y * z), 1 - xx - yy + zz;
  return R / c.s();
}

CayleyRotation matrix_to_cayley(const Eigen::Matrix3d& R) {
  // R - R^T = 4 [c]_x / s and 1 + trace(R) = 4 / s.
  const double denom = 1.0 + R.trace();
  if (!(std::abs(denom) >= 1e-10)) {
    throw Error(ErrorCode::kUnrepresentableRotation,
                "matrix_to_cayley: rotation angle is 180 degrees");
  }
  return {(R(2, 1) - R(1, 2)) / denom, (R(0, 2) - R(2, 0)) / denom,
          (R(1, 0) - R(0, 1)) / denom};
}

PoseError pose_error(const Pose& estimate, const Pose& truth) {
  // Explicit loops keep pose_error(a, b) and pose_error(b, a) bitwise equal.
  Eigen::Matrix3d D;
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      double acc = 0.0;
      for (int k = 0; k < 3; ++k) acc += estimate.R(i, k) * truth.R(j, k);
      D(i, j) = acc;
    }
  }
  const double cos_part = 0.5 * (D.trace() - 1.0);
  const Eigen::Vector3d vee(D(2, 1) - D(1, 2), D(0, 2) - D(2, 0),
                            D(1, 0) - D(0, 1));
  const double sin_part = 0.5 * vee.norm();
  const double angle = std::atan2(sin_part, cos_part);

  PoseError err;
  err.angular_deg = std::clamp(angle * 180.0 / std::numbers::pi, 0.0, 180.0);
  err.position = (estimate.center() - truth.center()).norm();
  return err;
}

Pose change_reference_frame(const Pose& ref_pose, const Pose& solved_pose) {
  return solved_pose * ref_pose;
}

Eigen::Matrix3d skew(const Eigen::Vector3d& v) {
  Eigen::Matrix3d S;
  S << 0, -v(2), v(1),
       v(2), 0, -v(0),
       -v(1), v(0), 0;
  return S;
}

Eigen::Matrix3d nearest_rotation(const Eigen::Matrix3d& M) {
  Eigen::JacobiSVD<Eigen::Matrix3d> svd(M,
                                        Eigen::ComputeFullU | Eigen::ComputeFullV);
  Eigen::Matrix3d U = svd.matrixU();
  const Eigen::Matrix3d V = svd.matrixV();
  if ((U * V.transpose()).determinant() < 0.0) U.col(2) *= -1.0;
  return U * V.transpose();
}

Eigen::Matrix3d rotation_from_axis_angle(const Eigen::Vector3d& axis_angle) {
  const double angle = axis_angle.norm();
  if (angle < 1e-300) return Eigen::Matrix3d::Identity();
  return Eigen::AngleAxisd(angle, axis_angle / angle).toRotationMatrix();
}

}  // namespace p1ac
