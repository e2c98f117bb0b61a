#include "p1ac/constraints.h"

#include <cmath>

namespace p1ac {
namespace {

// Cayley numerator s*R, row-major, as combinations of
// [x^2, xy, xz, y^2, yz, z^2, x, y, z, 1].
Eigen::Matrix<double, 9, 10> cayley_numerator_map() {
  Eigen::Matrix<double, 9, 10> C = Eigen::Matrix<double, 9, 10>::Zero();
  enum { XX, XY, XZ, YY, YZ, ZZ, X, Y, Z, ONE };
  // r11 = 1 + x^2 - y^2 - z^2
  C(0, XX) = 1; C(0, YY) = -1; C(0, ZZ) = -1; C(0, ONE) = 1;
  // r12 = 2(xy - z)
  C(1, XY) = 2; C(1, Z) = -2;
  // r13 = 2(y + xz)
  C(2, XZ) = 2; C(2, Y) = 2;
  // r21 = 2(xy + z)
  C(3, XY) = 2; C(3, Z) = 2;
  // r22 = 1 - x^2 + y^2 - z^2
  C(4, XX) = -1; C(4, YY) = 1; C(4, ZZ) = -1; C(4, ONE) = 1;
  // r23 = 2(yz - x)
  C(5, YZ) = 2; C(5, X) = -2;
  // r31 = 2(xz - y)
  C(6, XZ) = 2; C(6, Y) = -2;
  // r32 = 2(x + yz)
  C(7, X) = 2; C(7, YZ) = 2;
  // r33 = 1 - x^2 - y^2 + z^2
  C(8, XX) = -1; C(8, YY) = -1; C(8, ZZ) = 1; C(8, ONE) = 1;
  return C;
}

void check_oriented_point(const OrientedPoint& op) {
  if (!(std::abs(op.n.dot(op.x.homogeneous())) >= kGeometryEpsilon)) {
    throw Error(ErrorCode::kDegenerateConstraint,
                "constraint system: plane normal is orthogonal to the ray");
  }
}

}  // namespace

PoseVector vectorize_pose(const Pose& pose) {
  PoseVector v;
  v << pose.R(0, 0), pose.R(0, 1), pose.R(0, 2),
       pose.R(1, 0), pose.R(1, 1), pose.R(1, 2),
       pose.R(2, 0), pose.R(2, 1), pose.R(2, 2),
       pose.t(0), pose.t(1), pose.t(2);
  return v;
}

QuadricMonomials quadric_monomials(const Eigen::Vector3d& p) {
  const double x = p(0), y = p(1), z = p(2);
  QuadricMonomials m;
  m << x * x, x * y, x * z, y * y, y * z, z * z, x, y, z, 1.0;
  return m;
}

CayleyMonomials cayley_monomials(const CayleyRotation& c,
                                 const Eigen::Vector3d& t) {
  CayleyMonomials m;
  m.head<3>() = c.s() * t;
  m.tail<10>() = quadric_monomials(c.vec());
  return m;
}

LinearConstraintSystem build_linear_system(const AffineCorrespondence& ac,
                                           const OrientedPoint& op,
                                           bool normalize_rows) {
  check_oriented_point(op);
  const Eigen::Vector3d x_h = op.x.homogeneous();
  const Eigen::Vector3d p = op.d * x_h;
  const double nx = op.n.dot(x_h);
  const Eigen::Vector2d& y = ac.y;

  LinearConstraintSystem sys;
  Eigen::Matrix<double, 6, 12>& M = sys.M;
  M.setZero();

  // y_i (r3 p + t3) - (r_i p + t_i) = 0
  for (int i = 0; i < 2; ++i) {
    M.block<1, 3>(i, 6) += y(i) * p.transpose();
    M(i, 11) += y(i);
    M.block<1, 3>(i, 3 * i) -= p.transpose();
    M(i, 9 + i) -= 1.0;
  }

  // m a_ij - m j_ij = 0 with m = nx (d r3 x~ + t3) and
  // m J = d nx (R_{1:2,1:2} - y R_{3,1:2}) + (t_{1:2} - t3 y) n_{1:2}^T.
  int row = 2;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j, ++row) {
      const double a = ac.A(i, j);
      M.block<1, 3>(row, 6) += a * nx * op.d * x_h.transpose();
      M(row, 11) += a * nx;
      M(row, 3 * i + j) -= op.d * nx;
      M(row, 6 + j) += op.d * nx * y(i);
      M(row, 9 + i) -= op.n(j);
      M(row, 11) += y(i) * op.n(j);
    }
  }

  if (normalize_rows) {
    for (int r = 0; r < 6; ++r) {
      const double norm = M.row(r).norm();
      if (norm > 0.0) M.row(r) /= norm;
    }
  }
  return sys;
}

MonomialConstraintSystem to_monomial_system(const LinearConstraintSystem& sys) {
  static const Eigen::Matrix<double, 9, 10> kNumerator = cayley_numerator_map();
  MonomialConstraintSystem out;
  out.M.leftCols<3>() = sys.M.rightCols<3>();
  out.M.rightCols<10>() = sys.M.leftCols<9>() * kNumerator;
  return out;
}

MonomialConstraintSystem build_monomial_system(const AffineCorrespondence& ac,
                                               const OrientedPoint& op,
                                               bool normalize_rows) {
  return to_monomial_system(build_linear_system(ac, op, normalize_rows));
}

ReducedQuadricSystem eliminate_translation(const MonomialConstraintSystem& sys) {
  Eigen::Matrix<double, 6, 13> G = sys.M;
  const double scale = G.leftCols<3>().cwiseAbs().maxCoeff();
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::kEliminationSingular,
                "eliminate_translation: translation block is zero");
  }

  for (int col = 0; col < 3; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 6; ++r) {
      if (std::abs(G(r, col)) > std::abs(G(pivot, col))) pivot = r;
    }
    if (std::abs(G(pivot, col)) < 1e-10 * scale) {
      throw Error(ErrorCode::kEliminationSingular,
                  "eliminate_translation: translation block is rank deficient");
    }
    G.row(col).swap(G.row(pivot));
    G.row(col) /= G(col, col);
    for (int r = 0; r < 6; ++r) {
      if (r != col) G.row(r) -= G(r, col) * G.row(col);
    }
  }

  ReducedQuadricSystem out;
  out.C = G.block<3, 10>(3, 3);
  for (int r = 0; r < 3; ++r) {
    const double norm = out.C.row(r).norm();
    if (norm > 0.0) out.C.row(r) /= norm;
  }
  out.translation_map = -G.block<3, 10>(0, 3);
  return out;
}

}  // namespace p1ac
