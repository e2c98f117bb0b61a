#include "p1ac/p3p.h"

#include <Eigen/Eigenvalues>
#include <Eigen/LU>

#include <algorithm>
#include <cmath>

#include "p1ac/errors.h"
#include "p1ac/univariate.h"

namespace p1ac {
namespace {

// sum_i a_i . (b_j x b_k) over cyclic (i, j, k)
double mixed_trace(const Eigen::Matrix3d& A, const Eigen::Matrix3d& B) {
  return A.col(0).dot(B.col(1).cross(B.col(2))) +
         A.col(1).dot(B.col(2).cross(B.col(0))) +
         A.col(2).dot(B.col(0).cross(B.col(1)));
}

// Depths along unit bearings: lambda^T M_ij lambda = a_ij.
struct DepthSystem {
  double b01, b02, b12;
  double a01, a02, a12;

  Eigen::Vector3d residual(const Eigen::Vector3d& l) const {
    return {l(0) * l(0) + l(1) * l(1) - 2 * b01 * l(0) * l(1) - a01,
            l(0) * l(0) + l(2) * l(2) - 2 * b02 * l(0) * l(2) - a02,
            l(1) * l(1) + l(2) * l(2) - 2 * b12 * l(1) * l(2) - a12};
  }

  Eigen::Matrix3d jacobian(const Eigen::Vector3d& l) const {
    Eigen::Matrix3d J;
    J << 2 * (l(0) - b01 * l(1)), 2 * (l(1) - b01 * l(0)), 0,
         2 * (l(0) - b02 * l(2)), 0, 2 * (l(2) - b02 * l(0)),
         0, 2 * (l(1) - b12 * l(2)), 2 * (l(2) - b12 * l(1));
    return J;
  }

  void refine(Eigen::Vector3d& l) const {
    for (int iter = 0; iter < 5; ++iter) {
      const Eigen::Vector3d r = residual(l);
      if (r.cwiseAbs().maxCoeff() < 1e-15 * (a01 + a02 + a12)) break;
      const Eigen::Matrix3d J = jacobian(l);
      const double det = J.determinant();
      if (std::abs(det) < 1e-300) break;
      const Eigen::Vector3d step = J.inverse() * r;
      if (!step.allFinite()) break;
      l -= step;
    }
  }
};

}  // namespace

SolutionSet solve_p3p(const PointCorrespondence& c1,
                      const PointCorrespondence& c2,
                      const PointCorrespondence& c3) {
  const std::array<Eigen::Vector3d, 3> X = {c1.world_point, c2.world_point,
                                            c3.world_point};
  std::array<Eigen::Vector3d, 3> y;
  const std::array<const PointCorrespondence*, 3> cs = {&c1, &c2, &c3};
  for (int i = 0; i < 3; ++i) {
    if (!X[i].allFinite() || !cs[i]->observation.allFinite()) {
      throw Error(ErrorCode::kInvalidArgument, "solve_p3p: non-finite input");
    }
    y[i] = cs[i]->observation.homogeneous().normalized();
  }

  const Eigen::Vector3d X01 = X[0] - X[1], X02 = X[0] - X[2];
  const double a01 = X01.squaredNorm();
  const double a02 = X02.squaredNorm();
  const double a12 = (X[1] - X[2]).squaredNorm();
  const double scale = std::max({a01, a02, a12});
  if (!(X01.cross(X02).norm() > 1e-10 * scale)) {
    throw Error(ErrorCode::kDegenerateConfiguration,
                "solve_p3p: world points are collinear");
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = i + 1; j < 3; ++j) {
      if (!(y[i].cross(y[j]).norm() > 1e-12)) {
        throw Error(ErrorCode::kDegenerateConfiguration,
                    "solve_p3p: coincident observation rays");
      }
    }
  }

  const DepthSystem sys{y[0].dot(y[1]), y[0].dot(y[2]), y[1].dot(y[2]),
                        a01, a02, a12};
  Eigen::Matrix3d M01, M02, M12;
  M01 << 1, -sys.b01, 0, -sys.b01, 1, 0, 0, 0, 0;
  M02 << 1, 0, -sys.b02, 0, 0, 0, -sys.b02, 0, 1;
  M12 << 0, 0, 0, 0, 1, -sys.b12, 0, -sys.b12, 1;

  // lambda^T (D1 + g D2) lambda = 0 for every g.
  const Eigen::Matrix3d D1 = a12 * M01 - a01 * M12;
  const Eigen::Matrix3d D2 = a12 * M02 - a02 * M12;

  const double coeffs[4] = {D1.determinant(), mixed_trace(D2, D1),
                            mixed_trace(D1, D2), D2.determinant()};
  double gammas[3];
  int num_gammas = 0;
  const double cmax = std::max({std::abs(coeffs[0]), std::abs(coeffs[1]),
                                std::abs(coeffs[2]), std::abs(coeffs[3])});
  if (std::abs(coeffs[3]) > 1e-12 * cmax) {
    num_gammas = solve_monic_cubic(coeffs[2] / coeffs[3], coeffs[1] / coeffs[3],
                                   coeffs[0] / coeffs[3], gammas);
  } else {
    const std::vector<double> r = real_roots_sturm(std::span<const double>(coeffs, 3));
    for (const double g : r) gammas[num_gammas++] = g;
  }
  // Largest root first; it is the one a rank-2 indefinite conic is expected at.
  std::sort(gammas, gammas + num_gammas, [](double a, double b) { return a > b; });

  SolutionSet out;
  for (int gi = 0; gi < num_gammas && out.empty(); ++gi) {
    const Eigen::Matrix3d D0 = D1 + gammas[gi] * D2;
    const Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> es(D0);
    const Eigen::Vector3d ev = es.eigenvalues();
    int null_index = 0;
    for (int i = 1; i < 3; ++i) {
      if (std::abs(ev(i)) < std::abs(ev(null_index))) null_index = i;
    }
    const int i0 = (null_index + 1) % 3, i1 = (null_index + 2) % 3;
    const double s0 = ev(i0), s1 = ev(i1);
    if (!(s0 * s1 < 0.0)) continue;
    const Eigen::Vector3d e0 = es.eigenvectors().col(i0);
    const Eigen::Vector3d e1 = es.eigenvectors().col(i1);
    const double s = std::sqrt(-s1 / s0);

    std::vector<Eigen::Vector3d> depths;
    for (const double sign : {1.0, -1.0}) {
      // lambda lies on the plane w^T lambda = 0.
      const Eigen::Vector3d w = e0 - sign * s * e1;
      Eigen::Vector3d u = w.unitOrthogonal();
      Eigen::Vector3d v = w.cross(u).normalized();
      Eigen::Matrix<double, 3, 2> P;
      P << u, v;
      Eigen::Matrix2d Q1 = P.transpose() * D1 * P;
      const Eigen::Matrix2d Q2 = P.transpose() * D2 * P;
      if (Q2.norm() > Q1.norm()) Q1 = Q2;

      double ts[2];
      int nt;
      const bool alpha_free = std::abs(Q1(0, 0)) >= std::abs(Q1(1, 1));
      if (alpha_free) {
        nt = solve_quadratic(Q1(0, 0), 2 * Q1(0, 1), Q1(1, 1), ts);
      } else {
        nt = solve_quadratic(Q1(1, 1), 2 * Q1(0, 1), Q1(0, 0), ts);
      }
      for (int k = 0; k < nt; ++k) {
        const Eigen::Vector2d ab = alpha_free ? Eigen::Vector2d(ts[k], 1.0)
                                              : Eigen::Vector2d(1.0, ts[k]);
        Eigen::Vector3d d = P * ab;
        const double q = d.dot(M01 * d);
        if (!(q > 0.0)) continue;
        d *= std::sqrt(a01 / q);
        if (d.sum() < 0.0) d = -d;
        if (!(d.minCoeff() > 0.0)) continue;
        depths.push_back(d);
      }
    }

    const Eigen::Vector3d X12x = X01.cross(X02);
    Eigen::Matrix3d Xm;
    Xm << X01, X02, X12x;
    const Eigen::Matrix3d Xinv = Xm.inverse();
    for (Eigen::Vector3d& l : depths) {
      sys.refine(l);
      if (!(l.minCoeff() > 0.0) || !l.allFinite()) continue;
      const Eigen::Vector3d Y0 = l(0) * y[0], Y1 = l(1) * y[1], Y2 = l(2) * y[2];
      const Eigen::Vector3d Y01 = Y0 - Y1, Y02 = Y0 - Y2;
      Eigen::Matrix3d Ym;
      Ym << Y01, Y02, Y01.cross(Y02);
      Pose pose;
      pose.R = Ym * Xinv;
      pose.t = Y0 - pose.R * X[0];
      const double err = pose.orthogonality_error();
      if (!pose.R.allFinite() || err > 1e-4) continue;
      if (err > 1e-9) pose.R = nearest_rotation(pose.R);
      if (pose.R.determinant() < 0.0) continue;

      double residual = 0.0;
      for (int i = 0; i < 3; ++i) {
        const Eigen::Vector3d q = pose.apply(X[i]);
        residual = std::max(residual,
                            (q.hnormalized() - cs[i]->observation).norm());
      }
      bool duplicate = false;
      for (const Pose& other : out.poses) {
        if ((other.R - pose.R).norm() < 1e-12 && (other.t - pose.t).norm() < 1e-12) {
          duplicate = true;
        }
      }
      if (!duplicate && out.size() < 4) out.add(pose, residual, true);
    }
  }
  return out;
}

std::array<PointCorrespondence, 3> expand_ac_to_points(
    const AffineCorrespondence& ac, const OrientedPoint& op,
    const CanonicalAffineFrame& frame, const Pose& ref_pose) {
  const Pose to_world = ref_pose.inverse();
  std::array<PointCorrespondence, 3> out;
  out[0].world_point = to_world.apply(unproject(ac.x, op));
  out[0].observation = ac.y;
  for (int i = 0; i < 2; ++i) {
    const Eigen::Vector2d offset = frame.Ax.col(i);
    const Eigen::Vector2d xi = ac.x + offset;
    out[i + 1].world_point = to_world.apply(unproject(xi, op));
    out[i + 1].observation = ac.y + ac.A * offset;
  }
  return out;
}

CanonicalAffineFrame scale_canonical_frame(const CanonicalAffineFrame& frame,
                                           double scale) {
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "scale_canonical_frame: scale must be positive");
  }
  return CanonicalAffineFrame{scale * frame.Ax};
}

SolutionSet solve_p3p_1ac(const P1ACProblem& problem, double scale) {
  const CanonicalAffineFrame frame =
      scale_canonical_frame(CanonicalAffineFrame{}, scale);
  const auto pts = expand_ac_to_points(problem.ac, problem.op, frame,
                                       problem.ref_pose);
  return solve_p3p(pts[0], pts[1], pts[2]);
}

}  // namespace p1ac
