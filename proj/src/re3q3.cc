#include "p1ac/re3q3.h"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "p1ac/errors.h"
#include "p1ac/random.h"
#include "p1ac/univariate.h"

namespace p1ac {
namespace {

// Univariate polynomial of degree <= 8 in the hidden variable.
struct Poly {
  std::array<double, 9> c{};

  Poly() = default;
  Poly(double c0) { c[0] = c0; }
  Poly(double c0, double c1) {
    c[0] = c0;
    c[1] = c1;
  }
  Poly(double c0, double c1, double c2) {
    c[0] = c0;
    c[1] = c1;
    c[2] = c2;
  }

  double operator()(double t) const { return evaluate_polynomial(c, t); }
  double max_abs() const {
    double m = 0.0;
    for (const double v : c) m = std::max(m, std::abs(v));
    return m;
  }
};

Poly operator+(const Poly& a, const Poly& b) {
  Poly r;
  for (int i = 0; i < 9; ++i) r.c[i] = a.c[i] + b.c[i];
  return r;
}

Poly operator-(const Poly& a, const Poly& b) {
  Poly r;
  for (int i = 0; i < 9; ++i) r.c[i] = a.c[i] - b.c[i];
  return r;
}

Poly operator-(const Poly& a) {
  Poly r;
  for (int i = 0; i < 9; ++i) r.c[i] = -a.c[i];
  return r;
}

Poly operator*(double s, const Poly& a) {
  Poly r;
  for (int i = 0; i < 9; ++i) r.c[i] = s * a.c[i];
  return r;
}

// Products never exceed degree 8 in this file.
Poly operator*(const Poly& a, const Poly& b) {
  Poly r;
  for (int i = 0; i < 9; ++i) {
    if (a.c[i] == 0.0) continue;
    for (int j = 0; i + j < 9; ++j) r.c[i + j] += a.c[i] * b.c[j];
  }
  return r;
}

// X x + Y y + K, coefficients polynomial in the hidden variable.
struct LinearRow {
  Poly X, Y, K;

  Eigen::Vector3d operator()(double t) const { return {X(t), Y(t), K(t)}; }
};

// Quadric f(X) = X^T S X + g^T X + c in up to three variables.
struct Quadric {
  Eigen::Matrix3d S = Eigen::Matrix3d::Zero();
  Eigen::Vector3d g = Eigen::Vector3d::Zero();
  double c = 0.0;
};

Quadric quadric_from_row(const QuadricCoefficients& C, int i) {
  Quadric q;
  q.S << C(i, 0), 0.5 * C(i, 1), 0.5 * C(i, 2),
         0.5 * C(i, 1), C(i, 3), 0.5 * C(i, 4),
         0.5 * C(i, 2), 0.5 * C(i, 4), C(i, 5);
  q.g << C(i, 6), C(i, 7), C(i, 8);
  q.c = C(i, 9);
  return q;
}

Eigen::Matrix<double, 1, 10> row_from_quadric(const Quadric& q) {
  Eigen::Matrix<double, 1, 10> r;
  r << q.S(0, 0), 2 * q.S(0, 1), 2 * q.S(0, 2), q.S(1, 1), 2 * q.S(1, 2),
       q.S(2, 2), q.g(0), q.g(1), q.g(2), q.c;
  return r;
}

// Substitutes X = X0 + N u for the first n coordinates.
Quadric substitute(const Quadric& q, int n, const Eigen::VectorXd& X0,
                   const Eigen::MatrixXd& N) {
  const Eigen::MatrixXd S = q.S.topLeftCorner(n, n);
  const Eigen::VectorXd g = q.g.head(n);
  const int m = static_cast<int>(N.cols());
  Quadric out;
  out.S.topLeftCorner(m, m) = N.transpose() * S * N;
  out.g.head(m) = N.transpose() * (2.0 * S * X0 + g);
  out.c = X0.dot(S * X0) + g.dot(X0) + q.c;
  return out;
}

bool hadamard_zero(const LinearRow rows[3]) {
  for (const double t : {-1.3, 0.4, 1.7}) {
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i) M.row(i) = rows[i](t).transpose();
    const double bound = M.row(0).norm() * M.row(1).norm() * M.row(2).norm();
    if (std::abs(M.determinant()) > 1e-12 * bound) return false;
  }
  return true;
}

enum class HiddenStatus { kOk, kSingularBlock, kWeakLeading, kVanishing };

// z hidden; C already expressed in the rotated variables.
HiddenStatus hidden_variable_roots(const QuadricCoefficients& C,
                                   bool accept_weak_leading,
                                   std::vector<Eigen::Vector3d>* out) {
  Eigen::Matrix3d A3;
  A3 << C.col(0), C.col(1), C.col(3);
  const Eigen::PartialPivLU<Eigen::Matrix3d> lu(A3);
  if (!(lu.rcond() > 1e-10)) return HiddenStatus::kSingularBlock;
  const Eigen::Matrix3d Ainv = lu.inverse();

  // A3 [x^2 xy y^2]^T + px x + py y + p1 = 0
  Poly px[3], py[3], p1[3];
  for (int i = 0; i < 3; ++i) {
    px[i] = Poly(C(i, 6), C(i, 2));
    py[i] = Poly(C(i, 7), C(i, 4));
    p1[i] = Poly(C(i, 9), C(i, 8), C(i, 5));
  }
  // x^2 = a0 x + b0 y + c0, xy = a1 x + b1 y + c1, y^2 = a2 x + b2 y + c2
  Poly a[3], b[3], c[3];
  for (int r = 0; r < 3; ++r) {
    for (int i = 0; i < 3; ++i) {
      a[r] = a[r] - Ainv(r, i) * px[i];
      b[r] = b[r] - Ainv(r, i) * py[i];
      c[r] = c[r] - Ainv(r, i) * p1[i];
    }
  }
  const auto reduce = [&](const Poly& cx2, const Poly& cxy, const Poly& cy2,
                          const Poly& cx, const Poly& cy) {
    LinearRow row;
    row.X = cx2 * a[0] + cxy * a[1] + cy2 * a[2] + cx;
    row.Y = cx2 * b[0] + cxy * b[1] + cy2 * b[2] + cy;
    row.K = cx2 * c[0] + cxy * c[1] + cy2 * c[2];
    return row;
  };

  LinearRow rows[3];
  // x (xy) - y (x^2)
  rows[0] = reduce(a[1], b[1] - a[0], -b[0], c[1], -c[0]);
  // y (xy) - x (y^2)
  rows[1] = reduce(-a[2], a[1] - b[2], b[1], -c[2], c[1]);
  // y * rows[0]; x * rows[0] lies in the span of the first two rows.
  rows[2] = reduce(Poly(), rows[0].X, rows[0].Y, Poly(), rows[0].K);

  const LinearRow& r0 = rows[0];
  const LinearRow& r1 = rows[1];
  const LinearRow& r2 = rows[2];
  const Poly det = r0.X * (r1.Y * r2.K - r1.K * r2.Y) -
                   r0.Y * (r1.X * r2.K - r1.K * r2.X) +
                   r0.K * (r1.X * r2.Y - r1.Y * r2.X);

  // Can also fire when the rows are merely close to parallel at the probe
  // points, so the caller redraws before giving up.
  if (hadamard_zero(rows)) return HiddenStatus::kVanishing;
  if (!accept_weak_leading && std::abs(det.c[8]) < 1e-10 * det.max_abs()) {
    return HiddenStatus::kWeakLeading;
  }

  for (const double z : real_roots_sturm(det.c)) {
    Eigen::Matrix3d M;
    for (int i = 0; i < 3; ++i) M.row(i) = rows[i](z).transpose();
    Eigen::Vector3d best = M.row(0).cross(M.row(1)).transpose();
    for (const auto& [i, j] : {std::pair{0, 2}, std::pair{1, 2}}) {
      const Eigen::Vector3d v = M.row(i).cross(M.row(j)).transpose();
      if (v.squaredNorm() > best.squaredNorm()) best = v;
    }
    if (!(std::abs(best(2)) > 1e-14 * best.norm())) continue;
    out->emplace_back(best(0) / best(2), best(1) / best(2), z);
  }
  return HiddenStatus::kOk;
}

std::vector<Eigen::VectorXd> solve_full_rank_3(const std::vector<Quadric>& eqs,
                                               Rng& rng) {
  bool redrawn_for_weak = false;
  bool always_vanishing = true;
  for (int attempt = 0; attempt < 4; ++attempt) {
    const Eigen::Matrix3d Q = random_rotation(rng);
    QuadricCoefficients C;
    for (int i = 0; i < 3; ++i) {
      Quadric q;
      q.S = Q.transpose() * eqs[i].S * Q;
      q.g = Q.transpose() * eqs[i].g;
      q.c = eqs[i].c;
      C.row(i) = row_from_quadric(q);
    }
    std::vector<Eigen::Vector3d> local;
    const HiddenStatus status =
        hidden_variable_roots(C, redrawn_for_weak || attempt == 3, &local);
    if (status == HiddenStatus::kVanishing) continue;
    always_vanishing = false;
    if (status == HiddenStatus::kSingularBlock) continue;
    if (status == HiddenStatus::kWeakLeading) {
      redrawn_for_weak = true;
      continue;
    }
    std::vector<Eigen::VectorXd> out;
    out.reserve(local.size());
    for (const Eigen::Vector3d& X : local) out.emplace_back(Q * X);
    return out;
  }
  if (always_vanishing) {
    throw Error(ErrorCode::kDegenerateSystem,
                "solve_3q3: elimination polynomial vanishes identically");
  }
  throw Error(ErrorCode::kDegenerateSystem,
              "solve_3q3: no well-conditioned elimination found");
}

std::vector<Eigen::VectorXd> solve_full_rank_2(const std::vector<Quadric>& eqs,
                                               Rng& rng) {
  for (int attempt = 0; attempt < 4; ++attempt) {
    const double theta = uniform(rng, 0.0, 2.0 * std::numbers::pi);
    Eigen::Matrix2d Q;
    Q << std::cos(theta), -std::sin(theta), std::sin(theta), std::cos(theta);

    // Each conic as a u^2 + b(v) u + c(v), v hidden.
    double a[2];
    Poly b[2], c[2];
    double scale = 0.0;
    for (int i = 0; i < 2; ++i) {
      const Eigen::Matrix2d S = Q.transpose() * eqs[i].S.topLeftCorner<2, 2>() * Q;
      const Eigen::Vector2d g = Q.transpose() * eqs[i].g.head<2>();
      a[i] = S(0, 0);
      b[i] = Poly(g(0), 2.0 * S(0, 1));
      c[i] = Poly(eqs[i].c, g(1), S(1, 1));
      scale = std::max(scale, S.cwiseAbs().maxCoeff());
    }
    if (std::max(std::abs(a[0]), std::abs(a[1])) < 1e-6 * scale) continue;

    const Poly P1 = a[0] * c[1] - a[1] * c[0];
    const Poly P2 = a[0] * b[1] - a[1] * b[0];
    const Poly P3 = b[0] * c[1] - b[1] * c[0];
    const Poly res = P1 * P1 - P2 * P3;
    const double res_scale =
        P1.max_abs() * P1.max_abs() + P2.max_abs() * P3.max_abs();
    if (!(res.max_abs() > 1e-12 * res_scale)) {
      throw Error(ErrorCode::kDegenerateSystem,
                  "solve_3q3: conic pair shares a component");
    }

    std::vector<Eigen::VectorXd> out;
    const int k = std::abs(a[0]) >= std::abs(a[1]) ? 0 : 1;
    for (const double v : real_roots_sturm(res.c)) {
      const double den = P2(v);
      const double den_scale = std::abs(a[0] * b[1](v)) + std::abs(a[1] * b[0](v));
      double us[2];
      int nu = 0;
      if (std::abs(den) > 1e-8 * den_scale && den != 0.0) {
        us[nu++] = -P1(v) / den;
      } else {
        nu = solve_quadratic(a[k], b[k](v), c[k](v), us);
      }
      for (int j = 0; j < nu; ++j) {
        out.push_back(Q * Eigen::Vector2d(us[j], v));
      }
    }
    return out;
  }
  throw Error(ErrorCode::kDegenerateSystem,
              "solve_3q3: no well-conditioned conic elimination found");
}

// n equations in n <= 3 unknowns.
std::vector<Eigen::VectorXd> solve_system(const std::vector<Quadric>& eqs,
                                          int n, Rng& rng) {
  if (n == 0) return {Eigen::VectorXd(0)};

  const int nq = n * (n + 1) / 2;
  Eigen::MatrixXd Qm(n, nq);
  for (int i = 0; i < n; ++i) {
    int col = 0;
    for (int j = 0; j < n; ++j) {
      for (int k = j; k < n; ++k) {
        Qm(i, col++) = (j == k ? 1.0 : 2.0) * eqs[i].S(j, k);
      }
    }
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(Qm, Eigen::ComputeFullU);
  const Eigen::VectorXd sv = svd.singularValues();
  int rank = 0;
  for (int i = 0; i < sv.size(); ++i) {
    if (sv(i) > 1e-10 * sv(0)) ++rank;
  }

  if (rank == n) {
    if (n == 3) return solve_full_rank_3(eqs, rng);
    if (n == 2) return solve_full_rank_2(eqs, rng);
    double r[2];
    const int k = solve_quadratic(eqs[0].S(0, 0), eqs[0].g(0), eqs[0].c, r);
    std::vector<Eigen::VectorXd> out;
    for (int i = 0; i < k; ++i) out.push_back(Eigen::VectorXd::Constant(1, r[i]));
    return out;
  }

  // Rotate the equations so the last n - rank have no quadratic terms.
  const Eigen::MatrixXd U = svd.matrixU();
  std::vector<Quadric> mixed(n);
  for (int k = 0; k < n; ++k) {
    for (int i = 0; i < n; ++i) {
      mixed[k].S += U(i, k) * eqs[i].S;
      mixed[k].g += U(i, k) * eqs[i].g;
      mixed[k].c += U(i, k) * eqs[i].c;
    }
  }
  const int num_linear = n - rank;
  Eigen::MatrixXd G(num_linear, n);
  Eigen::VectorXd h(num_linear);
  for (int k = 0; k < num_linear; ++k) {
    G.row(k) = mixed[rank + k].g.head(n).transpose();
    h(k) = mixed[rank + k].c;
  }

  Eigen::JacobiSVD<Eigen::MatrixXd> gsvd(G, Eigen::ComputeFullU | Eigen::ComputeFullV);
  const Eigen::VectorXd gsv = gsvd.singularValues();
  const double g_scale = gsv.size() > 0 ? gsv(0) : 0.0;
  int g_rank = 0;
  for (int i = 0; i < gsv.size(); ++i) {
    if (gsv(i) > 1e-10 * g_scale) ++g_rank;
  }
  Eigen::VectorXd X0 = Eigen::VectorXd::Zero(n);
  for (int i = 0; i < g_rank; ++i) {
    X0 -= gsvd.matrixV().col(i) * (gsvd.matrixU().col(i).dot(h) / gsv(i));
  }
  // Rows that cancel to 0 = roundoff are dependent, not inconsistent.
  double eq_scale = 0.0;
  for (int i = 0; i < n; ++i) {
    eq_scale = std::max(eq_scale, eqs[i].S.cwiseAbs().maxCoeff() +
                                      eqs[i].g.head(n).cwiseAbs().maxCoeff() +
                                      std::abs(eqs[i].c));
  }
  const double consistency = (G * X0 + h).norm();
  if (consistency > 1e-9 * (h.norm() + g_scale * X0.norm()) + 1e-12 * eq_scale) {
    return {};
  }
  if (g_rank < num_linear) {
    throw Error(ErrorCode::kDegenerateSystem,
                "solve_3q3: dependent linear equations leave a solution family");
  }

  const int m = n - g_rank;
  const Eigen::MatrixXd N = gsvd.matrixV().rightCols(m);
  std::vector<Quadric> reduced;
  reduced.reserve(m);
  for (int k = 0; k < rank; ++k) reduced.push_back(substitute(mixed[k], n, X0, N));

  std::vector<Eigen::VectorXd> out;
  for (const Eigen::VectorXd& u : solve_system(reduced, m, rng)) {
    out.push_back(X0 + N * u);
  }
  return out;
}

}  // namespace

double infinity_norm(const QuadricCoefficients& C) {
  return C.cwiseAbs().rowwise().sum().maxCoeff();
}

Eigen::Vector3d evaluate_quadrics(const QuadricCoefficients& C,
                                  const Eigen::Vector3d& X) {
  return C * quadric_monomials(X);
}

Eigen::Matrix3d quadrics_jacobian(const QuadricCoefficients& C,
                                  const Eigen::Vector3d& X) {
  const double x = X(0), y = X(1), z = X(2);
  Eigen::Matrix3d J;
  for (int i = 0; i < 3; ++i) {
    J(i, 0) = 2 * C(i, 0) * x + C(i, 1) * y + C(i, 2) * z + C(i, 6);
    J(i, 1) = C(i, 1) * x + 2 * C(i, 3) * y + C(i, 4) * z + C(i, 7);
    J(i, 2) = C(i, 2) * x + C(i, 4) * y + 2 * C(i, 5) * z + C(i, 8);
  }
  return J;
}

Eigen::Vector3d polish_root(const QuadricCoefficients& C,
                            const Eigen::Vector3d& root, int max_iterations) {
  Eigen::Vector3d X = root;
  Eigen::Vector3d F = evaluate_quadrics(C, X);
  if (!F.allFinite()) return root;
  for (int iter = 0; iter < max_iterations; ++iter) {
    if (F.isZero(0.0)) break;
    const Eigen::PartialPivLU<Eigen::Matrix3d> lu(quadrics_jacobian(C, X));
    if (!(lu.rcond() > 1e-15)) break;
    const Eigen::Vector3d step = lu.solve(F);
    if (!step.allFinite()) break;

    double lambda = 1.0;
    Eigen::Vector3d X_next = X - step;
    Eigen::Vector3d F_next = evaluate_quadrics(C, X_next);
    while (!(F_next.norm() < F.norm()) && lambda > 1.0 / 64.0) {
      lambda *= 0.5;
      X_next = X - lambda * step;
      F_next = evaluate_quadrics(C, X_next);
    }
    if (!(F_next.norm() < F.norm())) break;
    X = X_next;
    F = F_next;
    if (lambda * step.norm() <= 1e-15 * std::max(1.0, X.norm())) break;
  }
  return X;
}

RootSet solve_3q3(const QuadricCoefficients& C, std::uint64_t seed) {
  if (!C.allFinite()) {
    throw Error(ErrorCode::kInvalidArgument, "solve_3q3: non-finite coefficients");
  }
  Rng rng(seed);
  std::vector<Quadric> eqs;
  for (int i = 0; i < 3; ++i) eqs.push_back(quadric_from_row(C, i));

  const double tol = 1e-6 * infinity_norm(C);
  RootSet out;
  for (const Eigen::VectorXd& candidate : solve_system(eqs, 3, rng)) {
    const Eigen::Vector3d X = polish_root(C, Eigen::Vector3d(candidate));
    const double residual = evaluate_quadrics(C, X).cwiseAbs().maxCoeff();
    if (!(residual < tol) || !X.allFinite()) continue;

    bool duplicate = false;
    for (std::size_t k = 0; k < out.roots.size(); ++k) {
      if ((out.roots[k] - X).norm() < 1e-6) {
        if (residual < out.residuals[k]) {
          out.roots[k] = X;
          out.residuals[k] = residual;
        }
        duplicate = true;
        break;
      }
    }
    if (!duplicate) {
      out.roots.push_back(X);
      out.residuals.push_back(residual);
    }
  }

  if (out.roots.size() > 8) {
    std::vector<std::size_t> order(out.roots.size());
    for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
    std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
      return out.residuals[i] < out.residuals[j];
    });
    RootSet best;
    for (std::size_t i = 0; i < 8; ++i) {
      best.roots.push_back(out.roots[order[i]]);
      best.residuals.push_back(out.residuals[order[i]]);
    }
    out = std::move(best);
  }
  return out;
}

}  // namespace p1ac
