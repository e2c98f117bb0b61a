#include "p1ac/p1ac.h"

#include <Eigen/Eigenvalues>
#include <Eigen/QR>
#include <Eigen/SVD>

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>

#include "p1ac/errors.h"

namespace p1ac {
namespace {

// Monomials of degree <= 3 in b1..b5, arranged for the elimination as
// [E: degree 3 without b1 | R: degree 3 with b1 | P: degree <= 2].
constexpr int kNumE = 20;
constexpr int kNumR = 15;
constexpr int kNumP = 21;
constexpr int kNumMonomials = kNumE + kNumR + kNumP;
constexpr int kNumEquations = 10;
constexpr int kNumRows = 6 * kNumEquations;
constexpr int kQuotientDim = 8;
constexpr int kReducedRank = kNumP - kQuotientDim;

using Exponent = std::array<int, 5>;
using MacaulayMatrix = Eigen::Matrix<double, kNumRows, kNumMonomials>;

int encode(const Exponent& e) {
  return e[0] + 4 * (e[1] + 4 * (e[2] + 4 * (e[3] + 4 * e[4])));
}

int degree(const Exponent& e) { return e[0] + e[1] + e[2] + e[3] + e[4]; }

// Exponent of the coefficient b_a; a == 5 is the constant b6 = 1.
Exponent unit(int a) {
  Exponent e{};
  if (a < 5) e[a] = 1;
  return e;
}

Exponent add(const Exponent& a, const Exponent& b) {
  Exponent e;
  for (int i = 0; i < 5; ++i) e[i] = a[i] + b[i];
  return e;
}

struct Layout {
  // column[mul][a][b]: column of unit(mul) * unit(a) * unit(b).
  std::array<std::array<std::array<int, 6>, 6>, 6> column{};
  // Multiplying the k-th P monomial by b1 lands on column shift[k].
  std::array<int, kNumP> shift{};
  // P index (0..20) of unit(a).
  std::array<int, 6> linear{};

  Layout() {
    std::vector<Exponent> all;
    for (int code = 0; code < 1024; ++code) {
      Exponent e{code % 4, (code / 4) % 4, (code / 16) % 4, (code / 64) % 4,
                 (code / 256) % 4};
      if (degree(e) <= 3) all.push_back(e);
    }
    std::sort(all.begin(), all.end(), [](const Exponent& a, const Exponent& b) {
      if (degree(a) != degree(b)) return degree(a) > degree(b);
      return a < b;
    });
    std::vector<Exponent> ordered;
    for (const Exponent& e : all) {
      if (degree(e) == 3 && e[0] == 0) ordered.push_back(e);
    }
    for (const Exponent& e : all) {
      if (degree(e) == 3 && e[0] > 0) ordered.push_back(e);
    }
    for (const Exponent& e : all) {
      if (degree(e) < 3) ordered.push_back(e);
    }
    std::array<int, 1024> index;
    index.fill(-1);
    for (int i = 0; i < static_cast<int>(ordered.size()); ++i) {
      index[encode(ordered[i])] = i;
    }
    for (int m = 0; m < 6; ++m) {
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) {
          column[m][a][b] = index[encode(add(add(unit(m), unit(a)), unit(b)))];
        }
      }
    }
    for (int k = 0; k < kNumP; ++k) {
      shift[k] = index[encode(add(ordered[kNumE + kNumR + k], unit(0)))];
    }
    for (int a = 0; a < 6; ++a) {
      linear[a] = index[encode(unit(a))] - kNumE - kNumR;
    }
  }
};

const Layout& layout() {
  static const Layout kLayout;
  return kLayout;
}

// Quadratic forms in (b1..b5, 1) whose vanishing makes R orthogonal up to scale.
std::array<Eigen::Matrix<double, 6, 6>, kNumEquations> orthogonality_forms(
    const Eigen::Matrix<double, 12, 6>& B) {
  const auto row = [&](int i) { return B.middleRows<3>(3 * i); };
  const auto col = [&](int j) {
    Eigen::Matrix<double, 3, 6> c;
    c << B.row(j), B.row(3 + j), B.row(6 + j);
    return c;
  };
  const Eigen::Matrix<double, 3, 6> r1 = row(0), r2 = row(1), r3 = row(2);
  const Eigen::Matrix<double, 3, 6> c1 = col(0), c2 = col(1), c3 = col(2);
  std::array<Eigen::Matrix<double, 6, 6>, kNumEquations> S = {
      r1.transpose() * r1 - r2.transpose() * r2,
      r1.transpose() * r1 - r3.transpose() * r3,
      c1.transpose() * c1 - c2.transpose() * c2,
      c1.transpose() * c1 - c3.transpose() * c3,
      r1.transpose() * r2,
      r1.transpose() * r3,
      r2.transpose() * r3,
      c1.transpose() * c2,
      c1.transpose() * c3,
      c2.transpose() * c3,
  };
  for (auto& s : S) s = 0.5 * (s + s.transpose()).eval();
  return S;
}

// Gauss-Newton on the ten quadratics, b(5) held at 1.
void refine_coefficients(
    const std::array<Eigen::Matrix<double, 6, 6>, kNumEquations>& S,
    Eigen::Matrix<double, 6, 1>& b) {
  const auto residual = [&](const Eigen::Matrix<double, 6, 1>& v) {
    Eigen::Matrix<double, kNumEquations, 1> r;
    for (int q = 0; q < kNumEquations; ++q) r(q) = v.dot(S[q] * v);
    return r;
  };
  Eigen::Matrix<double, kNumEquations, 1> r = residual(b);
  for (int iter = 0; iter < 3; ++iter) {
    Eigen::Matrix<double, kNumEquations, 5> J;
    for (int q = 0; q < kNumEquations; ++q) {
      J.row(q) = 2.0 * (S[q] * b).head<5>().transpose();
    }
    const Eigen::Matrix<double, 5, 1> step =
        (J.transpose() * J).ldlt().solve(J.transpose() * r);
    if (!step.allFinite()) return;
    Eigen::Matrix<double, 6, 1> next = b;
    next.head<5>() -= step;
    const Eigen::Matrix<double, kNumEquations, 1> r_next = residual(next);
    if (!(r_next.norm() < r.norm())) return;
    b = next;
    r = r_next;
  }
}

// All real coefficient vectors b (b6 = 1) of the orthogonality system.
std::vector<Eigen::Matrix<double, 6, 1>> solve_coefficients(
    const Eigen::Matrix<double, 12, 6>& B) {
  const Layout& L = layout();
  const auto S = orthogonality_forms(B);

  MacaulayMatrix Mac = MacaulayMatrix::Zero();
  for (int m = 0; m < 6; ++m) {
    for (int q = 0; q < kNumEquations; ++q) {
      const int r = m * kNumEquations + q;
      for (int a = 0; a < 6; ++a) {
        for (int b = 0; b < 6; ++b) Mac(r, L.column[m][a][b]) += S[q](a, b);
      }
    }
  }

  const Eigen::HouseholderQR<Eigen::Matrix<double, kNumRows, kNumE + kNumR>> qr(
      Mac.leftCols<kNumE + kNumR>());
  Mac.applyOnTheLeft(qr.householderQ().adjoint());

  // Degree-3 monomials with b1 in terms of P.
  const Eigen::Matrix<double, kNumR, kNumP> Rexp =
      -Mac.block<kNumR, kNumR>(kNumE, kNumE)
           .triangularView<Eigen::Upper>()
           .solve(Mac.block<kNumR, kNumP>(kNumE, kNumE + kNumR));

  const Eigen::ColPivHouseholderQR<Eigen::Matrix<double, kNumRows - kNumE - kNumR, kNumP>>
      nqr(Mac.block<kNumRows - kNumE - kNumR, kNumP>(kNumE + kNumR, kNumE + kNumR));
  const auto& U = nqr.matrixQR();
  const Eigen::Matrix<double, kReducedRank, kQuotientDim> red =
      -U.topLeftCorner<kReducedRank, kReducedRank>()
           .triangularView<Eigen::Upper>()
           .solve(U.block<kReducedRank, kQuotientDim>(0, kReducedRank));
  const auto& perm = nqr.colsPermutation().indices();

  // Coordinates of each P monomial in the quotient basis.
  Eigen::Matrix<double, kNumP, kQuotientDim> basis;
  for (int pos = 0; pos < kNumP; ++pos) {
    if (pos < kReducedRank) {
      basis.row(perm(pos)) = red.row(pos);
    } else {
      basis.row(perm(pos)).setZero();
      basis(perm(pos), pos - kReducedRank) = 1.0;
    }
  }

  Eigen::Matrix<double, kQuotientDim, kQuotientDim> action;
  for (int k = 0; k < kQuotientDim; ++k) {
    const int target = L.shift[perm(kReducedRank + k)];
    if (target >= kNumE + kNumR) {
      action.row(k) = basis.row(target - kNumE - kNumR);
    } else {
      action.row(k) = Rexp.row(target - kNumE) * basis;
    }
  }

  const Eigen::EigenSolver<Eigen::Matrix<double, kQuotientDim, kQuotientDim>> es(action);
  std::vector<Eigen::Matrix<double, 6, 1>> out;
  if (es.info() != Eigen::Success) return out;
  for (int i = 0; i < kQuotientDim; ++i) {
    const std::complex<double> lambda = es.eigenvalues()(i);
    if (std::abs(lambda.imag()) > 1e-8 * std::max(1.0, std::abs(lambda))) continue;
    const Eigen::Matrix<double, kQuotientDim, 1> v = es.eigenvectors().col(i).real();
    const double w = basis.row(L.linear[5]).dot(v);
    if (!(std::abs(w) > 1e-14 * v.norm())) continue;
    Eigen::Matrix<double, 6, 1> b;
    for (int a = 0; a < 5; ++a) b(a) = basis.row(L.linear[a]).dot(v) / w;
    b(5) = 1.0;
    refine_coefficients(S, b);
    out.push_back(b);
  }
  return out;
}

// Re-orthonormalizes slightly perturbed rotations; false when unusable.
bool make_valid(Pose& pose) {
  if (!pose.R.allFinite() || !pose.t.allFinite()) return false;
  const double err = pose.orthogonality_error();
  if (err > 1e-4) return false;
  if (err > 1e-8) pose.R = nearest_rotation(pose.R);
  return pose.R.determinant() > 0.0;
}

void add_solution(const P1ACProblem& problem, const LinearConstraintSystem& sys,
                  Pose local, SolutionSet& out) {
  if (!make_valid(local)) return;
  const double residual = algebraic_residual(sys, local);
  const bool in_front = local.apply(problem.op.point())(2) > 0.0;
  out.add(change_reference_frame(problem.ref_pose, local), residual, in_front);
}

}  // namespace

void SolutionSet::add(const Pose& pose, double residual, bool in_front) {
  poses.push_back(pose);
  algebraic_residuals.push_back(residual);
  cheirality.push_back(in_front);
}

double algebraic_residual(const LinearConstraintSystem& sys, const Pose& pose) {
  return (sys.M * vectorize_pose(pose)).cwiseAbs().maxCoeff();
}

NullspaceBasis compute_nullspace_basis(const LinearConstraintSystem& sys) {
  const Eigen::JacobiSVD<Eigen::Matrix<double, 6, 12>> svd(sys.M, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  if (!(sv(5) > 1e-10 * sv(0))) {
    throw Error(ErrorCode::kRankDeficient,
                "solve_p1ac_nullspace: constraint matrix has rank below 6");
  }
  NullspaceBasis nb;
  nb.B = svd.matrixV().rightCols<6>();
  nb.b.setZero();
  nb.b(5) = 1.0;
  return nb;
}

SolutionSet solve_p1ac_nullspace(const P1ACProblem& problem) {
  const LinearConstraintSystem sys = build_linear_system(problem.ac, problem.op);
  NullspaceBasis nb = compute_nullspace_basis(sys);

  SolutionSet out;
  for (int attempt = 0; attempt < 2 && out.empty(); ++attempt) {
    if (attempt == 1) {
      // b6 = 1 misses solutions with b6 = 0; fix another coefficient instead.
      nb.B.col(0).swap(nb.B.col(5));
    }
    for (const Eigen::Matrix<double, 6, 1>& b : solve_coefficients(nb.B)) {
      PoseVector P = nb.B * b;
      const double scale = std::sqrt(P(0) * P(0) + P(3) * P(3) + P(6) * P(6));
      if (!(scale > 0.0)) continue;
      P /= scale;
      Pose local;
      local.R << P(0), P(1), P(2), P(3), P(4), P(5), P(6), P(7), P(8);
      local.t << P(9), P(10), P(11);
      if (local.R.determinant() < 0.0) {
        local.R = -local.R;
        local.t = -local.t;
      }
      add_solution(problem, sys, local, out);
    }
  }
  return out;
}

SolutionSet solve_p1ac_3q3(const P1ACProblem& problem, std::uint64_t seed) {
  const LinearConstraintSystem sys = build_linear_system(problem.ac, problem.op);
  const ReducedQuadricSystem reduced =
      eliminate_translation(to_monomial_system(sys));
  const RootSet roots = solve_3q3(reduced.C, seed);

  SolutionSet out;
  for (const Eigen::Vector3d& c : roots.roots) {
    const CayleyRotation cayley{c(0), c(1), c(2)};
    Pose local;
    local.R = cayley_to_matrix(cayley);
    local.t = reduced.translation_map * quadric_monomials(c) / cayley.s();
    add_solution(problem, sys, local, out);
  }
  return out;
}

SolutionSet filter_cheirality(const SolutionSet& solutions,
                              const P1ACProblem& problem) {
  const Eigen::Vector3d X = problem.ref_pose.inverse().apply(problem.op.point());
  SolutionSet out;
  for (std::size_t i = 0; i < solutions.size(); ++i) {
    if (solutions.poses[i].apply(X)(2) > 0.0) {
      out.add(solutions.poses[i], solutions.algebraic_residuals[i], true);
    }
  }
  return out;
}

}  // namespace p1ac
