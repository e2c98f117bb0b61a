#include <gtest/gtest.h>

#include <algorithm>
#include <vector>

#include "oracles.h"
#include "p1ac/random.h"
#include "p1ac/re3q3.h"
#include "p1ac/univariate.h"

namespace p1ac {
namespace {

// columns: x^2 xy xz y^2 yz z^2 x y z 1
QuadricCoefficients separable_system() {
  QuadricCoefficients C = QuadricCoefficients::Zero();
  C(0, 0) = 1; C(0, 9) = -1;
  C(1, 3) = 1; C(1, 9) = -1;
  C(2, 5) = 1; C(2, 9) = -1;
  return C;
}

bool contains(const RootSet& r, const Eigen::Vector3d& x, double tol) {
  return std::any_of(r.roots.begin(), r.roots.end(),
                     [&](const Eigen::Vector3d& y) { return (x - y).norm() < tol; });
}

TEST(Univariate, SturmFindsKnownRoots) {
  // (t - 1)(t + 2)(t - 0.5)(t^2 + 1)
  const std::vector<double> expected = {-2.0, 0.5, 1.0};
  // expand
  std::vector<double> p = {1.0};
  auto mul = [&](std::vector<double> q) {
    std::vector<double> r(p.size() + q.size() - 1, 0.0);
    for (std::size_t i = 0; i < p.size(); ++i)
      for (std::size_t j = 0; j < q.size(); ++j) r[i + j] += p[i] * q[j];
    p = r;
  };
  mul({-1, 1});
  mul({2, 1});
  mul({-0.5, 1});
  mul({1, 0, 1});
  const std::vector<double> roots = real_roots_sturm(p);
  ASSERT_EQ(roots.size(), 3u);
  for (int i = 0; i < 3; ++i) EXPECT_NEAR(roots[i], expected[i], 1e-14);
}

TEST(Univariate, SturmHandlesDegenerateInput) {
  EXPECT_TRUE(real_roots_sturm(std::vector<double>{0.0, 0.0}).empty());
  EXPECT_TRUE(real_roots_sturm(std::vector<double>{3.0}).empty());
  // leading zeros dropped: 2t - 4
  const auto r = real_roots_sturm(std::vector<double>{-4.0, 2.0, 0.0, 0.0});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_DOUBLE_EQ(r[0], 2.0);
}

TEST(Univariate, SturmMatchesEigenOnRandomPolynomials) {
  Rng rng = make_rng(21, "sturm");
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<double> c(9);
    for (double& v : c) v = gaussian(rng, 1.0);
    const std::vector<double> roots = real_roots_sturm(c);
    for (double r : roots) {
      double scale = 0.0, pw = 1.0;
      for (double v : c) {
        scale += std::abs(v) * pw;
        pw *= std::abs(r);
      }
      EXPECT_LT(std::abs(evaluate_polynomial(c, r)), 1e-10 * scale);
    }
    // Companion matrix oracle for the count of well-separated real roots.
    Eigen::Matrix<double, 8, 8> comp = Eigen::Matrix<double, 8, 8>::Zero();
    for (int i = 1; i < 8; ++i) comp(i, i - 1) = 1.0;
    for (int i = 0; i < 8; ++i) comp(i, 7) = -c[i] / c[8];
    const Eigen::VectorXcd ev = Eigen::EigenSolver<Eigen::Matrix<double, 8, 8>>(comp).eigenvalues();
    for (int i = 0; i < 8; ++i) {
      if (std::abs(ev(i).imag()) > 1e-6) continue;
      const double x = ev(i).real();
      EXPECT_TRUE(std::any_of(roots.begin(), roots.end(),
                              [&](double r) { return std::abs(r - x) < 1e-6 * (1 + std::abs(x)); }))
          << "trial " << trial << " missing root " << x;
    }
  }
}

TEST(Univariate, QuadraticAndCubic) {
  double r[3];
  ASSERT_EQ(solve_quadratic(1.0, -3.0, 2.0, r), 2);
  EXPECT_NEAR(std::min(r[0], r[1]), 1.0, 1e-15);
  EXPECT_NEAR(std::max(r[0], r[1]), 2.0, 1e-15);
  EXPECT_EQ(solve_quadratic(1.0, 0.0, 1.0, r), 0);
  ASSERT_EQ(solve_quadratic(0.0, 2.0, -1.0, r), 1);
  EXPECT_DOUBLE_EQ(r[0], 0.5);
  // (t - 1)(t - 2)(t - 3)
  ASSERT_EQ(solve_monic_cubic(-6.0, 11.0, -6.0, r), 3);
  std::sort(r, r + 3);
  EXPECT_NEAR(r[0], 1.0, 1e-12);
  EXPECT_NEAR(r[1], 2.0, 1e-12);
  EXPECT_NEAR(r[2], 3.0, 1e-12);
}

TEST(Re3q3, SeparableSystemHasEightRoots) {
  const RootSet r = solve_3q3(separable_system());
  ASSERT_EQ(r.size(), 8u);
  for (int sx : {-1, 1})
    for (int sy : {-1, 1})
      for (int sz : {-1, 1}) EXPECT_TRUE(contains(r, Eigen::Vector3d(sx, sy, sz), 1e-12));
}

TEST(Re3q3, LinearRowsAreAllowed) {
  QuadricCoefficients C = QuadricCoefficients::Zero();
  C(0, 0) = 1; C(0, 6) = 1; C(0, 9) = -2;  // x^2 + x - 2
  C(1, 7) = 1; C(1, 6) = -1;               // y - x
  C(2, 8) = 1; C(2, 9) = -1;               // z - 1
  const RootSet r = solve_3q3(C);
  ASSERT_EQ(r.size(), 2u);
  EXPECT_TRUE(contains(r, Eigen::Vector3d(1, 1, 1), 1e-12));
  EXPECT_TRUE(contains(r, Eigen::Vector3d(-2, -2, 1), 1e-12));
}

TEST(Re3q3, SolutionFamilyThrows) {
  QuadricCoefficients C = QuadricCoefficients::Zero();
  C(0, 0) = 1; C(0, 9) = -1;  // x^2 = 1, nothing constrains y, z
  C(1, 0) = 2; C(1, 9) = -2;
  C(2, 0) = 3; C(2, 9) = -3;
  try {
    solve_3q3(C);
    FAIL() << "expected throw";
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kDegenerateSystem);
  }
}

TEST(Re3q3, NonFiniteThrows) {
  QuadricCoefficients C = separable_system();
  C(1, 1) = std::numeric_limits<double>::quiet_NaN();
  EXPECT_THROW(solve_3q3(C), Error);
}

TEST(Re3q3, MatchesBruteForceOracle) {
  Rng rng = make_rng(31, "brute");
  int matched = 0;
  for (int trial = 0; trial < 40; ++trial) {
    QuadricCoefficients C;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 10; ++j) C(i, j) = gaussian(rng, 1.0);
    const RootSet r = solve_3q3(C);
    EXPECT_LE(r.size(), 8u);
    for (double res : r.residuals) EXPECT_LT(res, 1e-6 * infinity_norm(C));
    for (const oracle::BruteForceRoot& b : oracle::brute_force_3q3(C)) {
      if (b.sigma_min < 1e-6) continue;  // near-double root, position ill-defined
      EXPECT_TRUE(contains(r, b.x, 1e-6)) << "trial " << trial << " root " << b.x.transpose();
      ++matched;
    }
  }
  EXPECT_GT(matched, 40);
}

TEST(Re3q3, RowScalingInvariance) {
  Rng rng = make_rng(32, "scaling");
  for (int trial = 0; trial < 50; ++trial) {
    const QuadricCoefficients C = oracle::planted_quadrics(rng);
    QuadricCoefficients S = C;
    S.row(0) *= 7.5;
    S.row(2) *= -0.01;
    const RootSet a = solve_3q3(C), b = solve_3q3(S);
    ASSERT_EQ(a.size(), b.size()) << "trial " << trial;
    for (const auto& x : a.roots) EXPECT_TRUE(contains(b, x, 1e-9));
  }
}

TEST(Re3q3, VariablePermutationEquivariance) {
  Rng rng = make_rng(33, "permute");
  // (x, y, z) -> (y, z, x): new column index for each old monomial.
  // old monomials: xx xy xz yy yz zz x y z 1 with x' = y, y' = z, z' = x
  // xx -> z'z' (5), xy -> x'z' (2), xz -> y'z' (4), yy -> x'x' (0),
  // yz -> x'y' (1), zz -> y'y' (3), x -> z' (8), y -> x' (6), z -> y' (7)
  const int map[10] = {5, 2, 4, 0, 1, 3, 8, 6, 7, 9};
  for (int trial = 0; trial < 50; ++trial) {
    const QuadricCoefficients C = oracle::planted_quadrics(rng);
    QuadricCoefficients P = QuadricCoefficients::Zero();
    for (int j = 0; j < 10; ++j) P.col(map[j]) = C.col(j);
    const RootSet a = solve_3q3(C), b = solve_3q3(P);
    ASSERT_EQ(a.size(), b.size()) << "trial " << trial;
    for (const auto& x : a.roots) {
      EXPECT_TRUE(contains(b, Eigen::Vector3d(x(1), x(2), x(0)), 1e-9)) << "trial " << trial;
    }
  }
}

TEST(Re3q3, NoDuplicates) {
  Rng rng = make_rng(34, "dups");
  for (int trial = 0; trial < 2000; ++trial) {
    QuadricCoefficients C;
    for (int i = 0; i < 3; ++i)
      for (int j = 0; j < 10; ++j) C(i, j) = gaussian(rng, 1.0);
    const RootSet r = solve_3q3(C);
    for (std::size_t i = 0; i < r.size(); ++i)
      for (std::size_t j = i + 1; j < r.size(); ++j)
        EXPECT_GE((r.roots[i] - r.roots[j]).norm(), 1e-6);
  }
}

TEST(Re3q3, SeedOnlyChangesRoundoff) {
  Rng rng = make_rng(35, "seed");
  for (int trial = 0; trial < 50; ++trial) {
    const QuadricCoefficients C = oracle::planted_quadrics(rng);
    const RootSet a = solve_3q3(C, 1), b = solve_3q3(C, 2);
    ASSERT_EQ(a.size(), b.size());
    for (const auto& x : a.roots) EXPECT_TRUE(contains(b, x, 1e-9));
    const RootSet c = solve_3q3(C, 1);
    ASSERT_EQ(a.size(), c.size());
    for (std::size_t i = 0; i < a.size(); ++i) EXPECT_EQ(a.roots[i], c.roots[i]);
  }
}

TEST(PolishRoot, ExactRootIsFixedPoint) {
  const Eigen::Vector3d x(1, -1, 1);
  EXPECT_LT((polish_root(separable_system(), x) - x).norm(), 1e-15);
}

TEST(PolishRoot, RecoversPerturbedRoot) {
  const Eigen::Vector3d x(1, -1, 1);
  const Eigen::Vector3d p = polish_root(separable_system(), x + Eigen::Vector3d::Constant(1e-4));
  EXPECT_LT((p - x).norm(), 1e-12);
}

TEST(PolishRoot, ReducesResidualOnRandomSystems) {
  Rng rng = make_rng(36, "polish");
  for (int trial = 0; trial < 50; ++trial) {
    const QuadricCoefficients C = oracle::planted_quadrics(rng);
    const RootSet r = solve_3q3(C);
    ASSERT_FALSE(r.roots.empty());
    const Eigen::Vector3d start = r.roots[0] + Eigen::Vector3d::Constant(1e-5);
    const double before = evaluate_quadrics(C, start).cwiseAbs().maxCoeff();
    const double after = evaluate_quadrics(C, polish_root(C, start)).cwiseAbs().maxCoeff();
    EXPECT_LT(after, std::max(1e-4 * before, 1e-14 * infinity_norm(C)));
  }
}

TEST(PolishRoot, SingularJacobianReturnsInput) {
  QuadricCoefficients C = QuadricCoefficients::Zero();
  C(0, 0) = 1;
  C(1, 3) = 1;
  C(2, 5) = 1;  // x^2 = y^2 = z^2 = 0, Jacobian zero at the origin
  const Eigen::Vector3d o = Eigen::Vector3d::Zero();
  EXPECT_EQ(polish_root(C, o), o);
}

TEST(Re3q3, JacobianMatchesOracle) {
  Rng rng = make_rng(37, "jac");
  const QuadricCoefficients C = oracle::planted_quadrics(rng);
  const Eigen::Vector3d x(0.3, -0.7, 1.1);
  EXPECT_LT((quadrics_jacobian(C, x) - oracle::quadrics_jacobian(C, x)).norm(), 1e-13);
  EXPECT_LT((evaluate_quadrics(C, x) - oracle::eval_quadrics(C, x)).norm(), 1e-13);
}

}  // namespace
}  // namespace p1ac
