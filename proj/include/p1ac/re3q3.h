#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "p1ac/constraints.h"

namespace p1ac {

// Real roots of three quadrics in (x, y, z), monomial order
// [x^2, xy, xz, y^2, yz, z^2, x, y, z, 1].
struct RootSet {
  std::vector<Eigen::Vector3d> roots;
  std::vector<double> residuals;  // max |f_i(root)|

  std::size_t size() const { return roots.size(); }
};

inline constexpr std::uint64_t kDefaultRe3q3Seed = 0x5eed3a3bULL;

// Hidden-variable elimination: z becomes the hidden variable after a random
// orthogonal change of variables drawn from `seed`, x^2, xy, y^2 are
// eliminated, and the real roots of the degree-8 determinant are isolated
// with Sturm sequences. Every root is Newton-polished on the input system and
// kept only if its residual is below 1e-6 * ||C||_inf.
//
// Throws Error(kDegenerateSystem) when the system has a solution family.
RootSet solve_3q3(const QuadricCoefficients& C,
                  std::uint64_t seed = kDefaultRe3q3Seed);

Eigen::Vector3d evaluate_quadrics(const QuadricCoefficients& C,
                                  const Eigen::Vector3d& X);
Eigen::Matrix3d quadrics_jacobian(const QuadricCoefficients& C,
                                  const Eigen::Vector3d& X);

// Up to `max_iterations` damped Newton steps. Returns the input unchanged when
// the Jacobian is singular there.
Eigen::Vector3d polish_root(const QuadricCoefficients& C,
                            const Eigen::Vector3d& root,
                            int max_iterations = 10);

// Max absolute row sum.
double infinity_norm(const QuadricCoefficients& C);

}  // namespace p1ac
