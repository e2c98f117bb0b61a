#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Core>

#include "p1ac/constraints.h"
#include "p1ac/geometry.h"
#include "p1ac/re3q3.h"

namespace p1ac {

// One affine correspondence plus the oriented point it observes, expressed in
// the reference camera. ref_pose maps world to reference coordinates.
struct P1ACProblem {
  AffineCorrespondence ac;
  OrientedPoint op;
  Pose ref_pose;
};

// Candidate query poses in world coordinates.
struct SolutionSet {
  std::vector<Pose> poses;
  std::vector<double> algebraic_residuals;  // max |M vec([R t])|
  std::vector<bool> cheirality;             // point in front of the query

  std::size_t size() const { return poses.size(); }
  bool empty() const { return poses.empty(); }
  void add(const Pose& pose, double residual, bool in_front);
};

struct NullspaceBasis {
  Eigen::Matrix<double, 12, 6> B;
  Eigen::Matrix<double, 6, 1> b;  // coefficients of the last solution, b(5) == 1
};

// Orthonormal right nullspace of M. Throws kRankDeficient if rank(M) < 6.
NullspaceBasis compute_nullspace_basis(const LinearConstraintSystem& sys);

// Solves the ten orthogonality quadratics in the nullspace coefficients with an
// action matrix built at runtime. At most eight poses.
SolutionSet solve_p1ac_nullspace(const P1ACProblem& problem);

// Cayley parameterization, translation eliminated, 3Q3 on the rotation.
SolutionSet solve_p1ac_3q3(const P1ACProblem& problem,
                           std::uint64_t seed = kDefaultRe3q3Seed);

SolutionSet filter_cheirality(const SolutionSet& solutions,
                              const P1ACProblem& problem);

// Max |M vec([R t])| of a reference-frame pose on the row-normalized system.
double algebraic_residual(const LinearConstraintSystem& sys, const Pose& pose);

}  // namespace p1ac
