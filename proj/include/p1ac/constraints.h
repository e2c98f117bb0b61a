#pragma once

#include <Eigen/Core>

#include "p1ac/geometry.h"

namespace p1ac {

using PoseVector = Eigen::Matrix<double, 12, 1>;
using QuadricMonomials = Eigen::Matrix<double, 10, 1>;
using CayleyMonomials = Eigen::Matrix<double, 13, 1>;
using QuadricCoefficients = Eigen::Matrix<double, 3, 10>;

// Six constraints M * vec([R | t]) = 0 induced by one affine correspondence.
// Columns: r11 r12 r13 r21 r22 r23 r31 r32 r33 t1 t2 t3. Rows 0-1 make the
// point project onto y, rows 2-5 equate m*A and m*J entry-wise (a11, a12,
// a21, a22).
struct LinearConstraintSystem {
  Eigen::Matrix<double, 6, 12> M;
};

// The same six constraints after substituting the Cayley rotation and
// multiplying through by s. Columns:
// [s t1, s t2, s t3, x^2, xy, xz, y^2, yz, z^2, x, y, z, 1].
struct MonomialConstraintSystem {
  Eigen::Matrix<double, 6, 13> M;
};

// Three quadrics in (x, y, z) over [x^2, xy, xz, y^2, yz, z^2, x, y, z, 1]
// plus the map recovering s * t = translation_map * monomials(x, y, z).
struct ReducedQuadricSystem {
  QuadricCoefficients C;
  Eigen::Matrix<double, 3, 10> translation_map;
};

PoseVector vectorize_pose(const Pose& pose);
QuadricMonomials quadric_monomials(const Eigen::Vector3d& xyz);
CayleyMonomials cayley_monomials(const CayleyRotation& c,
                                 const Eigen::Vector3d& t);

// Rows are scaled to unit norm unless `normalize_rows` is false.
LinearConstraintSystem build_linear_system(const AffineCorrespondence& ac,
                                           const OrientedPoint& op,
                                           bool normalize_rows = true);

MonomialConstraintSystem build_monomial_system(const AffineCorrespondence& ac,
                                               const OrientedPoint& op,
                                               bool normalize_rows = true);

// Expands a linear system into its Cayley-monomial form; row i of the result
// evaluated at cayley_monomials(c, t) equals s * (M.row(i) * vec([R(c) | t])).
MonomialConstraintSystem to_monomial_system(const LinearConstraintSystem& sys);

// Gauss-Jordan elimination of the (s t) columns with partial pivoting.
ReducedQuadricSystem eliminate_translation(const MonomialConstraintSystem& sys);

}  // namespace p1ac
