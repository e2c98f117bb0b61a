#pragma once

#include <span>
#include <vector>

namespace p1ac {

// Polynomials are coefficient vectors ordered from the constant term upward:
// c[0] + c[1] t + ... + c[n] t^n.

double evaluate_polynomial(std::span<const double> coeffs, double t);

// Distinct real roots, ascending. Isolation by Sturm-sequence bisection, then
// safeguarded Newton to full precision. Leading zero coefficients are dropped;
// the zero polynomial and nonzero constants have no roots.
std::vector<double> real_roots_sturm(std::span<const double> coeffs);

// Real roots of a t^2 + b t + c = 0 (falls back to linear when a == 0).
int solve_quadratic(double a, double b, double c, double roots[2]);

// Real roots of t^3 + b t^2 + c t + d = 0, Newton-polished.
int solve_monic_cubic(double b, double c, double d, double roots[3]);

}  // namespace p1ac
