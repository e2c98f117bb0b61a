#include "p1ac/univariate.h"

#include <algorithm>
#include <cmath>
#include <limits>

namespace p1ac {
namespace {

using Poly = std::vector<double>;

void trim(Poly& p, double tol) {
  while (!p.empty() && std::abs(p.back()) <= tol) p.pop_back();
}

double max_abs(const Poly& p) {
  double m = 0.0;
  for (const double c : p) m = std::max(m, std::abs(c));
  return m;
}

// Remainder of a / b, with b's leading coefficient nonzero.
Poly remainder(Poly a, const Poly& b) {
  const int db = static_cast<int>(b.size()) - 1;
  for (int i = static_cast<int>(a.size()) - 1; i >= db; --i) {
    const double f = a[i] / b[db];
    for (int j = 0; j <= db; ++j) a[i - db + j] -= f * b[j];
    a[i] = 0.0;
  }
  a.resize(std::max(db, 0));
  return a;
}

class SturmChain {
 public:
  explicit SturmChain(const Poly& p) {
    chain_.push_back(p);
    Poly dp(p.size() - 1);
    for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = i * p[i];
    chain_.push_back(dp);
    while (chain_.back().size() > 1) {
      const Poly& prev = chain_[chain_.size() - 2];
      Poly r = remainder(prev, chain_.back());
      for (double& c : r) c = -c;
      trim(r, 1e-14 * std::max(max_abs(prev), 1e-300));
      if (r.empty()) break;
      // Rescaling by a positive constant keeps sign counts intact.
      const double s = max_abs(r);
      for (double& c : r) c /= s;
      chain_.push_back(std::move(r));
    }
  }

  int sign_changes(double t) const {
    int changes = 0;
    int last = 0;
    for (const Poly& q : chain_) {
      const double v = evaluate_polynomial(q, t);
      const int s = (v > 0.0) - (v < 0.0);
      if (s == 0) continue;
      if (last != 0 && s != last) ++changes;
      last = s;
    }
    return changes;
  }

 private:
  std::vector<Poly> chain_;
};

// Root of a polynomial with a sign change in [lo, hi].
double bracketed_root(const Poly& p, const Poly& dp, double lo, double hi) {
  double flo = evaluate_polynomial(p, lo);
  if (flo == 0.0) return lo;
  if (evaluate_polynomial(p, hi) == 0.0) return hi;
  double x = 0.5 * (lo + hi);
  for (int iter = 0; iter < 200; ++iter) {
    const double fx = evaluate_polynomial(p, x);
    if (fx == 0.0) return x;
    if ((fx < 0.0) == (flo < 0.0)) {
      lo = x;
      flo = fx;
    } else {
      hi = x;
    }
    const double dfx = evaluate_polynomial(dp, x);
    double next = (dfx != 0.0) ? x - fx / dfx : 0.5 * (lo + hi);
    if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <=
        4.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(x))) {
      return next;
    }
    x = next;
  }
  return x;
}

Poly derivative(const Poly& p) {
  Poly dp(p.size() > 1 ? p.size() - 1 : 1, 0.0);
  for (std::size_t i = 1; i < p.size(); ++i) dp[i - 1] = i * p[i];
  return dp;
}

}  // namespace

double evaluate_polynomial(std::span<const double> coeffs, double t) {
  double acc = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) acc = acc * t + *it;
  return acc;
}

std::vector<double> real_roots_sturm(std::span<const double> coeffs) {
  Poly p(coeffs.begin(), coeffs.end());
  trim(p, 0.0);
  std::vector<double> roots;
  if (p.size() <= 1) return roots;

  const double lead = p.back();
  for (double& c : p) c /= lead;
  if (p.size() == 2) {
    roots.push_back(-p[0]);
    return roots;
  }
  if (p.size() == 3) {
    double r[2];
    const int n = solve_quadratic(1.0, p[1], p[0], r);
    roots.assign(r, r + n);
    std::sort(roots.begin(), roots.end());
    return roots;
  }

  double bound = 0.0;
  for (std::size_t i = 0; i + 1 < p.size(); ++i) bound = std::max(bound, std::abs(p[i]));
  bound += 1.0;

  const SturmChain chain(p);
  const Poly dp = derivative(p);
  const Poly ddp = derivative(dp);

  struct Interval {
    double lo, hi;
    int c_lo, c_hi;
  };
  std::vector<Interval> stack;
  stack.push_back({-bound, bound, chain.sign_changes(-bound), chain.sign_changes(bound)});

  while (!stack.empty()) {
    const Interval iv = stack.back();
    stack.pop_back();
    const int count = iv.c_lo - iv.c_hi;
    if (count <= 0) continue;

    const double width = iv.hi - iv.lo;
    const double mid = 0.5 * (iv.lo + iv.hi);
    if (count > 1 &&
        width > 1e-14 * std::max(1.0, std::abs(mid))) {
      const int c_mid = chain.sign_changes(mid);
      stack.push_back({mid, iv.hi, c_mid, iv.c_hi});
      stack.push_back({iv.lo, mid, iv.c_lo, c_mid});
      continue;
    }
    if (count > 1) {
      roots.push_back(mid);  // cluster narrower than machine resolution
      continue;
    }
    const double f_lo = evaluate_polynomial(p, iv.lo);
    const double f_hi = evaluate_polynomial(p, iv.hi);
    if ((f_lo < 0.0) != (f_hi < 0.0) || f_lo == 0.0 || f_hi == 0.0) {
      roots.push_back(bracketed_root(p, dp, iv.lo, iv.hi));
      continue;
    }
    // Even multiplicity: the root is an extremum, located where p' vanishes.
    const double d_lo = evaluate_polynomial(dp, iv.lo);
    const double d_hi = evaluate_polynomial(dp, iv.hi);
    if ((d_lo < 0.0) != (d_hi < 0.0)) {
      roots.push_back(bracketed_root(dp, ddp, iv.lo, iv.hi));
    } else {
      roots.push_back(mid);
    }
  }
  std::sort(roots.begin(), roots.end());
  return roots;
}

int solve_quadratic(double a, double b, double c, double roots[2]) {
  if (a == 0.0) {
    if (b == 0.0) return 0;
    roots[0] = -c / b;
    return 1;
  }
  const double disc = b * b - 4.0 * a * c;
  if (disc < 0.0) return 0;
  const double sq = std::sqrt(disc);
  const double q = -0.5 * (b + std::copysign(sq, b));
  if (q == 0.0) {
    roots[0] = 0.0;
    roots[1] = 0.0;
    return 2;
  }
  roots[0] = q / a;
  roots[1] = c / q;
  return 2;
}

int solve_monic_cubic(double b, double c, double d, double roots[3]) {
  // Depressed cubic t = s - b/3: s^3 + p s + q = 0.
  const double b3 = b / 3.0;
  const double p = c - b * b3;
  const double q = 2.0 * b3 * b3 * b3 - b3 * c + d;
  int n = 0;
  const double disc = 0.25 * q * q + p * p * p / 27.0;
  if (disc > 0.0) {
    const double sq = std::sqrt(disc);
    roots[n++] = std::cbrt(-0.5 * q + sq) + std::cbrt(-0.5 * q - sq) - b3;
  } else if (p == 0.0) {
    roots[n++] = -b3;
  } else {
    const double r = std::sqrt(-p / 3.0);
    const double arg = std::clamp(-0.5 * q / (r * r * r), -1.0, 1.0);
    const double phi = std::acos(arg) / 3.0;
    constexpr double kTwoThirdsPi = 2.0943951023931954923;
    for (int k = 0; k < 3; ++k) {
      roots[n++] = 2.0 * r * std::cos(phi - k * kTwoThirdsPi) - b3;
    }
  }
  for (int i = 0; i < n; ++i) {
    double t = roots[i];
    for (int iter = 0; iter < 2; ++iter) {
      const double f = ((t + b) * t + c) * t + d;
      const double df = (3.0 * t + 2.0 * b) * t + c;
      if (df == 0.0) break;
      t -= f / df;
    }
    roots[i] = t;
  }
  return n;
}

}  // namespace p1ac
