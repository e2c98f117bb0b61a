#include "p1ac/synthetic.h"

#include <algorithm>
#include <chrono>
#include <limits>
#include <cmath>
#include <numbers>

#include "p1ac/errors.h"
#include "p1ac/p3p.h"
#include "p1ac/random.h"

namespace p1ac {
namespace {

constexpr int kMaxRetries = 1000;
constexpr int kMaxPointRetries = 20;
constexpr double kMinViewCosine = 1e-2;

double deg_to_rad(double deg) { return deg * std::numbers::pi / 180.0; }

// Draws one oriented point seen by both cameras; false if the draw is unusable.
bool draw_correspondence(Rng& rng, const Pose& truth, P1ACProblem* out) {
  OrientedPoint op;
  op.x = Eigen::Vector2d(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
  op.d = uniform(rng, 4.0, 8.0);
  op.n = random_unit_vector(rng);
  const Eigen::Vector3d p = op.point();
  if (op.n.dot(p) > 0.0) op.n = -op.n;

  const Eigen::Vector3d x_h = op.x.homogeneous();
  if (std::abs(op.n.dot(x_h)) < 1e-3 * x_h.norm()) return false;
  // Behind, or almost on the principal plane of, the query camera.
  const Eigen::Vector3d q = truth.apply(p);
  if (!(q(2) >= kMinViewCosine * q.norm())) return false;

  const ProjectionDifferential diff = projection_differential(truth, op);
  out->op = op;
  out->ac.x = op.x;
  out->ac.y = diff.v;
  out->ac.A = diff.J;
  out->ref_pose = Pose();
  return true;
}

}  // namespace

void NoiseSpec::validate() const {
  if (!(point_sigma_px >= 0.0) || !(affine_sigma >= 0.0) ||
      !(normal_sigma_deg >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "NoiseSpec: sigmas must be >= 0");
  }
  if (!(focal > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "NoiseSpec: focal must be > 0");
  }
}

const char* method_name(Method m) {
  switch (m) {
    case Method::kP3P: return "p3p";
    case Method::kP3P1AC: return "p3p-1ac";
    case Method::kP1ACNull: return "p1ac-null";
    case Method::kP1AC3Q3: return "p1ac-3q3";
  }
  return "unknown";
}

Method parse_method(std::string_view name) {
  for (const Method m : kAllMethods) {
    if (name == method_name(m)) return m;
  }
  throw Error(ErrorCode::kInvalidArgument,
              "unknown method '" + std::string(name) + "'");
}

std::vector<Method> parse_methods(std::string_view list) {
  std::vector<Method> out;
  std::size_t start = 0;
  while (start <= list.size()) {
    const std::size_t end = std::min(list.find(',', start), list.size());
    out.push_back(parse_method(list.substr(start, end - start)));
    start = end + 1;
  }
  return out;
}

SyntheticProblem generate_problem(std::uint64_t seed, int num_correspondences) {
  if (num_correspondences < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "generate_problem: need at least one correspondence");
  }
  Rng rng(seed);
  SyntheticProblem out;
  out.seed = seed;
  for (int attempt = 0; attempt < kMaxRetries; ++attempt) {
    // A query camera facing away from the scene never sees the points, so
    // the pose is redrawn along with them.
    out.truth.R = random_rotation(rng);
    out.truth.t = random_unit_vector(rng);
    out.problems.clear();
    for (int i = 0; i < num_correspondences; ++i) {
      P1ACProblem problem;
      for (int tries = 0; tries < kMaxPointRetries; ++tries) {
        if (draw_correspondence(rng, out.truth, &problem)) {
          out.problems.push_back(problem);
          break;
        }
      }
      if (static_cast<int>(out.problems.size()) != i + 1) break;
    }
    if (static_cast<int>(out.problems.size()) == num_correspondences) return out;
  }
  throw Error(ErrorCode::kDegenerateConfiguration,
              "generate_problem: retry budget exhausted");
}

SyntheticProblem apply_noise(const SyntheticProblem& problem,
                             const NoiseSpec& spec, std::uint64_t seed) {
  spec.validate();
  SyntheticProblem out = problem;
  Rng point_rng = make_rng(seed, "point");
  Rng affine_rng = make_rng(seed, "affine");
  Rng normal_rng = make_rng(seed, "normal");
  const double point_sigma = spec.point_sigma_px / spec.focal;
  for (P1ACProblem& p : out.problems) {
    if (point_sigma > 0.0) {
      p.ac.y(0) += gaussian(point_rng, point_sigma);
      p.ac.y(1) += gaussian(point_rng, point_sigma);
    }
    if (spec.affine_sigma > 0.0) {
      for (int k = 0; k < 4; ++k) p.ac.A(k / 2, k % 2) += gaussian(affine_rng, spec.affine_sigma);
    }
    if (spec.normal_sigma_deg > 0.0) {
      // Axis orthogonal to n, so the tilt equals the drawn angle.
      const Eigen::Vector3d r = random_unit_vector(normal_rng);
      Eigen::Vector3d axis = p.op.n.cross(r);
      if (axis.norm() < 1e-9) axis = p.op.n.unitOrthogonal();
      axis.normalize();
      const double angle = std::abs(gaussian(normal_rng, deg_to_rad(spec.normal_sigma_deg)));
      p.op.n = (rotation_from_axis_angle(angle * axis) * p.op.n).normalized();
    }
  }
  return out;
}

SolutionSet run_method(Method method, const SyntheticProblem& problem,
                       std::uint64_t seed) {
  const P1ACProblem& first = problem.problems.front();
  switch (method) {
    case Method::kP3P: {
      if (problem.problems.size() < 3) {
        throw Error(ErrorCode::kInsufficientData, "run_method: p3p needs three points");
      }
      PointCorrespondence c[3];
      for (int i = 0; i < 3; ++i) {
        const P1ACProblem& p = problem.problems[i];
        c[i].world_point = p.ref_pose.inverse().apply(p.op.point());
        c[i].observation = p.ac.y;
      }
      return solve_p3p(c[0], c[1], c[2]);
    }
    case Method::kP3P1AC:
      return solve_p3p_1ac(first, kBenchFeatureScale);
    case Method::kP1ACNull:
      return solve_p1ac_nullspace(first);
    case Method::kP1AC3Q3:
      return solve_p1ac_3q3(first, seed);
  }
  return {};
}

SetError solution_set_error(const SolutionSet& set, const Pose& truth) {
  SetError out;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < set.size(); ++i) {
    const PoseError e = pose_error(set.poses[i], truth);
    const double score = deg_to_rad(e.angular_deg) + e.position;
    if (score < best || out.failed) {
      best = score;
      out.error = e;
      out.failed = false;
      out.best_index = static_cast<int>(i);
    }
  }
  if (out.failed) {
    out.error.angular_deg = 180.0;
    out.error.position = std::numeric_limits<double>::infinity();
  }
  return out;
}

namespace {

ReportRow solve_row(Method method, const SyntheticProblem& problem,
                    const NoiseSpec& noise, std::uint64_t solver_seed,
                    std::uint64_t row_seed) {
  ReportRow row;
  row.method = method;
  row.noise = noise;
  row.seed = row_seed;
  SolutionSet set;
  const auto start = std::chrono::steady_clock::now();
  try {
    set = run_method(method, problem, solver_seed);
  } catch (const Error&) {
    // Degenerate instances count as failures.
  }
  const auto stop = std::chrono::steady_clock::now();
  row.solve_time_us = std::chrono::duration<double, std::micro>(stop - start).count();
  const SetError e = solution_set_error(set, problem.truth);
  row.failed = e.failed;
  row.angular_err_deg = e.error.angular_deg;
  row.position_err = e.error.position;
  row.num_solutions = static_cast<int>(set.size());
  return row;
}

}  // namespace

ExperimentReport run_stability(std::size_t n, const std::vector<Method>& methods,
                               std::uint64_t seed) {
  return run_noise_sweep({NoiseSpec{}}, n, methods, seed);
}

ExperimentReport run_noise_sweep(const std::vector<NoiseSpec>& grid, std::size_t n,
                                 const std::vector<Method>& methods,
                                 std::uint64_t seed) {
  if (n == 0) throw Error(ErrorCode::kInsufficientData, "experiment: n must be >= 1");
  for (const NoiseSpec& s : grid) s.validate();
  ExperimentReport report;
  report.rows.reserve(grid.size() * methods.size() * n);
  std::vector<SyntheticProblem> base(n);
  for (std::size_t i = 0; i < n; ++i) {
    base[i] = generate_problem(derive_seed(seed, "problem", i));
  }
  for (const NoiseSpec& spec : grid) {
    for (const Method method : methods) {
      for (std::size_t i = 0; i < n; ++i) {
        const SyntheticProblem noisy =
            spec.is_zero() ? base[i]
                           : apply_noise(base[i], spec, derive_seed(base[i].seed, "noise"));
        report.rows.push_back(solve_row(method, noisy, spec,
                                        derive_seed(base[i].seed, "re3q3"), base[i].seed));
      }
    }
  }
  return report;
}

std::vector<NoiseSpec> default_point_affine_grid() {
  std::vector<NoiseSpec> grid;
  for (int a = 0; a <= 5; ++a) {
    for (int p = 0; p <= 10; ++p) {
      NoiseSpec s;
      s.point_sigma_px = p;
      s.affine_sigma = 0.01 * a;
      s.normal_sigma_deg = 1.0;
      grid.push_back(s);
    }
  }
  return grid;
}

std::vector<NoiseSpec> default_point_normal_grid() {
  std::vector<NoiseSpec> grid;
  for (int k = 0; k <= 10; ++k) {
    for (int p = 0; p <= 10; ++p) {
      NoiseSpec s;
      s.point_sigma_px = p;
      s.affine_sigma = 0.01;
      s.normal_sigma_deg = k;
      grid.push_back(s);
    }
  }
  return grid;
}

ExperimentReport run_timings(std::size_t n, const std::vector<Method>& methods,
                             std::uint64_t seed) {
  if (n == 0) {
    throw Error(ErrorCode::kInsufficientData, "run_timings: n must be >= 1");
  }
  std::vector<SyntheticProblem> problems(n);
  std::vector<std::uint64_t> solver_seeds(n);
  for (std::size_t i = 0; i < n; ++i) {
    problems[i] = generate_problem(derive_seed(seed, "problem", i));
    solver_seeds[i] = derive_seed(problems[i].seed, "re3q3");
  }

  ExperimentReport report;
  std::size_t sink = 0;
  for (const Method method : methods) {
    const auto call = [&](std::size_t i) {
      try {
        return run_method(method, problems[i], solver_seeds[i]);
      } catch (const Error&) {
        return SolutionSet{};
      }
    };
    for (std::size_t i = 0; i < std::min<std::size_t>(n, 100); ++i) sink += call(i).size();

    std::vector<SolutionSet> sets(n);
    const auto start = std::chrono::steady_clock::now();
    for (std::size_t i = 0; i < n; ++i) sets[i] = call(i);
    const auto stop = std::chrono::steady_clock::now();

    ReportRow row;
    row.method = method;
    row.seed = seed;
    row.solve_time_us =
        std::chrono::duration<double, std::micro>(stop - start).count() / n;
    std::size_t ok = 0;
    for (std::size_t i = 0; i < n; ++i) {
      sink += sets[i].size();
      const SetError e = solution_set_error(sets[i], problems[i].truth);
      if (e.failed) continue;
      ++ok;
      row.angular_err_deg += e.error.angular_deg;
      row.position_err += e.error.position;
    }
    row.failed = ok == 0;
    if (ok > 0) {
      row.angular_err_deg /= ok;
      row.position_err /= ok;
    }
    row.num_solutions = static_cast<int>(ok);
    report.rows.push_back(row);
  }
  if (sink == static_cast<std::size_t>(-1)) report.rows.clear();
  return report;
}

}  // namespace p1ac
