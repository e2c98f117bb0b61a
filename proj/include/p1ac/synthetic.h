#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "p1ac/geometry.h"
#include "p1ac/p1ac.h"

namespace p1ac {

struct NoiseSpec {
  double point_sigma_px = 0.0;
  double affine_sigma = 0.0;
  double normal_sigma_deg = 0.0;
  double focal = 1000.0;  // pixels per calibrated unit

  bool is_zero() const {
    return point_sigma_px == 0.0 && affine_sigma == 0.0 && normal_sigma_deg == 0.0;
  }
  // Throws kInvalidArgument on negative sigmas or a non-positive focal.
  void validate() const;
};

// Reference camera at the origin, query pose `truth`, and the generated
// affine correspondences (all with identity ref_pose).
struct SyntheticProblem {
  Pose truth;
  std::vector<P1ACProblem> problems;
  std::uint64_t seed = 0;
};

// Canonical frame scale (calibrated units) used for p3p-1ac, about 10 px at
// focal 1000.
inline constexpr double kBenchFeatureScale = 0.01;

enum class Method { kP3P, kP3P1AC, kP1ACNull, kP1AC3Q3 };

inline constexpr Method kAllMethods[] = {Method::kP3P, Method::kP3P1AC,
                                         Method::kP1ACNull, Method::kP1AC3Q3};

const char* method_name(Method m);
// "p3p", "p3p-1ac", "p1ac-null", "p1ac-3q3"; throws kInvalidArgument.
Method parse_method(std::string_view name);
// Comma-separated list of method names.
std::vector<Method> parse_methods(std::string_view list);

SyntheticProblem generate_problem(std::uint64_t seed, int num_correspondences = 3);

// Perturbs query observations, affine matrices and normals. Each noise type
// draws from its own substream of `seed`.
SyntheticProblem apply_noise(const SyntheticProblem& problem,
                             const NoiseSpec& spec, std::uint64_t seed);

// The P3P baseline uses the 3D points and query observations of the first
// three correspondences; the other methods use the first correspondence.
SolutionSet run_method(Method method, const SyntheticProblem& problem,
                       std::uint64_t seed = 0);

struct SetError {
  PoseError error;
  bool failed = true;  // empty solution set
  int best_index = -1;
};

// Best member by angular error (radians) plus position error.
SetError solution_set_error(const SolutionSet& set, const Pose& truth);

struct ReportRow {
  Method method = Method::kP3P;
  NoiseSpec noise;
  double angular_err_deg = 0.0;
  double position_err = 0.0;
  double solve_time_us = 0.0;
  std::uint64_t seed = 0;
  bool failed = false;
  int num_solutions = 0;
};

struct CellSummary {
  Method method = Method::kP3P;
  NoiseSpec noise;
  std::size_t count = 0;
  std::size_t failures = 0;
  double mean_angular_deg = 0.0;
  double median_angular_deg = 0.0;
  double mean_position = 0.0;
  double median_position = 0.0;
  double mean_time_us = 0.0;
};

struct ExperimentReport {
  std::vector<ReportRow> rows;

  // Grouped by (method, noise cell) in first-appearance order. Failed rows
  // count toward `failures` only.
  std::vector<CellSummary> summarize() const;

  static const char* csv_header();
  std::string to_csv(bool include_timing = true) const;
  std::string rows_json(bool include_timing = true) const;
  std::string summary_json(bool include_timing = true) const;
};

ExperimentReport run_stability(std::size_t n, const std::vector<Method>& methods,
                               std::uint64_t seed);

ExperimentReport run_noise_sweep(const std::vector<NoiseSpec>& grid, std::size_t n,
                                 const std::vector<Method>& methods,
                                 std::uint64_t seed);

// Point noise 0..10 px (11 steps) crossed with affine noise 0..0.05 (6 steps),
// normal noise fixed at 1 deg.
std::vector<NoiseSpec> default_point_affine_grid();
// Point noise 0..10 px crossed with normal noise 0..10 deg (11 steps each),
// affine noise fixed at 0.01.
std::vector<NoiseSpec> default_point_normal_grid();

// One row per method: mean errors and mean solve time over n problems after a
// warm-up pass. Throws kInsufficientData for n == 0.
ExperimentReport run_timings(std::size_t n, const std::vector<Method>& methods,
                             std::uint64_t seed);

}  // namespace p1ac
