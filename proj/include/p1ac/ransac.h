#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "p1ac/geometry.h"
#include "p1ac/synthetic.h"

namespace p1ac {

struct Scene {
  std::vector<Pose> reference_poses;          // world to reference camera
  std::vector<OrientedPoint> oriented_points;  // each in its reference frame
  std::optional<Pose> query_truth;
};

struct CorrespondenceItem {
  AffineCorrespondence ac;
  OrientedPoint op;
  std::size_t reference_index = 0;
  std::size_t point_index = 0;
};

struct CorrespondenceSet {
  std::vector<CorrespondenceItem> items;
  std::optional<std::vector<bool>> inlier_mask;  // ground truth, if simulated

  std::size_t size() const { return items.size(); }
};

struct RansacConfig {
  double inlier_threshold_px = 16.0;
  int max_iterations = 1000;
  int lo_steps = 10;
  int ls_iterations = 10;
  double confidence = 0.99;
  int min_inliers = 10;
  double focal = 1000.0;
  std::uint64_t seed = 0;

  // Throws kInvalidArgument.
  void validate() const;
};

struct LocalizationResult {
  Pose pose;
  int inlier_count = 0;
  int iterations = 0;
  double elapsed_ms = 0.0;
  bool succeeded = false;
  std::vector<bool> inlier_mask;
  // First iteration (1-based) whose sample held only ground-truth inliers;
  // -1 without a ground-truth mask or if none did.
  int first_clean_sample = -1;
};

// Minimal samples per method: 3 for p3p, 1 otherwise.
int sample_size(Method method);

// Sample of `s` distinct indices in [0, n) for one iteration. The draw is a
// partial Fisher-Yates shuffle, so samples of different sizes with the same
// (seed, iteration) share their leading elements.
std::vector<std::size_t> draw_sample(std::uint64_t seed, std::uint64_t iteration,
                                     std::size_t n, std::size_t s);

// ceil(log(1 - confidence) / log(1 - w^s)) clamped to [1, max_iterations].
int ransac_iteration_bound(double inlier_ratio, int s, double confidence,
                           int max_iterations);

struct Observation {
  Eigen::Vector3d world_point;
  Eigen::Vector2d y;
};

// World points and query observations of every item. Throws
// kInvalidArgument on out-of-range reference indices.
std::vector<Observation> observations(const CorrespondenceSet& corrs,
                                      const Scene& scene);

struct Score {
  int inlier_count = 0;
  std::vector<bool> mask;
};

// Inlier iff in front of the camera and reprojection error below the
// threshold (converted with `focal`).
Score score_hypothesis(const Pose& pose, const std::vector<Observation>& obs,
                       double threshold_px, double focal);

double reprojection_cost(const Pose& pose, const std::vector<Observation>& obs);

// Levenberg-Marquardt on the summed squared reprojection error, rotation in a
// local chart. Needs >= 4 observations (kInsufficientData); returns the input
// when the normal equations are singular.
Pose refine_non_minimal(const Pose& pose, const std::vector<Observation>& obs,
                        int iterations);

LocalizationResult localize(const CorrespondenceSet& corrs, const Scene& scene,
                            const RansacConfig& cfg, Method method);

struct SceneSimulation {
  std::size_t num_references = 3;
  std::size_t num_correspondences = 200;
  double outlier_ratio = 0.0;
  NoiseSpec noise;
  std::uint64_t seed = 0;
};

struct SimulatedScene {
  Scene scene;
  CorrespondenceSet corrs;
};

// Exactly lround(outlier_ratio * num_correspondences) outliers, whose query
// observation and affine matrix are replaced by unrelated random values.
SimulatedScene simulate_scene(const SceneSimulation& params);

// "p1ac-scene/1" JSON interchange.
std::string scene_to_json(const Scene& scene, const CorrespondenceSet& corrs);
SimulatedScene scene_from_json(const std::string& text);
void write_scene(const std::string& path, const Scene& scene,
                 const CorrespondenceSet& corrs);
SimulatedScene read_scene(const std::string& path);

std::string result_to_json(const LocalizationResult& result,
                           const std::optional<Pose>& truth,
                           bool include_timing = true);

}  // namespace p1ac
