#include "p1ac/ransac.h"

#include <Eigen/Cholesky>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include "p1ac/errors.h"
#include "p1ac/p3p.h"
#include "p1ac/random.h"

namespace p1ac {
namespace {

P1ACProblem make_problem(const CorrespondenceItem& item, const Scene& scene) {
  return P1ACProblem{item.ac, item.op, scene.reference_poses[item.reference_index]};
}

SolutionSet hypotheses(Method method, const std::vector<std::size_t>& sample,
                       const CorrespondenceSet& corrs, const Scene& scene,
                       const std::vector<Observation>& obs, std::uint64_t seed) {
  switch (method) {
    case Method::kP3P: {
      PointCorrespondence c[3];
      for (int i = 0; i < 3; ++i) {
        c[i].world_point = obs[sample[i]].world_point;
        c[i].observation = obs[sample[i]].y;
      }
      return solve_p3p(c[0], c[1], c[2]);
    }
    case Method::kP3P1AC:
      return solve_p3p_1ac(make_problem(corrs.items[sample[0]], scene),
                           kBenchFeatureScale);
    case Method::kP1ACNull:
      return solve_p1ac_nullspace(make_problem(corrs.items[sample[0]], scene));
    case Method::kP1AC3Q3:
      return solve_p1ac_3q3(make_problem(corrs.items[sample[0]], scene), seed);
  }
  return {};
}

std::vector<Observation> subset(const std::vector<Observation>& obs,
                                const std::vector<bool>& mask) {
  std::vector<Observation> out;
  for (std::size_t i = 0; i < obs.size(); ++i) {
    if (mask[i]) out.push_back(obs[i]);
  }
  return out;
}

}  // namespace

void RansacConfig::validate() const {
  if (!(inlier_threshold_px > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "RansacConfig: threshold must be > 0");
  }
  if (!(confidence > 0.0 && confidence < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "RansacConfig: confidence must be in (0, 1)");
  }
  if (max_iterations < 1 || lo_steps < 0 || ls_iterations < 0 || min_inliers < 0) {
    throw Error(ErrorCode::kInvalidArgument, "RansacConfig: negative count");
  }
  if (!(focal > 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "RansacConfig: focal must be > 0");
  }
}

int sample_size(Method method) { return method == Method::kP3P ? 3 : 1; }

std::vector<std::size_t> draw_sample(std::uint64_t seed, std::uint64_t iteration,
                                     std::size_t n, std::size_t s) {
  if (s > n) {
    throw Error(ErrorCode::kInsufficientData, "draw_sample: sample larger than set");
  }
  Rng rng = make_rng(seed, "sample", iteration);
  // Sparse partial Fisher-Yates: only displaced positions are stored.
  std::vector<std::pair<std::size_t, std::size_t>> swapped;
  const auto value_at = [&](std::size_t k) {
    for (const auto& [pos, val] : swapped) {
      if (pos == k) return val;
    }
    return k;
  };
  std::vector<std::size_t> out;
  out.reserve(s);
  for (std::size_t i = 0; i < s; ++i) {
    const std::size_t j = std::uniform_int_distribution<std::size_t>(i, n - 1)(rng);
    const std::size_t vi = value_at(i), vj = value_at(j);
    out.push_back(vj);
    std::erase_if(swapped, [&](const auto& p) { return p.first == i || p.first == j; });
    swapped.emplace_back(j, vi);
  }
  return out;
}

int ransac_iteration_bound(double inlier_ratio, int s, double confidence,
                           int max_iterations) {
  if (inlier_ratio >= 1.0) return 1;
  if (!(inlier_ratio > 0.0)) return max_iterations;
  const double p_good = std::pow(inlier_ratio, s);
  const double denom = std::log1p(-p_good);
  if (!(denom < 0.0)) return max_iterations;
  const double k = std::ceil(std::log(1.0 - confidence) / denom);
  if (!(k < max_iterations)) return max_iterations;
  return std::max(1, static_cast<int>(k));
}

std::vector<Observation> observations(const CorrespondenceSet& corrs,
                                      const Scene& scene) {
  std::vector<Observation> out;
  out.reserve(corrs.size());
  for (const CorrespondenceItem& item : corrs.items) {
    if (item.reference_index >= scene.reference_poses.size()) {
      throw Error(ErrorCode::kInvalidArgument, "correspondence: reference index out of range");
    }
    const Pose& ref = scene.reference_poses[item.reference_index];
    out.push_back({ref.inverse().apply(item.op.point()), item.ac.y});
  }
  return out;
}

Score score_hypothesis(const Pose& pose, const std::vector<Observation>& obs,
                       double threshold_px, double focal) {
  const double thr2 = std::pow(threshold_px / focal, 2);
  Score out;
  out.mask.assign(obs.size(), false);
  for (std::size_t i = 0; i < obs.size(); ++i) {
    const Eigen::Vector3d q = pose.apply(obs[i].world_point);
    if (!(q(2) > 0.0)) continue;
    if ((q.hnormalized() - obs[i].y).squaredNorm() < thr2) {
      out.mask[i] = true;
      ++out.inlier_count;
    }
  }
  return out;
}

double reprojection_cost(const Pose& pose, const std::vector<Observation>& obs) {
  double cost = 0.0;
  for (const Observation& o : obs) {
    cost += (pose.apply(o.world_point).hnormalized() - o.y).squaredNorm();
  }
  return cost;
}

Pose refine_non_minimal(const Pose& pose, const std::vector<Observation>& obs,
                        int iterations) {
  if (obs.size() < 4) {
    throw Error(ErrorCode::kInsufficientData, "refine_non_minimal: need >= 4 points");
  }
  using Mat6 = Eigen::Matrix<double, 6, 6>;
  using Vec6 = Eigen::Matrix<double, 6, 1>;
  Pose current = pose;
  double cost = reprojection_cost(current, obs);
  double lambda = -1.0;
  for (int iter = 0; iter < iterations; ++iter) {
    Mat6 H = Mat6::Zero();
    Vec6 g = Vec6::Zero();
    for (const Observation& o : obs) {
      const Eigen::Vector3d RX = current.R * o.world_point;
      const Eigen::Vector3d q = RX + current.t;
      const double iz = 1.0 / q(2);
      Eigen::Matrix<double, 2, 3> dpi;
      dpi << iz, 0, -q(0) * iz * iz, 0, iz, -q(1) * iz * iz;
      Eigen::Matrix<double, 2, 6> J;
      J.leftCols<3>() = -dpi * skew(RX);
      J.rightCols<3>() = dpi;
      const Eigen::Vector2d r = q.hnormalized() - o.y;
      H += J.transpose() * J;
      g += J.transpose() * r;
    }
    if (!H.allFinite() || !g.allFinite()) break;
    if (g.norm() < 1e-16) break;
    if (lambda < 0.0) lambda = 1e-4 * H.diagonal().maxCoeff();

    bool accepted = false;
    for (int attempt = 0; attempt < 10 && !accepted; ++attempt) {
      Mat6 Hd = H;
      Hd.diagonal() += lambda * H.diagonal().cwiseMax(1e-12);
      const Eigen::LDLT<Mat6> ldlt(Hd);
      if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) return current;
      const Vec6 delta = -ldlt.solve(g);
      if (!delta.allFinite()) return current;
      Pose candidate;
      candidate.R = rotation_from_axis_angle(delta.head<3>()) * current.R;
      candidate.t = current.t + delta.tail<3>();
      const double c = reprojection_cost(candidate, obs);
      if (c < cost) {
        current = candidate;
        cost = c;
        lambda = std::max(lambda / 10.0, 1e-12);
        accepted = true;
      } else {
        lambda *= 10.0;
      }
    }
    if (!accepted) break;
  }
  return current;
}

LocalizationResult localize(const CorrespondenceSet& corrs, const Scene& scene,
                            const RansacConfig& cfg, Method method) {
  cfg.validate();
  const auto start = std::chrono::steady_clock::now();
  const std::size_t s = sample_size(method);
  if (corrs.size() < s) {
    throw Error(ErrorCode::kInsufficientData, "localize: not enough correspondences");
  }
  const std::vector<Observation> obs = observations(corrs, scene);
  const std::size_t n = obs.size();

  LocalizationResult best;
  best.inlier_mask.assign(n, false);
  const auto consider = [&](const Pose& pose) {
    Score sc = score_hypothesis(pose, obs, cfg.inlier_threshold_px, cfg.focal);
    if (sc.inlier_count <= best.inlier_count) return false;
    best.pose = pose;
    best.inlier_count = sc.inlier_count;
    best.inlier_mask = std::move(sc.mask);
    return true;
  };
  const auto local_optimization = [&]() {
    for (int step = 0; step < cfg.lo_steps; ++step) {
      if (best.inlier_count < 4) return;
      const Pose refined = refine_non_minimal(
          best.pose, subset(obs, best.inlier_mask), cfg.ls_iterations);
      if (!consider(refined)) return;
    }
  };

  int bound = cfg.max_iterations;
  int iteration = 0;
  while (iteration < bound) {
    const std::vector<std::size_t> sample = draw_sample(cfg.seed, iteration, n, s);
    ++iteration;
    if (best.first_clean_sample < 0 && corrs.inlier_mask) {
      const bool clean = std::all_of(sample.begin(), sample.end(), [&](std::size_t i) {
        return (*corrs.inlier_mask)[i];
      });
      if (clean) best.first_clean_sample = iteration;
    }
    SolutionSet set;
    try {
      set = hypotheses(method, sample, corrs, scene, obs,
                       derive_seed(cfg.seed, "re3q3", iteration));
    } catch (const Error&) {
      continue;
    }
    bool improved = false;
    for (const Pose& pose : set.poses) improved |= consider(pose);
    if (improved) {
      local_optimization();
      bound = ransac_iteration_bound(static_cast<double>(best.inlier_count) / n,
                                     static_cast<int>(s), cfg.confidence,
                                     cfg.max_iterations);
    }
  }
  best.iterations = iteration;

  if (best.inlier_count >= 4) {
    const Pose refined = refine_non_minimal(best.pose, subset(obs, best.inlier_mask),
                                            cfg.ls_iterations);
    const Score sc = score_hypothesis(refined, obs, cfg.inlier_threshold_px, cfg.focal);
    if (sc.inlier_count >= best.inlier_count) {
      best.pose = refined;
      best.inlier_count = sc.inlier_count;
      best.inlier_mask = sc.mask;
    }
  }
  best.succeeded = best.inlier_count >= cfg.min_inliers;
  best.elapsed_ms = std::chrono::duration<double, std::milli>(
                        std::chrono::steady_clock::now() - start)
                        .count();
  return best;
}

SimulatedScene simulate_scene(const SceneSimulation& params) {
  if (!(params.outlier_ratio >= 0.0 && params.outlier_ratio < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "simulate_scene: outlier ratio must be in [0, 1)");
  }
  if (params.num_references == 0) {
    throw Error(ErrorCode::kInvalidArgument, "simulate_scene: need a reference camera");
  }
  params.noise.validate();
  Rng rng = make_rng(params.seed, "scene");
  const auto near_identity = [&](double max_deg) {
    const Eigen::Vector3d axis = random_unit_vector(rng);
    const double angle = uniform(rng, 0.0, max_deg) * std::acos(-1.0) / 180.0;
    return rotation_from_axis_angle(angle * axis);
  };

  SimulatedScene out;
  Pose truth(near_identity(30.0), random_unit_vector(rng));
  out.scene.query_truth = truth;
  for (std::size_t r = 0; r < params.num_references; ++r) {
    out.scene.reference_poses.emplace_back(near_identity(30.0),
                                           uniform(rng, 0.5, 1.5) * random_unit_vector(rng));
  }

  SyntheticProblem inliers;
  inliers.truth = truth;
  for (std::size_t i = 0; i < params.num_correspondences; ++i) {
    const std::size_t ref = i % params.num_references;
    const Pose& G = out.scene.reference_poses[ref];
    const Pose relative = truth * G.inverse();
    for (int tries = 0;; ++tries) {
      if (tries > 1000) {
        throw Error(ErrorCode::kDegenerateConfiguration, "simulate_scene: retry budget exhausted");
      }
      OrientedPoint op;
      op.x = Eigen::Vector2d(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
      op.d = uniform(rng, 4.0, 8.0);
      op.n = random_unit_vector(rng);
      if (op.n.dot(op.point()) > 0.0) op.n = -op.n;
      const Eigen::Vector3d x_h = op.x.homogeneous();
      if (std::abs(op.n.dot(x_h)) < 1e-3 * x_h.norm()) continue;
      const Eigen::Vector3d q = relative.apply(op.point());
      if (!(q(2) >= 0.1 * q.norm())) continue;
      const ProjectionDifferential diff = projection_differential(relative, op);
      P1ACProblem p{AffineCorrespondence{op.x, diff.v, diff.J}, op, G};
      inliers.problems.push_back(p);
      out.scene.oriented_points.push_back(op);
      CorrespondenceItem item;
      item.reference_index = ref;
      item.point_index = i;
      out.corrs.items.push_back(item);
      break;
    }
  }
  const SyntheticProblem noisy =
      apply_noise(inliers, params.noise, derive_seed(params.seed, "noise"));
  for (std::size_t i = 0; i < params.num_correspondences; ++i) {
    out.corrs.items[i].ac = noisy.problems[i].ac;
    out.corrs.items[i].op = noisy.problems[i].op;
    out.scene.oriented_points[i] = noisy.problems[i].op;
  }

  const std::size_t num_outliers =
      static_cast<std::size_t>(std::lround(params.outlier_ratio * params.num_correspondences));
  std::vector<std::size_t> order(params.num_correspondences);
  std::iota(order.begin(), order.end(), 0);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<bool> mask(params.num_correspondences, true);
  for (std::size_t k = 0; k < num_outliers; ++k) {
    CorrespondenceItem& item = out.corrs.items[order[k]];
    item.ac.y = Eigen::Vector2d(uniform(rng, -1.0, 1.0), uniform(rng, -1.0, 1.0));
    for (int e = 0; e < 4; ++e) item.ac.A(e / 2, e % 2) = uniform(rng, -2.0, 2.0);
    mask[order[k]] = false;
  }
  out.corrs.inlier_mask = mask;
  return out;
}

}  // namespace p1ac
