#include <fstream>
#include <sstream>

#include "json.hpp"
#include "p1ac/errors.h"
#include "p1ac/ransac.h"

namespace p1ac {
namespace {

using nlohmann::json;

constexpr const char* kSceneVersion = "p1ac-scene/1";

json pose_json(const Pose& p) {
  json R = json::array(), t = json::array();
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) R.push_back(p.R(i, j));
    t.push_back(p.t(i));
  }
  return {{"R", R}, {"t", t}};
}

template <int N>
Eigen::Matrix<double, N, 1> vec(const json& j, const char* what) {
  if (!j.is_array() || j.size() != N) {
    throw Error(ErrorCode::kFormat, std::string("scene: '") + what + "' must have " +
                                        std::to_string(N) + " numbers");
  }
  Eigen::Matrix<double, N, 1> v;
  for (int i = 0; i < N; ++i) v(i) = j.at(i).get<double>();
  return v;
}

Pose parse_pose(const json& j) {
  const auto r = vec<9>(j.at("R"), "R");
  Pose p;
  p.R << r(0), r(1), r(2), r(3), r(4), r(5), r(6), r(7), r(8);
  p.t = vec<3>(j.at("t"), "t");
  return p;
}

}  // namespace

std::string scene_to_json(const Scene& scene, const CorrespondenceSet& corrs) {
  json doc;
  doc["version"] = kSceneVersion;
  doc["reference_poses"] = json::array();
  for (const Pose& p : scene.reference_poses) doc["reference_poses"].push_back(pose_json(p));
  doc["oriented_points"] = json::array();
  for (const OrientedPoint& op : scene.oriented_points) {
    doc["oriented_points"].push_back(
        {{"x", {op.x(0), op.x(1)}}, {"d", op.d}, {"n", {op.n(0), op.n(1), op.n(2)}}});
  }
  doc["correspondences"] = json::array();
  for (const CorrespondenceItem& c : corrs.items) {
    doc["correspondences"].push_back(
        {{"x", {c.ac.x(0), c.ac.x(1)}},
         {"y", {c.ac.y(0), c.ac.y(1)}},
         {"A", {c.ac.A(0, 0), c.ac.A(0, 1), c.ac.A(1, 0), c.ac.A(1, 1)}},
         {"ref", c.reference_index},
         {"point", c.point_index}});
  }
  if (scene.query_truth) doc["query_truth"] = pose_json(*scene.query_truth);
  if (corrs.inlier_mask) doc["inlier_mask"] = *corrs.inlier_mask;
  return doc.dump(1) + "\n";
}

SimulatedScene scene_from_json(const std::string& text) {
  try {
    const json doc = json::parse(text);
    if (doc.value("version", std::string()) != kSceneVersion) {
      throw Error(ErrorCode::kFormat, "scene: unsupported version");
    }
    SimulatedScene out;
    for (const json& p : doc.at("reference_poses")) {
      out.scene.reference_poses.push_back(parse_pose(p));
    }
    for (const json& j : doc.at("oriented_points")) {
      OrientedPoint op;
      op.x = vec<2>(j.at("x"), "x");
      op.d = j.at("d").get<double>();
      op.n = vec<3>(j.at("n"), "n");
      out.scene.oriented_points.push_back(op);
    }
    for (const json& j : doc.at("correspondences")) {
      CorrespondenceItem c;
      c.ac.x = vec<2>(j.at("x"), "x");
      c.ac.y = vec<2>(j.at("y"), "y");
      const auto a = vec<4>(j.at("A"), "A");
      c.ac.A << a(0), a(1), a(2), a(3);
      c.reference_index = j.at("ref").get<std::size_t>();
      c.point_index = j.at("point").get<std::size_t>();
      if (c.reference_index >= out.scene.reference_poses.size() ||
          c.point_index >= out.scene.oriented_points.size()) {
        throw Error(ErrorCode::kFormat, "scene: correspondence index out of range");
      }
      c.op = out.scene.oriented_points[c.point_index];
      out.corrs.items.push_back(c);
    }
    if (out.scene.reference_poses.empty()) {
      throw Error(ErrorCode::kFormat, "scene: no reference poses");
    }
    if (doc.contains("query_truth")) out.scene.query_truth = parse_pose(doc["query_truth"]);
    if (doc.contains("inlier_mask")) {
      out.corrs.inlier_mask = doc["inlier_mask"].get<std::vector<bool>>();
      if (out.corrs.inlier_mask->size() != out.corrs.size()) {
        throw Error(ErrorCode::kFormat, "scene: inlier mask size mismatch");
      }
    }
    return out;
  } catch (const json::exception& e) {
    throw Error(ErrorCode::kFormat, std::string("scene: ") + e.what());
  }
}

void write_scene(const std::string& path, const Scene& scene,
                 const CorrespondenceSet& corrs) {
  std::ofstream os(path);
  if (!os) throw Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  os << scene_to_json(scene, corrs);
  if (!os) throw Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

SimulatedScene read_scene(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw Error(ErrorCode::kIo, "cannot open '" + path + "'");
  std::ostringstream ss;
  ss << is.rdbuf();
  return scene_from_json(ss.str());
}

std::string result_to_json(const LocalizationResult& result,
                           const std::optional<Pose>& truth,
                           bool include_timing) {
  json doc = {{"pose", pose_json(result.pose)},
              {"inlier_count", result.inlier_count},
              {"iterations", result.iterations},
              {"succeeded", result.succeeded}};
  if (include_timing) doc["elapsed_ms"] = result.elapsed_ms;
  if (truth) {
    const PoseError e = pose_error(result.pose, *truth);
    doc["angular_err_deg"] = e.angular_deg;
    doc["position_err"] = e.position;
  }
  return doc.dump(2) + "\n";
}

}  // namespace p1ac
