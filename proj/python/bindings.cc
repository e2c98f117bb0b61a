#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "p1ac/p1ac.h"
#include "p1ac/p3p.h"
#include "p1ac/ransac.h"
#include "p1ac/re3q3.h"
#include "p1ac/synthetic.h"

namespace py = pybind11;
using namespace p1ac;

namespace {

std::vector<Method> methods_from(const std::vector<std::string>& names) {
  std::vector<Method> out;
  for (const std::string& n : names) out.push_back(parse_method(n));
  return out;
}

}  // namespace

PYBIND11_MODULE(_p1ac, m) {
  m.doc() = "Absolute pose solvers from affine correspondences";

  py::register_exception<Error>(m, "P1ACError", PyExc_ValueError);

  py::class_<Pose>(m, "Pose")
      .def(py::init<>())
      .def(py::init<const Eigen::Matrix3d&, const Eigen::Vector3d&>(), py::arg("R"),
           py::arg("t"))
      .def_readwrite("R", &Pose::R)
      .def_readwrite("t", &Pose::t)
      .def("apply", &Pose::apply)
      .def("center", &Pose::center)
      .def("inverse", &Pose::inverse)
      .def("is_valid", &Pose::is_valid, py::arg("tolerance") = 1e-9)
      .def("__mul__", [](const Pose& a, const Pose& b) { return a * b; });

  py::class_<OrientedPoint>(m, "OrientedPoint")
      .def(py::init<>())
      .def(py::init([](const Eigen::Vector2d& x, double d, const Eigen::Vector3d& n) {
             return OrientedPoint{x, d, n};
           }),
           py::arg("x"), py::arg("d"), py::arg("n"))
      .def_readwrite("x", &OrientedPoint::x)
      .def_readwrite("d", &OrientedPoint::d)
      .def_readwrite("n", &OrientedPoint::n)
      .def("point", &OrientedPoint::point);

  py::class_<AffineCorrespondence>(m, "AffineCorrespondence")
      .def(py::init<>())
      .def(py::init([](const Eigen::Vector2d& x, const Eigen::Vector2d& y,
                       const Eigen::Matrix2d& A) { return AffineCorrespondence{x, y, A}; }),
           py::arg("x"), py::arg("y"), py::arg("A"))
      .def_readwrite("x", &AffineCorrespondence::x)
      .def_readwrite("y", &AffineCorrespondence::y)
      .def_readwrite("A", &AffineCorrespondence::A);

  py::class_<P1ACProblem>(m, "P1ACProblem")
      .def(py::init<>())
      .def(py::init([](const AffineCorrespondence& ac, const OrientedPoint& op,
                       const Pose& ref) { return P1ACProblem{ac, op, ref}; }),
           py::arg("ac"), py::arg("op"), py::arg("ref_pose") = Pose())
      .def_readwrite("ac", &P1ACProblem::ac)
      .def_readwrite("op", &P1ACProblem::op)
      .def_readwrite("ref_pose", &P1ACProblem::ref_pose);

  py::class_<SolutionSet>(m, "SolutionSet")
      .def_readonly("poses", &SolutionSet::poses)
      .def_readonly("algebraic_residuals", &SolutionSet::algebraic_residuals)
      .def_readonly("cheirality", &SolutionSet::cheirality)
      .def("__len__", &SolutionSet::size);

  m.def("project", [](const Eigen::Vector3d& p) { return project(p); });
  m.def("unproject", [](const Eigen::Vector2d& u, const OrientedPoint& op) {
    return unproject(u, op);
  });
  m.def("projection_differential", [](const Pose& pose, const OrientedPoint& op) {
    return projection_differential(pose, op).J;
  });
  m.def("pose_error", [](const Pose& est, const Pose& truth) {
    const PoseError e = pose_error(est, truth);
    return py::make_tuple(e.angular_deg, e.position);
  }, "Returns (angular error in degrees, position error).");

  m.def("solve_p1ac_nullspace", &solve_p1ac_nullspace, py::arg("problem"));
  m.def("solve_p1ac_3q3", &solve_p1ac_3q3, py::arg("problem"),
        py::arg("seed") = kDefaultRe3q3Seed);
  m.def("solve_p3p", [](const Eigen::Matrix3d& world_points, const Eigen::Matrix<double, 3, 2>& obs) {
    PointCorrespondence c[3];
    for (int i = 0; i < 3; ++i) {
      c[i].world_point = world_points.row(i).transpose();
      c[i].observation = obs.row(i).transpose();
    }
    return solve_p3p(c[0], c[1], c[2]);
  }, py::arg("world_points"), py::arg("observations"),
     "world_points: 3x3 (one point per row); observations: 3x2 normalized.");
  m.def("solve_p3p_1ac", &solve_p3p_1ac, py::arg("problem"), py::arg("scale") = 1.0);
  m.def("solve_3q3", [](const QuadricCoefficients& C, std::uint64_t seed) {
    const RootSet r = solve_3q3(C, seed);
    return py::make_tuple(r.roots, r.residuals);
  }, py::arg("C"), py::arg("seed") = kDefaultRe3q3Seed,
     "C: 3x10 over [x^2, xy, xz, y^2, yz, z^2, x, y, z, 1]. Returns (roots, residuals).");

  m.def("generate_problem", [](std::uint64_t seed) {
    const SyntheticProblem p = generate_problem(seed);
    return py::make_tuple(p.truth, p.problems);
  }, py::arg("seed"), "Returns (truth pose, list of P1ACProblem).");
  m.def("run_stability", [](std::size_t n, const std::vector<std::string>& methods,
                            std::uint64_t seed, bool include_timing) {
    const ExperimentReport r = run_stability(n, methods_from(methods), seed);
    return py::make_tuple(r.to_csv(include_timing), r.summary_json(include_timing));
  }, py::arg("n"), py::arg("methods"), py::arg("seed") = 0,
     py::arg("include_timing") = true, "Returns (csv rows, json summary).");

  py::class_<RansacConfig>(m, "RansacConfig")
      .def(py::init<>())
      .def_readwrite("inlier_threshold_px", &RansacConfig::inlier_threshold_px)
      .def_readwrite("max_iterations", &RansacConfig::max_iterations)
      .def_readwrite("lo_steps", &RansacConfig::lo_steps)
      .def_readwrite("ls_iterations", &RansacConfig::ls_iterations)
      .def_readwrite("confidence", &RansacConfig::confidence)
      .def_readwrite("min_inliers", &RansacConfig::min_inliers)
      .def_readwrite("focal", &RansacConfig::focal)
      .def_readwrite("seed", &RansacConfig::seed);

  py::class_<LocalizationResult>(m, "LocalizationResult")
      .def_readonly("pose", &LocalizationResult::pose)
      .def_readonly("inlier_count", &LocalizationResult::inlier_count)
      .def_readonly("iterations", &LocalizationResult::iterations)
      .def_readonly("elapsed_ms", &LocalizationResult::elapsed_ms)
      .def_readonly("succeeded", &LocalizationResult::succeeded);

  m.def("localize_simulated", [](std::size_t num_correspondences, double outlier_ratio,
                                 double point_sigma_px, std::uint64_t scene_seed,
                                 const std::string& method, const RansacConfig& cfg) {
    SceneSimulation sim;
    sim.num_correspondences = num_correspondences;
    sim.outlier_ratio = outlier_ratio;
    sim.noise.point_sigma_px = point_sigma_px;
    sim.seed = scene_seed;
    const SimulatedScene s = simulate_scene(sim);
    return py::make_tuple(localize(s.corrs, s.scene, cfg, parse_method(method)),
                          *s.scene.query_truth);
  }, py::arg("num_correspondences"), py::arg("outlier_ratio"),
     py::arg("point_sigma_px") = 1.0, py::arg("scene_seed") = 0,
     py::arg("method") = "p1ac-3q3", py::arg("config") = RansacConfig(),
     "Simulates a scene and localizes it. Returns (result, true pose).");
}
