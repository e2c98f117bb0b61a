#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "p1ac/errors.h"
#include "p1ac/ransac.h"
#include "p1ac/synthetic.h"

namespace {

using namespace p1ac;

constexpr int kExitRuntime = 1;
constexpr int kExitUsage = 2;

struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// "a,b,c" or "start:stop:count".
std::vector<double> parse_grid(const std::string& text) {
  const auto number = [&](const std::string& s) {
    std::size_t used = 0;
    double v = 0.0;
    try {
      v = std::stod(s, &used);
    } catch (const std::exception&) {
      throw UsageError("malformed grid '" + text + "'");
    }
    if (used != s.size() || !std::isfinite(v) || v < 0.0) {
      throw UsageError("malformed grid '" + text + "'");
    }
    return v;
  };
  std::vector<std::string> parts;
  if (text.find(':') != std::string::npos) {
    std::stringstream ss(text);
    for (std::string p; std::getline(ss, p, ':');) parts.push_back(p);
    if (parts.size() != 3) throw UsageError("malformed grid '" + text + "'");
    const double lo = number(parts[0]), hi = number(parts[1]);
    const double count = number(parts[2]);
    if (count < 1 || count != std::floor(count) || hi < lo) {
      throw UsageError("malformed grid '" + text + "'");
    }
    const int n = static_cast<int>(count);
    std::vector<double> out;
    for (int i = 0; i < n; ++i) {
      out.push_back(n == 1 ? lo : lo + (hi - lo) * i / (n - 1));
    }
    return out;
  }
  std::stringstream ss(text);
  std::vector<double> out;
  for (std::string p; std::getline(ss, p, ',');) out.push_back(number(p));
  if (out.empty() || text.back() == ',') throw UsageError("malformed grid '" + text + "'");
  return out;
}

std::vector<Method> parse_method_list(const std::string& text) {
  try {
    return parse_methods(text);
  } catch (const p1ac::Error& e) {
    throw UsageError(e.what());
  }
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    std::cout.flush();
    return;
  }
  std::ofstream os(path, std::ios::binary);
  if (!os) throw p1ac::Error(ErrorCode::kIo, "cannot open '" + path + "' for writing");
  os << text;
  if (!os) throw p1ac::Error(ErrorCode::kIo, "failed writing '" + path + "'");
}

struct ReportOptions {
  std::string out = "-";
  std::string summary;
  std::string format = "csv";
  bool no_timing = false;
};

void add_report_options(CLI::App* app, ReportOptions& o) {
  app->add_option("--out", o.out, "Per-row output path ('-' for stdout)");
  app->add_option("--summary", o.summary, "JSON summary path");
  app->add_option("--format", o.format, "Row format")
      ->check(CLI::IsMember({"csv", "json"}));
  app->add_flag("--no-timing", o.no_timing, "Omit timing values");
}

void emit(const ExperimentReport& report, const ReportOptions& o) {
  const bool timing = !o.no_timing;
  write_text(o.out, o.format == "json" ? report.rows_json(timing) : report.to_csv(timing));
  if (!o.summary.empty()) write_text(o.summary, report.summary_json(timing));
}

void log_config(const CLI::App* sub) {
  std::cerr << "# p1ac_bench " << sub->get_name() << "\n";
  std::istringstream cfg(sub->config_to_str(true, false));
  for (std::string line; std::getline(cfg, line);) {
    if (!line.empty()) std::cerr << "#   " << line << "\n";
  }
}

// "p3p<3q3<null" style chain of method names or short aliases.
std::vector<Method> parse_order(const std::string& text) {
  static const std::map<std::string, Method> aliases = {
      {"p3p", Method::kP3P},       {"p3p-1ac", Method::kP3P1AC},
      {"3q3", Method::kP1AC3Q3},   {"p1ac-3q3", Method::kP1AC3Q3},
      {"null", Method::kP1ACNull}, {"p1ac-null", Method::kP1ACNull}};
  std::vector<Method> out;
  std::stringstream ss(text);
  for (std::string name; std::getline(ss, name, '<');) {
    const auto it = aliases.find(name);
    if (it == aliases.end()) throw UsageError("unknown method '" + name + "' in --assert-order");
    out.push_back(it->second);
  }
  if (out.size() < 2) throw UsageError("--assert-order needs at least two methods");
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"P1AC solver benchmarks and localization"};
  app.require_subcommand(1);

  std::uint64_t seed = 0;
  int n_stability = 10000, n_sweep = 1000, n_timings = 10000;
  std::string methods = "p3p,p3p-1ac,p1ac-null,p1ac-3q3";
  ReportOptions report_opts;

  auto* stability = app.add_subcommand("stability", "Noise-free accuracy over random problems");
  stability->add_option("--n", n_stability, "Problem count")->check(CLI::PositiveNumber)->capture_default_str();
  stability->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
  stability->add_option("--seed", seed, "Master seed")->capture_default_str();
  add_report_options(stability, report_opts);

  std::string point_grid, affine_grid, normal_grid;
  auto* sweep = app.add_subcommand("noise-sweep", "Errors over a grid of noise levels");
  sweep->add_option("--n", n_sweep, "Problems per cell")->check(CLI::PositiveNumber)->capture_default_str();
  sweep->add_option("--point-grid", point_grid, "Point noise (px): list or start:stop:count");
  sweep->add_option("--affine-grid", affine_grid, "Affine noise: list or start:stop:count");
  sweep->add_option("--normal-grid", normal_grid, "Normal noise (deg): list or start:stop:count");
  sweep->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
  sweep->add_option("--seed", seed, "Master seed")->capture_default_str();
  double focal = 1000.0;
  sweep->add_option("--focal", focal, "Pixels per calibrated unit")
      ->check(CLI::PositiveNumber)->capture_default_str();
  add_report_options(sweep, report_opts);

  std::string assert_order;
  auto* timings = app.add_subcommand("timings", "Mean solver time");
  timings->add_option("--n", n_timings, "Problem count")->check(CLI::PositiveNumber)->capture_default_str();
  timings->add_option("--methods", methods, "Comma-separated methods")->capture_default_str();
  timings->add_option("--seed", seed, "Master seed")->capture_default_str();
  timings->add_option("--assert-order", assert_order, "e.g. p3p<3q3<null");
  add_report_options(timings, report_opts);

  std::string scene_path, method = "p1ac-3q3", result_out = "-";
  bool no_timing = false;
  RansacConfig cfg;
  auto* loc = app.add_subcommand("localize", "LO-RANSAC on a scene file");
  loc->add_option("--scene", scene_path, "Scene JSON")->required();
  loc->add_option("--method", method, "Minimal solver")
      ->check(CLI::IsMember({"p3p", "p3p-1ac", "p1ac-null", "p1ac-3q3"}))
      ->capture_default_str();
  loc->add_option("--threshold", cfg.inlier_threshold_px, "Inlier threshold (px)")
      ->check(CLI::PositiveNumber)->capture_default_str();
  loc->add_option("--max-iterations", cfg.max_iterations)->check(CLI::PositiveNumber)->capture_default_str();
  loc->add_option("--lo-steps", cfg.lo_steps)->check(CLI::NonNegativeNumber)->capture_default_str();
  loc->add_option("--ls-iterations", cfg.ls_iterations)->check(CLI::NonNegativeNumber)->capture_default_str();
  loc->add_option("--confidence", cfg.confidence)->check(CLI::Range(1e-9, 1.0 - 1e-12))->capture_default_str();
  loc->add_option("--min-inliers", cfg.min_inliers)->check(CLI::NonNegativeNumber)->capture_default_str();
  loc->add_option("--focal", cfg.focal)->check(CLI::PositiveNumber)->capture_default_str();
  loc->add_option("--seed", cfg.seed)->capture_default_str();
  loc->add_option("--out", result_out, "Result JSON path ('-' for stdout)");
  loc->add_flag("--no-timing", no_timing, "Omit elapsed time");

  SceneSimulation sim;
  std::string scene_out = "-";
  auto* gen = app.add_subcommand("gen-scene", "Simulate a scene with outliers");
  gen->add_option("--refs", sim.num_references, "Reference cameras")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--corrs", sim.num_correspondences, "Correspondences")->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--outlier-ratio", sim.outlier_ratio, "Fraction of outliers, in [0, 1)")
      ->check(CLI::Validator(
          [](std::string& s) -> std::string {
            double v = 0.0;
            try {
              v = std::stod(s);
            } catch (const std::exception&) {
              return "not a number";
            }
            return (v >= 0.0 && v < 1.0) ? "" : "must be in [0, 1)";
          },
          "[0,1)"))
      ->capture_default_str();
  gen->add_option("--point-sigma", sim.noise.point_sigma_px, "px")->check(CLI::NonNegativeNumber)->capture_default_str();
  gen->add_option("--affine-sigma", sim.noise.affine_sigma)->check(CLI::NonNegativeNumber)->capture_default_str();
  gen->add_option("--normal-sigma", sim.noise.normal_sigma_deg, "deg")->check(CLI::NonNegativeNumber)->capture_default_str();
  gen->add_option("--focal", sim.noise.focal)->check(CLI::PositiveNumber)->capture_default_str();
  gen->add_option("--seed", sim.seed)->capture_default_str();
  gen->add_option("--out", scene_out, "Scene JSON path ('-' for stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kExitUsage;
  }

  try {
    if (stability->parsed()) {
      log_config(stability);
      const auto ms = parse_method_list(methods);
      emit(run_stability(n_stability, ms, seed), report_opts);
    } else if (sweep->parsed()) {
      log_config(sweep);
      const auto ms = parse_method_list(methods);
      std::vector<NoiseSpec> grid;
      if (point_grid.empty() && affine_grid.empty() && normal_grid.empty()) {
        grid = default_point_affine_grid();
        const auto second = default_point_normal_grid();
        grid.insert(grid.end(), second.begin(), second.end());
      } else {
        const auto pts = point_grid.empty() ? std::vector<double>{0.0} : parse_grid(point_grid);
        const auto aff = affine_grid.empty() ? std::vector<double>{0.0} : parse_grid(affine_grid);
        const auto nrm = normal_grid.empty() ? std::vector<double>{0.0} : parse_grid(normal_grid);
        for (const double nv : nrm) {
          for (const double av : aff) {
            for (const double pv : pts) grid.push_back(NoiseSpec{pv, av, nv, focal});
          }
        }
      }
      for (NoiseSpec& s : grid) s.focal = focal;
      emit(run_noise_sweep(grid, n_sweep, ms, seed), report_opts);
    } else if (timings->parsed()) {
      log_config(timings);
      const auto order = assert_order.empty() ? std::vector<Method>{} : parse_order(assert_order);
      auto ms = parse_method_list(methods);
      for (const Method m : order) {
        if (std::find(ms.begin(), ms.end(), m) == ms.end()) ms.push_back(m);
      }
      if (n_timings < 1000) {
        std::cerr << "warning: --n " << n_timings << " is below 1000; timings will be noisy\n";
      }
      const ExperimentReport report = run_timings(n_timings, ms, seed);
      emit(report, report_opts);
      if (!order.empty()) {
        const auto time_of = [&](Method m) {
          for (const ReportRow& r : report.rows) {
            if (r.method == m) return r.solve_time_us;
          }
          return 0.0;
        };
        for (std::size_t i = 0; i + 1 < order.size(); ++i) {
          if (!(time_of(order[i]) < time_of(order[i + 1]))) {
            std::cerr << "order violated: " << method_name(order[i]) << " "
                      << time_of(order[i]) << " us >= " << method_name(order[i + 1])
                      << " " << time_of(order[i + 1]) << " us\n";
            return kExitRuntime;
          }
        }
        std::cerr << "order satisfied: " << assert_order << "\n";
      }
    } else if (loc->parsed()) {
      log_config(loc);
      const SimulatedScene scene = read_scene(scene_path);
      const LocalizationResult result =
          localize(scene.corrs, scene.scene, cfg, parse_method(method));
      write_text(result_out, result_to_json(result, scene.scene.query_truth, !no_timing));
    } else if (gen->parsed()) {
      log_config(gen);
      const SimulatedScene scene = simulate_scene(sim);
      write_text(scene_out, scene_to_json(scene.scene, scene.corrs));
    }
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const p1ac::Error& e) {
    std::cerr << "error [" << error_code_name(e.code()) << "]: " << e.what() << "\n";
    return e.code() == ErrorCode::kInvalidArgument ? kExitUsage : kExitRuntime;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
  return 0;
}
