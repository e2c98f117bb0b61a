#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

#include "json.hpp"
#include "p1ac/synthetic.h"

namespace p1ac {
namespace {

std::string fmt(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

// JSON has no infinity; failures are reported as null.
nlohmann::json number(double v) {
  if (!std::isfinite(v)) return nullptr;
  return v;
}

double median(std::vector<double> v) {
  if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + mid, v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + mid);
  return 0.5 * (lower + upper);
}

bool same_cell(const CellSummary& c, const ReportRow& r) {
  return c.method == r.method && c.noise.point_sigma_px == r.noise.point_sigma_px &&
         c.noise.affine_sigma == r.noise.affine_sigma &&
         c.noise.normal_sigma_deg == r.noise.normal_sigma_deg;
}

nlohmann::json noise_json(const NoiseSpec& n) {
  return {{"point_sigma_px", n.point_sigma_px},
          {"affine_sigma", n.affine_sigma},
          {"normal_sigma_deg", n.normal_sigma_deg}};
}

}  // namespace

std::vector<CellSummary> ExperimentReport::summarize() const {
  std::vector<CellSummary> cells;
  std::vector<std::vector<const ReportRow*>> members;
  for (const ReportRow& r : rows) {
    std::size_t k = 0;
    while (k < cells.size() && !same_cell(cells[k], r)) ++k;
    if (k == cells.size()) {
      CellSummary c;
      c.method = r.method;
      c.noise = r.noise;
      cells.push_back(c);
      members.emplace_back();
    }
    members[k].push_back(&r);
  }
  for (std::size_t k = 0; k < cells.size(); ++k) {
    CellSummary& c = cells[k];
    std::vector<double> ang, pos;
    double time = 0.0;
    for (const ReportRow* r : members[k]) {
      ++c.count;
      time += r->solve_time_us;
      if (r->failed) {
        ++c.failures;
        continue;
      }
      ang.push_back(r->angular_err_deg);
      pos.push_back(r->position_err);
    }
    c.mean_time_us = time / c.count;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    c.mean_angular_deg = ang.empty() ? nan : 0.0;
    c.mean_position = pos.empty() ? nan : 0.0;
    for (const double a : ang) c.mean_angular_deg += a / ang.size();
    for (const double p : pos) c.mean_position += p / pos.size();
    c.median_angular_deg = median(ang);
    c.median_position = median(pos);
  }
  return cells;
}

const char* ExperimentReport::csv_header() {
  return "method,point_sigma_px,affine_sigma,normal_sigma_deg,angular_err_deg,"
         "position_err,solve_time_us,seed";
}

std::string ExperimentReport::to_csv(bool include_timing) const {
  std::ostringstream os;
  os << csv_header() << '\n';
  for (const ReportRow& r : rows) {
    os << method_name(r.method) << ',' << fmt(r.noise.point_sigma_px) << ','
       << fmt(r.noise.affine_sigma) << ',' << fmt(r.noise.normal_sigma_deg) << ','
       << fmt(r.angular_err_deg) << ',' << fmt(r.position_err) << ','
       << (include_timing ? fmt(r.solve_time_us) : std::string()) << ',' << r.seed
       << '\n';
  }
  return os.str();
}

std::string ExperimentReport::rows_json(bool include_timing) const {
  nlohmann::json out = nlohmann::json::array();
  for (const ReportRow& r : rows) {
    nlohmann::json j = {{"method", method_name(r.method)},
                        {"noise", noise_json(r.noise)},
                        {"angular_err_deg", number(r.angular_err_deg)},
                        {"position_err", number(r.position_err)},
                        {"failed", r.failed},
                        {"num_solutions", r.num_solutions},
                        {"seed", r.seed}};
    if (include_timing) j["solve_time_us"] = r.solve_time_us;
    out.push_back(std::move(j));
  }
  return out.dump(2) + "\n";
}

std::string ExperimentReport::summary_json(bool include_timing) const {
  nlohmann::json cells = nlohmann::json::array();
  for (const CellSummary& c : summarize()) {
    nlohmann::json j = {{"method", method_name(c.method)},
                        {"noise", noise_json(c.noise)},
                        {"count", c.count},
                        {"failures", c.failures},
                        {"mean_angular_err_deg", number(c.mean_angular_deg)},
                        {"median_angular_err_deg", number(c.median_angular_deg)},
                        {"mean_position_err", number(c.mean_position)},
                        {"median_position_err", number(c.median_position)}};
    if (include_timing) j["mean_solve_time_us"] = c.mean_time_us;
    cells.push_back(std::move(j));
  }
  return nlohmann::json{{"cells", cells}}.dump(2) + "\n";
}

}  // namespace p1ac
