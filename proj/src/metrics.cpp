#include "pft/metrics.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "pft/errors.hpp"

namespace pft {

namespace {

constexpr double kSuccessTransM = 0.05;
constexpr double kSuccessRotRad = 5.0 * M_PI / 180.0;
constexpr int kAucGridPoints = 200;
constexpr double kAucMaxK = 0.2;

double mean_vertex_error(const TriangleMesh& mesh, const Pose& t,
                         const Pose& t_gt) {
  double sum = 0;
  for (const auto& v : mesh.vertices) sum += (t.apply(v) - t_gt.apply(v)).norm();
  return sum / double(mesh.vertices.size());
}

}  // namespace

MetricReport evaluate(const Sequence& seq,
                      const std::vector<TrajectoryEntry>& trajectory,
                      ResetPolicy policy, const TriangleMesh& mesh,
                      double d_m) {
  if (!seq.has_ground_truth()) throw MissingGroundTruth();
  MetricReport report;
  report.d_m = d_m > 0 ? d_m : mesh.diameter();

  std::map<long, const TrajectoryEntry*> by_frame;
  for (const auto& e : trajectory) by_frame[e.frame_index] = &e;

  // Frame 0 is the given initialization and is not scored.
  double runtime_sum = 0;
  for (long i = 1; i < long(seq.gt_poses.size()); ++i) {
    FrameMetrics fm;
    fm.frame_index = i;
    const auto it = by_frame.find(i);
    if (it == by_frame.end()) {
      fm.e_t = std::numeric_limits<double>::infinity();
      fm.e_r = M_PI;
      fm.e_vertex = std::numeric_limits<double>::infinity();
      fm.success = false;
    } else {
      const Pose& gt = seq.gt_poses[size_t(i)];
      const PoseError pe = pose_errors(it->second->pose, gt);
      fm.e_t = pe.e_t;
      fm.e_r = pe.e_r;
      fm.e_vertex = mean_vertex_error(mesh, it->second->pose, gt);
      fm.success = pe.e_t < kSuccessTransM && pe.e_r < kSuccessRotRad;
      fm.runtime_ms = it->second->runtime_ms;
      runtime_sum += fm.runtime_ms;
    }
    if (!fm.success && policy == ResetPolicy::kReset5cm5deg) ++report.resets;
    report.per_frame.push_back(fm);
  }

  const double n = double(report.per_frame.size());
  if (n > 0) {
    size_t successes = 0;
    for (const auto& fm : report.per_frame) successes += fm.success ? 1 : 0;
    report.success_rate = 100.0 * double(successes) / n;
    report.mean_runtime_ms = runtime_sum / n;

    for (double k : {0.02, 0.05, 0.1}) {
      size_t below = 0;
      for (const auto& fm : report.per_frame)
        below += fm.e_vertex < k * report.d_m ? 1 : 0;
      report.add_fractions[k] = 100.0 * double(below) / n;
    }

    // Right-endpoint grid over k_e in (0, 0.2]; perfect tracking scores 20.
    double area = 0;
    for (int g = 1; g <= kAucGridPoints; ++g) {
      const double ke = kAucMaxK * double(g) / kAucGridPoints;
      size_t below = 0;
      for (const auto& fm : report.per_frame)
        below += fm.e_vertex < ke * report.d_m ? 1 : 0;
      area += double(below) / n;
    }
    report.auc = 20.0 * area / kAucGridPoints;
  }
  return report;
}

std::string format_report(const MetricReport& r) {
  std::ostringstream os;
  os.setf(std::ios::fixed);
  os.precision(1);
  os << "frames: " << r.per_frame.size() << "\n";
  os << "success_rate: " << r.success_rate << "\n";
  os.precision(2);
  os << "auc: " << r.auc << "\n";
  for (const auto& [k, pct] : r.add_fractions)
    os << "add_" << k << ": " << pct << "\n";
  os << "resets: " << r.resets << "\n";
  os << "mean_runtime_ms: " << r.mean_runtime_ms << "\n";
  return os.str();
}

std::string report_to_json(const MetricReport& r) {
  nlohmann::json j;
  j["success_rate"] = r.success_rate;
  j["auc"] = r.auc;
  j["resets"] = r.resets;
  j["mean_runtime_ms"] = r.mean_runtime_ms;
  j["d_m"] = r.d_m;
  for (const auto& [k, pct] : r.add_fractions)
    j["add_fractions"][std::to_string(k)] = pct;
  auto& frames = j["per_frame"];
  for (const auto& fm : r.per_frame) {
    nlohmann::json f;
    f["frame"] = fm.frame_index;
    f["e_t"] = std::isfinite(fm.e_t) ? fm.e_t : -1.0;
    f["e_r"] = fm.e_r;
    f["e_vertex"] = std::isfinite(fm.e_vertex) ? fm.e_vertex : -1.0;
    f["success"] = fm.success;
    f["runtime_ms"] = fm.runtime_ms;
    frames.push_back(f);
  }
  return j.dump(2);
}

}  // namespace pft
