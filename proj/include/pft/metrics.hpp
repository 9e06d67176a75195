#ifndef PFT_METRICS_HPP
#define PFT_METRICS_HPP

#include <map>
#include <string>
#include <vector>

#include "pft/mesh.hpp"
#include "pft/sequence.hpp"

namespace pft {

enum class ResetPolicy { kNone, kReset5cm5deg };

struct FrameMetrics {
  long frame_index = 0;
  double e_t = 0;       // meters
  double e_r = 0;       // radians
  double e_vertex = 0;  // mean vertex distance, meters
  bool success = false; // 5cm-5deg
  double runtime_ms = 0;
};

struct MetricReport {
  std::vector<FrameMetrics> per_frame;
  double success_rate = 0;  // percent
  double auc = 0;           // 0..20
  std::map<double, double> add_fractions;  // threshold k -> percent
  int resets = 0;
  double mean_runtime_ms = 0;
  double d_m = 0;  // model diameter used for the vertex thresholds
};

// Per-frame Eq.-style pose errors against ground truth, 5cm-5deg success,
// mean-vertex-error ADD fractions and the 0..20 AUC score on a 200-point
// threshold grid.  Ground-truth frames missing from the trajectory count as
// failures.  Pure function of its inputs.  Throws MissingGroundTruth.
MetricReport evaluate(const Sequence& seq,
                      const std::vector<TrajectoryEntry>& trajectory,
                      ResetPolicy policy, const TriangleMesh& mesh,
                      double d_m = 0 /* 0: mesh.diameter() */);

// Human-readable summary table.
std::string format_report(const MetricReport& report);
// MetricReport as a JSON document.
std::string report_to_json(const MetricReport& report);

}  // namespace pft

#endif  // PFT_METRICS_HPP
