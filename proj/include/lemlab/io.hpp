#pragma once

#include <string>
#include <vector>

#include "lemlab/conformal.hpp"
#include "lemlab/fit.hpp"
#include "lemlab/flow.hpp"

namespace lemlab::io {

/// Format a double with 17 significant digits (round-trip exact).
std::string fmt17(double v);

/// Curve CSV with header `theta,re_z,im_z`.
std::string curve_csv(const Curve& curve);
Curve curve_from_csv(const std::string& text);

/// Trajectory CSV: t,b,re_a0,im_a0,...,area,re_m1,im_m1,...,cusp_margin.
/// The coefficient columns are fixed at order N (zero padded) and the moment
/// columns at K.
std::string trajectory_csv(const std::vector<FlowState>& states,
                           const std::vector<MomentVector>& moments, int N, int K);

/// Events JSON: [{"type":"cusp"|"blowup","t":...,"margin":...}, ...].
std::string events_json(const std::vector<Event>& events);

/// DefectReport JSON:
/// {n, a, nodes:[{re,im,mult}], defect, sup_defect, converged, iterations, seed}.
std::string defect_report_json(const DefectReport& rep);

/// One verification check line for the JSON report.
struct CheckResult {
  std::string check;
  std::string inputs;
  double residual = 0.0;
  double threshold = 0.0;
  bool pass = false;
};
std::string checks_json(const std::vector<CheckResult>& checks);

/// SVG plot of boundary snapshots; stroke opacity graded by time order.
std::string boundary_family_svg(const std::vector<Curve>& snapshots);

void write_file(const std::string& path, const std::string& content);
std::string read_file(const std::string& path);

}  // namespace lemlab::io
