#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "lemlab/conformal.hpp"
#include "lemlab/core.hpp"
#include "lemlab/poly.hpp"

namespace lemlab {

struct CircleInit {
  double b0 = 1.0;
  cplx center = 0.0;
};
struct EllipseInit {
  double b0 = 1.0;
  double a0 = 0.0;
};
struct LemniscateInit {
  double a = 1.0;
  std::vector<cplx> nodes;
  std::vector<int> mults;  // empty = all ones
};
struct CoefficientsInit {
  double b = 1.0;
  std::vector<cplx> a;
};

/// Scenario configuration parsed from a plain-text `key = value` tree file
/// with dotted paths. Unknown keys are errors, not warnings.
struct ScenarioConfig {
  std::variant<CircleInit, EllipseInit, LemniscateInit, CoefficientsInit> initial;

  double T = 0.5;
  double dt = 1e-3;
  int N = 16;  // coefficient cap for adaptive truncation / CSV layout
  int M = 256;
  int K = 8;
  int fit_degree = 0;  // 0 = derive from the initial condition
  int fit_restarts = 8;
  std::uint64_t fit_seed = 12345;
  double tol_tail = 1e-13;
  double tol_cusp = 1e-4;
  std::string out_dir = "out";
  int svg_stride = 0;  // 0 disables the SVG plot

  std::vector<double> sweep_rho;
  std::vector<int> sweep_n;

  /// Effective fit degree (initial-condition degree when not set explicitly).
  int effective_fit_degree() const;
};

ScenarioConfig parse_scenario(const std::string& text);
ScenarioConfig load_scenario(const std::string& path);

/// The initial exterior map of the configured domain. Lemniscate initial data
/// is traced at grid.M and Fourier-fitted with order cap M/4-1.
LaurentMap initial_map(const ScenarioConfig& cfg);

/// The canonical scenario file shipped with the tool (also used by tests).
std::string canonical_scenario_text();

}  // namespace lemlab
