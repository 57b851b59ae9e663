#pragma once

#include <cstdint>
#include <optional>

#include "lemlab/conformal.hpp"
#include "lemlab/core.hpp"
#include "lemlab/poly.hpp"

namespace lemlab {

/// Result of fitting a degree-n lemniscate to a closed curve. The defect is
/// the root-mean-square of log|P| over the samples; zero exactly when the
/// curve is the lemniscate of the fitted polynomial at sample resolution.
struct DefectReport {
  int n = 0;
  std::optional<LemPoly> best;
  double defect = std::numeric_limits<double>::infinity();
  double sup_defect = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  std::uint64_t seed = 0;
  int reprojections = 0;  // node-escape re-projections performed
};

/// Per-sample log|P(z_j)|. Samples coinciding with a node produce an
/// infinite residual marker (-inf sample, inf sup).
ResidualReport level_residual(const LemPoly& p, const Curve& curve);

inline constexpr std::uint64_t kDefaultFitSeed = 12345u;

/// Gauss-Newton fit with Levenberg damping on {log a, Re lambda_j, Im lambda_j}
/// minimizing sum log^2|P(z_j)|. Deterministic given init; the default init
/// places simple nodes on a ring around the Fourier-estimated centroid.
/// Clustering nodes trigger a confluent (z-lambda)^n refit.
DefectReport fit(const Curve& curve, int n, const std::optional<LemPoly>& init = std::nullopt);

/// Minimal defect over the default init, `restarts` seeded random restarts,
/// and the confluent candidate; ties broken by lexicographic parameter order.
DefectReport defect_report(const Curve& curve, int n, int restarts = 8,
                           std::uint64_t seed = kDefaultFitSeed);

inline double defect(const Curve& curve, int n, int restarts = 8,
                     std::uint64_t seed = kDefaultFitSeed) {
  return defect_report(curve, n, restarts, seed).defect;
}

}  // namespace lemlab
