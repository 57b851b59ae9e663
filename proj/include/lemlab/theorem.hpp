#pragma once

#include <functional>
#include <vector>

#include "lemlab/conformal.hpp"
#include "lemlab/core.hpp"
#include "lemlab/fit.hpp"
#include "lemlab/flow.hpp"
#include "lemlab/poly.hpp"

namespace lemlab {

/// Three polynomials of one lemniscate family at times t-h, t, t+h, with the
/// node lists of the outer members matched (nearest neighbor) to the center.
/// Time derivatives are formed by central differences.
class FamilyStencil {
 public:
  FamilyStencil(LemPoly p_minus, LemPoly p_center, LemPoly p_plus, double h);

  /// Build a stencil by sampling a callable t -> LemPoly.
  static FamilyStencil sample(const std::function<LemPoly(double)>& family, double t,
                              double h);

  const LemPoly& minus() const { return minus_; }
  const LemPoly& center() const { return center_; }
  const LemPoly& plus() const { return plus_; }
  double h() const { return h_; }

  /// Central-difference coefficient derivative dP/dt as a ComplexPoly.
  ComplexPoly p_dot() const;
  /// Central-difference d(a^2)/dt of the (real, positive) scale.
  double scale_sq_dot() const;
  /// Central-difference node velocities (test oracle; the residue-based
  /// extraction in node_velocities is the production path).
  std::vector<cplx> node_dot_direct() const;

 private:
  LemPoly minus_, center_, plus_;
  double h_;
};

/// Result of fitting the single real unknown B in the polarized identity
///   d/dt(P(z) P#(xi)) - c P'(z) (P#)'(xi) = B (P(z) P#(xi) - 1)
/// with c fixed to the canonical PG value -2/n. The residual is the
/// coefficientwise sup over all z^i xi^j monomials.
struct NullstellensatzReport {
  double c = 0.0;
  double B = 0.0;
  double residual = 0.0;
  std::vector<cplx> node_velocities;  // forced by the identity; ~0 iff residual ~0
};

/// On-boundary residual of the lemniscate-under-PG necessary condition
///   Re(Pdot(z) conj(P(z))) + (1/n)|P'(z)|^2 = 0 on the trace of the center
/// polynomial.
ResidualReport pg_lemniscate_residual(const FamilyStencil& stencil, const Curve& curve);

NullstellensatzReport nullstellensatz_fit(const FamilyStencil& stencil);

class RadiusSelectionError : public Error {
 public:
  explicit RadiusSelectionError(const std::string& what) : Error(what) {}
};

struct NodeVelocityReport {
  std::vector<cplx> lambda_dot;
  double sup = 0.0;
  double contour_radius = 0.0;
};

/// Node velocities extracted by residues: (1/2pi i) oint Pdot/P dz around each
/// node equals -k_j lambda_dot_j. Trapezoid rule with 64 points on a circle of
/// radius 0.4 times the minimal node separation.
NodeVelocityReport node_velocities(const FamilyStencil& stencil);

struct FrozenNodeReport {
  double B = 0.0;
  double ode_residual = 0.0;    // |d(a^2)/dt - B a^2|
  int obstruction_degree = 0;   // deg Q' = n-1; the family can be a flow only if 0
};

/// The frozen-node reduction P = a(t) Q(z): checks the scalar law
/// d(|a|^2)/dt = B |a|^2 and reports deg Q' as the remaining obstruction.
/// Requires max |lambda_dot| below the freeze threshold.
FrozenNodeReport frozen_node_reduction(const FamilyStencil& stencil,
                                       double freeze_threshold = 1e-8);

/// Per-sample Im{[P/P']'(z_j)} on the curve, computed from the double-pole
/// decomposition (the real constant 1/n drops out). Zero everywhere iff the
/// curve can persist under a time-reversal-invariant weighted process.
ResidualReport time_reversal_residual(const LemPoly& p, const Curve& curve);

/// Closed-form circle radius sqrt(b0^2 + 2t); errors below the vacuum time.
double circle_oracle(double b0, double t);

struct DestructionPoint {
  double t = 0.0;
  DefectReport fit;
};

struct DestructionSeries {
  std::vector<DestructionPoint> points;
  std::vector<Event> events;  // cusp events truncate the series
};

struct DestructionOptions {
  int M = 256;
  int restarts = 8;
  std::uint64_t seed = kDefaultFitSeed;
  FlowOptions flow;
};

/// Pipeline: trace P0 -> fit exterior map -> evolve under PG -> per-step
/// degree-n lemniscate fit with continuation init -> defect time series.
DestructionSeries destruction_experiment(const LemPoly& p0, double T, double dt,
                                         const DestructionOptions& opt = {});

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double r2 = 0.0;
};

/// Least-squares line through (t_i, y_i); r2 is the coefficient of determination.
LinearFit linear_fit(std::span<const double> t, std::span<const double> y);

/// Defect-vs-time slope of a destruction series restricted to [t0, t1].
LinearFit defect_slope(const DestructionSeries& series, double t0, double t1);

}  // namespace lemlab
