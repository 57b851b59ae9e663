#pragma once

#include <functional>
#include <span>
#include <vector>

#include "lemlab/conformal.hpp"
#include "lemlab/core.hpp"

namespace lemlab {

/// Exterior (Richardson) moments: area of the bounded complement plus the
/// contour-computed conserved moments of the unbounded domain,
/// m_k = -(1/2i) oint z^{-k} zbar dz, k = 1..K.
struct MomentVector {
  double area = 0.0;        // m_0 > 0, grows by 2*pi per unit time
  std::vector<cplx> m;      // m[k-1] holds m_k, conserved along the flow
};

/// Positive bounded weight sampled on the theta grid.
struct WeightField {
  std::vector<double> chi;

  explicit WeightField(std::vector<double> values) : chi(std::move(values)) {
    if (chi.empty()) throw UsageError("WeightField: empty");
    for (double v : chi)
      if (!(v > 0.0) || !std::isfinite(v))
        throw UsageError("WeightField: weights must be positive, bounded reals");
  }
};

struct FlowState {
  double t = 0.0;
  LaurentMap map;
  double cusp_margin = 0.0;  // min |z_theta| at the last velocity evaluation
};

/// Time derivative of the map coefficients solving the Galerkin-projected
/// Polubarinova-Galin equation Im(conj(z_t) z_theta) = 1.
struct MapVelocity {
  double b_dot = 0.0;
  std::vector<cplx> a_dot;
  /// Sup of the pointwise PG residual left in the unmatched modes > N+1.
  double unmatched_residual = 0.0;
};

class CuspError : public Error {
 public:
  CuspError(const std::string& what, double t, double margin)
      : Error(what), t(t), margin(margin) {}
  double t;
  double margin;
};

struct FlowOptions {
  double cusp_margin_rel = 1e-4;   // min |z_theta| < rel * b declares a cusp
  double dt_max = 1e-2;
  double monitor_tol = 1e-10;      // unmatched-mode excess that triggers order doubling
  int max_order = 256;             // hard cap on adaptive N
};

/// Solve the square real Galerkin system matching PG Fourier modes 0..N+1.
MapVelocity coefficient_velocities(const LaurentMap& map, const FlowOptions& opt = {});

/// Per-sample PG residual Im(conj(z_t) z_theta) - 1 on the M-grid.
ResidualReport pg_residual(const LaurentMap& map, const MapVelocity& vel, int M);

/// One classical RK4 step; dt may be negative. Throws CuspError (carrying the
/// last good time and margin) when univalence degrades mid-step.
FlowState step(const FlowState& s, double dt, const FlowOptions& opt = {});

struct Event {
  enum class Type { cusp, blowup };
  Type type;
  double t;
  double margin;
};

struct Trajectory {
  std::vector<FlowState> states;
  std::vector<Event> events;
};

using Observer = std::function<void(const FlowState&)>;

/// March nsteps = T/dt RK4 steps, invoking observers on every state (including
/// the initial one). Cusp events terminate the trajectory early and are
/// recorded, not thrown. The truncation order grows adaptively (doubling)
/// while the monitored unmatched-mode excess exceeds opt.monitor_tol.
Trajectory evolve(FlowState s0, double T, double dt, std::span<const Observer> observers = {},
                  const FlowOptions& opt = {});

/// Moments of the curve: area of the bounded complement and the conserved
/// exterior moments m_k = -(1/2i) oint z^{-k} zbar dz for k = 1..K, by the
/// trapezoid rule with spectral z_theta.
MomentVector moments(const Curve& curve, int K);

/// Bounded-complement moments (1/2i) oint z^k zbar dz = int_{complement} z^k dA,
/// k = 0..K. Diagnostic companion to `moments` (these are not conserved).
std::vector<cplx> complement_moments(const Curve& curve, int K);

/// Harmonic boundary speed V_j = 1/|z_theta(theta_j)| (normal derivative of
/// g = log|phi| in the normalization that makes the PG right side 1).
std::vector<double> harmonic_velocity(const LaurentMap& map, int M,
                                      const FlowOptions& opt = {});

class StepTooLargeError : public Error {
 public:
  explicit StepTooLargeError(const std::string& what) : Error(what) {}
};

/// Explicit Euler push of the raw samples along the outward normal:
/// z <- z + chi * V * n_hat * dt. No re-fit is performed.
Curve weighted_step(const Curve& curve, const LaurentMap& map, const WeightField& chi,
                    double dt);

}  // namespace lemlab
