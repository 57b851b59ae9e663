#include "lemlab/flow.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <sstream>

#include "lemlab/kernels.hpp"

namespace lemlab {

namespace {

int next_pow2(int m) {
  int p = 1;
  while (p < m) p <<= 1;
  return p;
}

// Coefficient c_m of the map as a Fourier series in w = e^{i theta}:
// c_1 = b, c_{-k} = a_k for k = 0..N, zero otherwise.
cplx map_coeff(const LaurentMap& map, int m) {
  if (m == 1) return cplx(map.b);
  if (m <= 0 && -m <= map.order()) return map.a[std::size_t(-m)];
  return cplx(0.0);
}

double min_abs(std::span<const cplx> v) {
  double r = std::abs(v[0]);
  for (const cplx& x : v) r = std::min(r, std::abs(x));
  return r;
}

void check_cusp(const LaurentMap& map, double t, const FlowOptions& opt, double* margin_out) {
  const int M = next_pow2(std::max(8, 4 * (map.order() + 2)));
  const double margin = min_abs(boundary_dtheta(map, M));
  if (margin_out) *margin_out = margin;
  if (margin < opt.cusp_margin_rel * map.b) {
    std::ostringstream msg;
    msg << "cusp: min |z_theta| = " << margin << " at t = " << t;
    throw CuspError(msg.str(), t, margin);
  }
}

std::vector<cplx> velocity_samples(const MapVelocity& vel, int M) {
  // z_t has the same frequency layout as the map: b_dot at +1, a_dot at -k.
  std::vector<cplx> spec(std::size_t(M), cplx(0.0));
  spec[1] = cplx(vel.b_dot);
  spec[0] = vel.a_dot[0];
  for (std::size_t k = 1; k < vel.a_dot.size(); ++k) spec[M - k] = vel.a_dot[k];
  return kernels::synth_spectrum(std::move(spec));
}

}  // namespace

MapVelocity coefficient_velocities(const LaurentMap& map, const FlowOptions& opt) {
  const int N = map.order();
  const int D = 2 * N + 3;
  check_cusp(map, 0.0, opt, nullptr);

  // Unknown layout: x0 = b_dot; x_{1+2k}, x_{2+2k} = Re a_dot_k, Im a_dot_k.
  // Equations: Fourier modes mu = 0 .. N+1 of Im(conj(z_t) z_theta) matched to
  // (1, 0, ..., 0). For unknown coefficient cdot_m the mode-mu contribution is
  //   f_mu += alpha*conj(cdot_m) + beta*cdot_m,
  //   alpha = (m+mu)/2 c_{m+mu},  beta = (m-mu)/2 conj(c_{m-mu}).
  Eigen::MatrixXd A = Eigen::MatrixXd::Zero(D, D);
  Eigen::VectorXd rhs = Eigen::VectorXd::Zero(D);
  rhs(0) = 1.0;

  auto unknown_ms = [&](int idx) { return idx == 0 ? 1 : -((idx - 1) / 2); };

  for (int mu = 0; mu <= N + 1; ++mu) {
    for (int col = 0; col < D; ++col) {
      const int m = unknown_ms(col);
      const cplx alpha = 0.5 * double(m + mu) * map_coeff(map, m + mu);
      const cplx beta = 0.5 * double(m - mu) * std::conj(map_coeff(map, m - mu));
      const bool is_imag_part = col != 0 && (col % 2 == 0);
      // cdot_m = p + i q: contribution (alpha+beta) per unit p, i(beta-alpha) per unit q.
      const cplx coef = is_imag_part ? cplx(0.0, 1.0) * (beta - alpha) : alpha + beta;
      if (mu == 0) {
        A(0, col) += coef.real();
      } else {
        A(1 + 2 * (mu - 1), col) += coef.real();
        A(2 + 2 * (mu - 1), col) += coef.imag();
      }
    }
  }

  Eigen::PartialPivLU<Eigen::MatrixXd> lu(A);
  const Eigen::VectorXd x = lu.solve(rhs);
  if (!x.allFinite() || (A * x - rhs).cwiseAbs().maxCoeff() > 1e-8)
    throw CuspError("coefficient_velocities: singular Galerkin system (map near cusp)", 0.0,
                    0.0);

  MapVelocity vel;
  vel.b_dot = x(0);
  vel.a_dot.resize(std::size_t(N + 1));
  for (int k = 0; k <= N; ++k) vel.a_dot[std::size_t(k)] = cplx(x(1 + 2 * k), x(2 + 2 * k));

  // Monitor the unmatched modes (> N+1) on a finer grid.
  const int M = next_pow2(std::max(16, 8 * (N + 2)));
  vel.unmatched_residual = pg_residual(map, vel, M).sup;
  return vel;
}

ResidualReport pg_residual(const LaurentMap& map, const MapVelocity& vel, int M) {
  if (!is_power_of_two(M)) throw UsageError("pg_residual: M must be a power of two");
  const auto zt = velocity_samples(vel, M);
  const auto zth = boundary_dtheta(map, M);
  return ResidualReport::from_samples(kernels::im_conj_product_minus_auto(zt, zth, 1.0));
}

namespace {

std::vector<double> pack(const LaurentMap& map) {
  std::vector<double> y(static_cast<std::size_t>(2 * map.order() + 3));
  y[0] = map.b;
  for (int k = 0; k <= map.order(); ++k) {
    y[std::size_t(1 + 2 * k)] = map.a[std::size_t(k)].real();
    y[std::size_t(2 + 2 * k)] = map.a[std::size_t(k)].imag();
  }
  return y;
}

LaurentMap unpack(const std::vector<double>& y) {
  const int N = (int(y.size()) - 3) / 2;
  std::vector<cplx> a(static_cast<std::size_t>(N + 1));
  for (int k = 0; k <= N; ++k) a[std::size_t(k)] = cplx(y[std::size_t(1 + 2 * k)], y[std::size_t(2 + 2 * k)]);
  if (!(y[0] > 0.0)) throw CuspError("step: conformal radius collapsed", 0.0, 0.0);
  return LaurentMap(y[0], std::move(a));
}

std::vector<double> rhs_vector(const LaurentMap& map, const FlowOptions& opt,
                               double* monitored) {
  const MapVelocity vel = coefficient_velocities(map, opt);
  if (monitored) *monitored = vel.unmatched_residual;
  std::vector<double> f(static_cast<std::size_t>(2 * map.order() + 3));
  f[0] = vel.b_dot;
  for (int k = 0; k <= map.order(); ++k) {
    f[std::size_t(1 + 2 * k)] = vel.a_dot[std::size_t(k)].real();
    f[std::size_t(2 + 2 * k)] = vel.a_dot[std::size_t(k)].imag();
  }
  return f;
}

}  // namespace

FlowState step(const FlowState& s, double dt, const FlowOptions& opt) {
  if (std::abs(dt) > opt.dt_max + 1e-15)
    throw UsageError("step: |dt| exceeds dt_max");
  if (dt == 0.0) return s;

  const std::vector<double> y0 = pack(s.map);
  const std::size_t D = y0.size();
  auto axpy = [&](const std::vector<double>& y, double h, const std::vector<double>& k) {
    std::vector<double> r(D);
    for (std::size_t i = 0; i < D; ++i) r[i] = y[i] + h * k[i];
    return r;
  };

  try {
    const auto k1 = rhs_vector(s.map, opt, nullptr);
    const auto k2 = rhs_vector(unpack(axpy(y0, 0.5 * dt, k1)), opt, nullptr);
    const auto k3 = rhs_vector(unpack(axpy(y0, 0.5 * dt, k2)), opt, nullptr);
    const auto k4 = rhs_vector(unpack(axpy(y0, dt, k3)), opt, nullptr);
    std::vector<double> y1(D);
    double jump = 0.0, scale = 1.0;
    for (std::size_t i = 0; i < D; ++i) {
      y1[i] = y0[i] + dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
      if (!std::isfinite(y1[i])) throw CuspError("step: velocities blew up", s.t, 0.0);
      jump = std::max(jump, std::abs(y1[i] - y0[i]));
      scale = std::max(scale, std::abs(y0[i]));
    }
    // Stiff burst near a cusp: the fixed step cannot resolve it, so declare
    // the event instead of landing on a garbage map.
    if (jump > 0.25 * scale)
      throw CuspError("step: coefficient jump exceeds the stiffness bound", s.t, 0.0);

    FlowState out;
    out.t = s.t + dt;
    out.map = unpack(y1);
    check_cusp(out.map, out.t, opt, &out.cusp_margin);
    return out;
  } catch (const CuspError& e) {
    // Re-throw with the step's time attached; the caller keeps s as last good.
    throw CuspError(e.what(), s.t, e.margin);
  }
}

Trajectory evolve(FlowState s0, double T, double dt, std::span<const Observer> observers,
                  const FlowOptions& opt) {
  if (dt == 0.0) throw UsageError("evolve: dt must be nonzero");
  const double steps_real = T / dt;
  const long nsteps = std::lround(steps_real);
  if (nsteps < 0 || std::abs(steps_real - double(nsteps)) > 1e-9)
    throw UsageError("evolve: T/dt must be a nonnegative integer");

  Trajectory traj;
  FlowState s = std::move(s0);
  try {
    check_cusp(s.map, s.t, opt, &s.cusp_margin);
  } catch (const CuspError& e) {
    traj.events.push_back({Event::Type::cusp, e.t, e.margin});
    return traj;
  }
  for (const auto& ob : observers) ob(s);
  traj.states.push_back(s);

  for (long i = 0; i < nsteps; ++i) {
    // Grow the truncation order while the tail residual is visible.
    for (int tries = 0; tries < 6; ++tries) {
      double excess = 0.0;
      try {
        (void)rhs_vector(s.map, opt, &excess);
      } catch (const CuspError&) {
        break;  // let step() report it
      }
      if (excess <= opt.monitor_tol || s.map.order() >= opt.max_order) break;
      const int grown = std::min(std::max(2 * s.map.order(), 4), opt.max_order);
      logging::debug("evolve: excess " + std::to_string(excess) + ", growing N to " +
                     std::to_string(grown));
      s.map.grow(grown);
    }
    try {
      s = step(s, dt, opt);
    } catch (const CuspError& e) {
      traj.events.push_back({Event::Type::cusp, e.t, e.margin});
      return traj;
    }
    for (const auto& ob : observers) ob(s);
    traj.states.push_back(s);
  }
  return traj;
}

namespace {

std::vector<cplx> spectral_dtheta(const Curve& curve) {
  auto coef = kernels::fourier_coefficients(curve.z);
  const int M = curve.size();
  // Frequencies: index m -> m for m < M/2, m - M for m >= M/2; Nyquist dropped.
  for (int m = 0; m < M; ++m) {
    const int f = m < M / 2 ? m : m - M;
    coef[std::size_t(m)] *= (m == M / 2) ? cplx(0.0) : cplx(0.0, double(f));
  }
  return kernels::synth_spectrum(std::move(coef));
}

}  // namespace

MomentVector moments(const Curve& curve, int K) {
  if (K < 0) throw UsageError("moments: K must be >= 0");
  const int M = curve.size();
  const auto zth = spectral_dtheta(curve);

  MomentVector mv;
  mv.m.assign(std::size_t(K), cplx(0.0));
  cplx area_acc = 0.0;
  std::vector<cplx> acc(std::size_t(K), cplx(0.0));
  for (int j = 0; j < M; ++j) {
    const cplx z = curve.z[std::size_t(j)];
    const cplx w = std::conj(z) * zth[std::size_t(j)];
    area_acc += w;
    cplx zp = 1.0;
    for (int k = 1; k <= K; ++k) {
      zp /= z;
      acc[std::size_t(k - 1)] += zp * w;
    }
  }
  const cplx factor = cplx(0.0, -0.5) * kTwoPi / double(M);  // (1/2i) * dtheta
  mv.area = (factor * area_acc).real();
  for (int k = 1; k <= K; ++k) mv.m[std::size_t(k - 1)] = -factor * acc[std::size_t(k - 1)];
  return mv;
}

std::vector<cplx> complement_moments(const Curve& curve, int K) {
  if (K < 0) throw UsageError("complement_moments: K must be >= 0");
  const int M = curve.size();
  const auto zth = spectral_dtheta(curve);
  std::vector<cplx> acc(std::size_t(K + 1), cplx(0.0));
  for (int j = 0; j < M; ++j) {
    const cplx z = curve.z[std::size_t(j)];
    const cplx w = std::conj(z) * zth[std::size_t(j)];
    cplx zp = 1.0;
    for (int k = 0; k <= K; ++k) {
      acc[std::size_t(k)] += zp * w;
      zp *= z;
    }
  }
  const cplx factor = cplx(0.0, -0.5) * kTwoPi / double(M);
  for (auto& v : acc) v *= factor;
  return acc;
}

std::vector<double> harmonic_velocity(const LaurentMap& map, int M, const FlowOptions& opt) {
  const auto zth = boundary_dtheta(map, M);
  const double margin = min_abs(zth);
  if (margin < opt.cusp_margin_rel * map.b)
    throw CuspError("harmonic_velocity: blow-up (vanishing boundary speed)", 0.0, margin);
  std::vector<double> v(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) v[std::size_t(j)] = 1.0 / std::abs(zth[std::size_t(j)]);
  return v;
}

Curve weighted_step(const Curve& curve, const LaurentMap& map, const WeightField& chi,
                    double dt) {
  const int M = curve.size();
  if (int(chi.chi.size()) != M) throw UsageError("weighted_step: weight grid mismatch");
  const auto zth = boundary_dtheta(map, M);
  std::vector<cplx> pushed(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) {
    const cplx zt = zth[std::size_t(j)];
    const double n2 = std::norm(zt);
    if (n2 == 0.0) throw CuspError("weighted_step: vanishing boundary speed", 0.0, 0.0);
    // outward normal * V = (-i z_theta/|z_theta|) * (1/|z_theta|)
    pushed[std::size_t(j)] =
        curve.z[std::size_t(j)] + dt * chi.chi[std::size_t(j)] * cplx(0.0, -1.0) * zt / n2;
  }
  Curve out(std::move(pushed));
  if (!kernels::polygon_is_simple_auto(out.z))
    throw StepTooLargeError("weighted_step: pushed boundary self-intersects");
  return out;
}

}  // namespace lemlab
