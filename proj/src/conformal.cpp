#include "lemlab/conformal.hpp"

#include <algorithm>
#include <sstream>

#include "lemlab/kernels.hpp"

namespace lemlab {

Curve sample_boundary(const LaurentMap& map, int M) {
  const int N = map.order();
  if (!is_power_of_two(M)) throw UsageError("sample_boundary: M must be a power of two");
  if (M < 4 * (N + 1)) {
    std::ostringstream msg;
    msg << "sample_boundary: M=" << M << " aliases a map of order N=" << N
        << " (need M >= " << 4 * (N + 1) << ")";
    throw AliasingError(msg.str());
  }
  std::vector<cplx> spec(std::size_t(M), cplx(0.0));
  spec[1] = cplx(map.b);
  spec[0] = map.a[0];
  for (int k = 1; k <= N; ++k) spec[std::size_t(M - k)] = map.a[std::size_t(k)];
  return Curve(kernels::synth_spectrum(std::move(spec)));
}

std::vector<cplx> boundary_dtheta(const LaurentMap& map, int M) {
  const int N = map.order();
  if (!is_power_of_two(M)) throw UsageError("boundary_dtheta: M must be a power of two");
  if (M < 4 * (N + 1)) throw AliasingError("boundary_dtheta: M too small for map order");
  std::vector<cplx> spec(std::size_t(M), cplx(0.0));
  spec[1] = cplx(0.0, map.b);
  for (int k = 1; k <= N; ++k)
    spec[std::size_t(M - k)] = cplx(0.0, -double(k)) * map.a[std::size_t(k)];
  return kernels::synth_spectrum(std::move(spec));
}

MapFitReport fit_map_from_curve(const Curve& curve, const MapFitOptions& opt) {
  const int M = curve.size();
  if (M < 8) throw UsageError("fit_map_from_curve: need at least 8 samples");
  const auto coef = kernels::fourier_coefficients(curve.z);

  const double bsc = std::abs(coef[1]);
  if (!(coef[1].real() > 0.0) || std::abs(coef[1].imag()) > 1e-8 * std::max(1.0, bsc)) {
    std::ostringstream msg;
    msg << "fit_map_from_curve: coefficient of e^{i theta} is " << coef[1].real() << "+"
        << coef[1].imag() << "i, not a positive real conformal radius";
    throw NotExteriorMapError(msg.str());
  }
  const double b = coef[1].real();

  MapFitReport rep;
  for (int m = 2; m <= M / 2; ++m)
    rep.positive_mode_sup = std::max(rep.positive_mode_sup, std::abs(coef[std::size_t(m)]));
  if (rep.positive_mode_sup > opt.positive_mode_tol * b)
    throw NotExteriorMapError(
        "fit_map_from_curve: significant positive-frequency modes (curve does not come "
        "from an exterior map with theta-correspondence)");

  const int cap = opt.max_order >= 0 ? std::min(opt.max_order, M / 2 - 2) : M / 4 - 1;
  // Keep coefficients through the last one above the tail threshold.
  int N = 0;
  for (int k = 1; k <= cap; ++k)
    if (std::abs(coef[std::size_t(M - k)]) > opt.tail_threshold * b) N = k;
  std::vector<cplx> a(static_cast<std::size_t>(N + 1));
  a[0] = coef[0];
  for (int k = 1; k <= N; ++k) a[std::size_t(k)] = coef[std::size_t(M - k)];
  for (int k = N + 1; k < M / 2; ++k)
    rep.tail_excess = std::max(rep.tail_excess, std::abs(coef[std::size_t(M - k)]));

  rep.map = LaurentMap(b, std::move(a));
  return rep;
}

namespace {

// Newton solve of P(z) = target from z0; returns nullopt on stagnation.
// tol is relative to the target magnitude.
std::optional<cplx> newton_on_poly(const ComplexPoly& p, const ComplexPoly& dp, cplx target,
                                   cplx z0, double tol, int max_it = 40) {
  const double atol = tol * (1.0 + std::abs(target));
  cplx z = z0;
  for (int it = 0; it < max_it; ++it) {
    const cplx f = p.eval(z) - target;
    if (std::abs(f) <= atol) return z;
    const cplx d = dp.eval(z);
    if (d == cplx(0.0)) return std::nullopt;
    z -= f / d;
  }
  return std::abs(p.eval(z) - target) <= 100.0 * atol ? std::optional<cplx>(z) : std::nullopt;
}

}  // namespace

Curve trace_lemniscate(const LemPoly& lp, int M) {
  if (!is_power_of_two(M)) throw UsageError("trace_lemniscate: M must be a power of two");
  const int n = lp.degree();
  if (M < 8 * n) throw UsageError("trace_lemniscate: M too small for the degree");
  const ComplexPoly& p = lp.poly();
  const ComplexPoly dp = p.derivative();
  const double tol = 1e-13;

  // Seed at w = 1 by continuation along the positive real w-axis from far out,
  // which selects the branch of P^{1/n} with positive derivative at infinity.
  cplx mean_node = 0.0;
  double rad = 0.0;
  for (const cplx& nd : lp.nodes()) rad = std::max(rad, std::abs(nd));
  for (std::size_t j = 0; j < lp.nodes().size(); ++j)
    mean_node += lp.nodes()[j] * double(lp.mults()[j]) / double(n);
  const double scale_r = std::pow(1.0 / lp.scale(), 1.0 / double(n));
  double wmag = 4.0 * (1.0 + (rad + std::abs(mean_node)) / scale_r);
  cplx z = mean_node + wmag * scale_r;  // asymptotic inverse of P(z) = wmag^n
  while (wmag > 1.0) {
    wmag = std::max(1.0, wmag * 0.75);
    const auto zn = newton_on_poly(p, dp, cplx(std::pow(wmag, n)), z, tol);
    if (!zn) throw TraceError("trace_lemniscate: seed continuation failed");
    z = *zn;
  }
  const cplx seed = z;

  std::vector<cplx> samples(std::size_t(M), cplx(0.0));
  samples[0] = seed;
  for (int j = 1; j <= M; ++j) {
    const double theta = kTwoPi * double(j) / double(M);
    const cplx target = std::polar(1.0, double(n) * theta);
    // Predictor from z_theta = i n P / P' on the curve.
    const cplx dpv = dp.eval(z);
    if (dpv == cplx(0.0)) throw TraceError("trace_lemniscate: critical point on the boundary");
    const cplx zt = cplx(0.0, double(n)) * lp.eval(z) / dpv;
    const double speed = std::abs(zt);
    const cplx pred = z + zt * (kTwoPi / double(M));
    const auto zn = newton_on_poly(p, dp, target, pred, tol);
    if (!zn)
      throw TraceError("trace_lemniscate: Newton divergence (disconnected or pinched lemniscate)");
    const double bound = 4.0 * std::max(speed, 1e-6) * (kTwoPi / double(M));
    if (std::abs(*zn - z) > bound)
      throw TraceError("trace_lemniscate: branch jump (disconnected or pinched lemniscate)");
    z = *zn;
    if (j < M) samples[std::size_t(j)] = z;
  }
  if (std::abs(z - seed) > 1e-9 * (1.0 + std::abs(seed)))
    throw TraceError("trace_lemniscate: trace does not close up");

  Curve curve(std::move(samples), seed);
  if (!kernels::polygon_is_simple_auto(curve.z))
    throw TraceError("trace_lemniscate: traced boundary self-intersects (not a single Jordan component)");
  return curve;
}

UnivalenceReport univalence_check(const LaurentMap& map, int M) {
  UnivalenceReport rep;
  const auto zt = boundary_dtheta(map, M);
  double margin = std::abs(zt[0]);
  for (const cplx& v : zt) margin = std::min(margin, std::abs(v));
  rep.margin = margin;
  const auto curve = sample_boundary(map, M);
  rep.winding = kernels::winding_number(curve.z, curve.centroid());
  rep.ok = margin > 0.0 && rep.winding == 1;
  return rep;
}

}  // namespace lemlab
