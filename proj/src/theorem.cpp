#include "lemlab/theorem.hpp"

#include <algorithm>
#include <limits>
#include <sstream>

#include "lemlab/kernels.hpp"

namespace lemlab {

namespace {

// Reorder `other`'s nodes to match `ref` by nearest neighbor; aborts on
// collisions (ambiguous tracking signals an invalid family, not data to repair).
LemPoly match_nodes(const LemPoly& ref, const LemPoly& other) {
  const auto& rn = ref.nodes();
  const auto& on = other.nodes();
  if (rn.size() != on.size() || ref.degree() != other.degree())
    throw UsageError("FamilyStencil: stencil members must share degree and node count");
  std::vector<cplx> nodes(rn.size());
  std::vector<int> mults(rn.size());
  std::vector<bool> taken(on.size(), false);
  for (std::size_t i = 0; i < rn.size(); ++i) {
    std::size_t best = on.size();
    double bd = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < on.size(); ++j) {
      if (taken[j]) continue;
      const double d = std::abs(rn[i] - on[j]);
      if (d < bd) {
        bd = d;
        best = j;
      }
    }
    taken[best] = true;
    if (other.mults()[best] != ref.mults()[i])
      throw UsageError("FamilyStencil: node multiplicity changes across the stencil");
    nodes[i] = on[best];
    mults[i] = other.mults()[best];
  }
  return LemPoly(other.scale(), std::move(nodes), std::move(mults));
}

}  // namespace

FamilyStencil::FamilyStencil(LemPoly p_minus, LemPoly p_center, LemPoly p_plus, double h)
    : minus_(match_nodes(p_center, p_minus)),
      center_(std::move(p_center)),
      plus_(match_nodes(center_, p_plus)),
      h_(h) {
  if (!(h > 0.0)) throw UsageError("FamilyStencil: h must be positive");
}

FamilyStencil FamilyStencil::sample(const std::function<LemPoly(double)>& family, double t,
                                    double h) {
  return FamilyStencil(family(t - h), family(t), family(t + h), h);
}

ComplexPoly FamilyStencil::p_dot() const {
  return (plus_.poly() - minus_.poly()) * cplx(1.0 / (2.0 * h_));
}

double FamilyStencil::scale_sq_dot() const {
  const double ap = plus_.scale(), am = minus_.scale();
  return (ap * ap - am * am) / (2.0 * h_);
}

std::vector<cplx> FamilyStencil::node_dot_direct() const {
  std::vector<cplx> v(center_.nodes().size());
  for (std::size_t j = 0; j < v.size(); ++j)
    v[j] = (plus_.nodes()[j] - minus_.nodes()[j]) / (2.0 * h_);
  return v;
}

ResidualReport pg_lemniscate_residual(const FamilyStencil& stencil, const Curve& curve) {
  const LemPoly& p = stencil.center();
  const int n = p.degree();
  const ComplexPoly pd = stencil.p_dot();
  const ComplexPoly dp = p.poly().derivative();

  const auto pv = p.poly().eval_many(curve.z);
  const auto pdv = pd.eval_many(curve.z);
  const auto dpv = dp.eval_many(curve.z);
  std::vector<double> r(pv.size());
  for (std::size_t j = 0; j < pv.size(); ++j)
    r[j] = std::real(pdv[j] * std::conj(pv[j])) + std::norm(dpv[j]) / double(n);
  return ResidualReport::from_samples(std::move(r));
}

NullstellensatzReport nullstellensatz_fit(const FamilyStencil& stencil) {
  const LemPoly& lp = stencil.center();
  const int n = lp.degree();
  const auto& p = lp.poly().coeffs();   // p_0..p_n
  const ComplexPoly pdot = stencil.p_dot();
  const ComplexPoly dp = lp.poly().derivative();

  NullstellensatzReport rep;
  rep.c = -2.0 / double(n);

  // Bivariate coefficients on z^i xi^j: products of single-variable
  // coefficient vectors (no convolution across the two variables).
  //   L_ij = pdot_i conj(p_j) + p_i conj(pdot_j) - c P'_i conj(P'_j)
  //   G_ij = p_i conj(p_j) - delta_i0 delta_j0
  const std::size_t sz = p.size();
  auto pd_at = [&](std::size_t k) { return k < pdot.coeffs().size() ? pdot.coeffs()[k] : cplx(0.0); };
  auto dp_at = [&](std::size_t k) { return k < dp.coeffs().size() ? dp.coeffs()[k] : cplx(0.0); };

  double num = 0.0, den = 0.0;
  std::vector<cplx> L(sz * sz), G(sz * sz);
  for (std::size_t i = 0; i < sz; ++i) {
    for (std::size_t j = 0; j < sz; ++j) {
      cplx l = pd_at(i) * std::conj(p[j]) + p[i] * std::conj(pd_at(j)) -
               rep.c * dp_at(i) * std::conj(dp_at(j));
      cplx g = p[i] * std::conj(p[j]);
      if (i == 0 && j == 0) g -= 1.0;
      L[i * sz + j] = l;
      G[i * sz + j] = g;
      num += std::real(std::conj(g) * l);
      den += std::norm(g);
    }
  }
  rep.B = den > 0.0 ? num / den : 0.0;
  for (std::size_t k = 0; k < L.size(); ++k)
    rep.residual = std::max(rep.residual, std::abs(L[k] - rep.B * G[k]));

  rep.node_velocities = node_velocities(stencil).lambda_dot;
  return rep;
}

NodeVelocityReport node_velocities(const FamilyStencil& stencil) {
  const LemPoly& lp = stencil.center();
  const auto& nodes = lp.nodes();
  const ComplexPoly pd = stencil.p_dot();
  const ComplexPoly& p = lp.poly();

  double scale = 1.0;
  for (const cplx& nd : nodes) scale = std::max(scale, std::abs(nd));
  double min_sep = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < nodes.size(); ++i)
    for (std::size_t j = i + 1; j < nodes.size(); ++j)
      min_sep = std::min(min_sep, std::abs(nodes[i] - nodes[j]));
  if (nodes.size() > 1 && min_sep < 1e-6 * scale)
    throw RadiusSelectionError(
        "node_velocities: nodes too close for a separating contour");

  NodeVelocityReport rep;
  rep.contour_radius = nodes.size() > 1 ? 0.4 * min_sep : 0.5 * scale;
  const int Q = 64;  // trapezoid points; spectrally accurate for the analytic integrand
  rep.lambda_dot.resize(nodes.size());
  for (std::size_t j = 0; j < nodes.size(); ++j) {
    cplx integral = 0.0;  // (1/2pi i) oint Pdot/P dz = -k_j lambda_dot_j
    for (int q = 0; q < Q; ++q) {
      const cplx e = std::polar(1.0, kTwoPi * double(q) / double(Q));
      const cplx z = nodes[j] + rep.contour_radius * e;
      integral += pd.eval(z) / p.eval(z) * e;
    }
    integral *= rep.contour_radius / double(Q);
    rep.lambda_dot[j] = -integral / double(lp.mults()[j]);
    rep.sup = std::max(rep.sup, std::abs(rep.lambda_dot[j]));
  }
  return rep;
}

FrozenNodeReport frozen_node_reduction(const FamilyStencil& stencil, double freeze_threshold) {
  const auto nv = node_velocities(stencil);
  if (nv.sup > freeze_threshold) {
    std::ostringstream msg;
    msg << "frozen_node_reduction: nodes are not frozen (sup |lambda_dot| = " << nv.sup << ")";
    throw UsageError(msg.str());
  }
  FrozenNodeReport rep;
  rep.B = nullstellensatz_fit(stencil).B;
  const double a0 = stencil.center().scale();
  rep.ode_residual = std::abs(stencil.scale_sq_dot() - rep.B * a0 * a0);
  rep.obstruction_degree = stencil.center().degree() - 1;  // deg Q'
  return rep;
}

ResidualReport time_reversal_residual(const LemPoly& p, const Curve& curve) {
  const CriticalDecomp decomp = double_pole_decomposition(p);
  std::vector<double> r(curve.z.size());
  for (std::size_t j = 0; j < curve.z.size(); ++j)
    r[j] = std::imag(decomp.eval(curve.z[j]));
  return ResidualReport::from_samples(std::move(r));
}

double circle_oracle(double b0, double t) {
  if (!(b0 > 0.0)) throw UsageError("circle_oracle: b0 must be positive");
  const double s = b0 * b0 + 2.0 * t;
  if (s < 0.0) throw UsageError("circle_oracle: t below the vacuum time -b0^2/2");
  return std::sqrt(s);
}

DestructionSeries destruction_experiment(const LemPoly& p0, double T, double dt,
                                         const DestructionOptions& opt) {
  const int n = p0.degree();
  DestructionSeries series;

  const Curve curve0 = trace_lemniscate(p0, opt.M);
  series.points.push_back({0.0, defect_report(curve0, n, opt.restarts, opt.seed)});

  MapFitOptions mf;
  mf.max_order = opt.M / 4 - 1;
  const MapFitReport fitted = fit_map_from_curve(curve0, mf);
  logging::debug("destruction_experiment: map order " + std::to_string(fitted.map.order()) +
                 ", tail excess " + std::to_string(fitted.tail_excess));

  FlowOptions fopt = opt.flow;
  fopt.max_order = mf.max_order;

  DefectReport prev = series.points.front().fit;
  Observer per_step = [&](const FlowState& s) {
    if (s.t == 0.0) return;  // t = 0 defect comes from the exact traced curve
    const Curve c = sample_boundary(s.map, opt.M);
    DefectReport rep = prev.best ? fit(c, n, prev.best) : fit(c, n);
    if (!rep.converged || !rep.best) {
      DefectReport retry = defect_report(c, n, opt.restarts, opt.seed);
      if (retry.defect < rep.defect) rep = retry;
    }
    prev = rep;
    series.points.push_back({s.t, std::move(rep)});
  };
  const Observer observers[] = {per_step};

  FlowState s0;
  s0.map = fitted.map;
  Trajectory traj = evolve(std::move(s0), T, dt, observers, fopt);
  series.events = std::move(traj.events);
  return series;
}

LinearFit linear_fit(std::span<const double> t, std::span<const double> y) {
  const std::size_t n = t.size();
  if (n != y.size() || n < 2) throw UsageError("linear_fit: need >= 2 matched samples");
  double st = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    st += t[i];
    sy += y[i];
  }
  const double mt = st / double(n), my = sy / double(n);
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (t[i] - mt) * (t[i] - mt);
    sxy += (t[i] - mt) * (y[i] - my);
    syy += (y[i] - my) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mt;
  f.r2 = syy > 0.0 ? (sxy * sxy) / (sxx * syy) : 1.0;
  return f;
}

LinearFit defect_slope(const DestructionSeries& series, double t0, double t1) {
  std::vector<double> t, y;
  for (const auto& pt : series.points) {
    if (pt.t >= t0 - 1e-12 && pt.t <= t1 + 1e-12) {
      t.push_back(pt.t);
      y.push_back(pt.fit.defect);
    }
  }
  return linear_fit(t, y);
}

}  // namespace lemlab
