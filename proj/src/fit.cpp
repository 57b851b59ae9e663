#include "lemlab/fit.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "lemlab/kernels.hpp"

namespace lemlab {

ResidualReport level_residual(const LemPoly& p, const Curve& curve) {
  return ResidualReport::from_samples(kernels::log_abs_factored_auto(
      std::log(p.scale()), p.nodes(), p.mults(), curve.z));
}

namespace {

struct Params {
  double log_a = 0.0;
  std::vector<cplx> nodes;
  std::vector<int> mults;

  int dim() const { return 1 + 2 * int(nodes.size()); }
  LemPoly to_poly() const { return LemPoly(std::exp(log_a), nodes, mults); }
};

std::vector<double> residual_of(const Params& q, const Curve& curve) {
  return kernels::log_abs_factored_auto(q.log_a, q.nodes, q.mults, curve.z);
}

double cost_of(const std::vector<double>& r) {
  double c = 0.0;
  for (double v : r) {
    if (!std::isfinite(v)) return std::numeric_limits<double>::infinity();
    c += v * v;
  }
  return c;
}

// Optimal intercept: the log-scale column of the Jacobian is all ones.
void recenter_log_a(Params& q, const Curve& curve) {
  const auto r = residual_of(q, curve);
  double mean = 0.0;
  for (double v : r) mean += v;
  mean /= double(r.size());
  if (std::isfinite(mean)) q.log_a -= mean;
}

// Pull an escaped node back inside the curve toward the centroid.
bool reproject_node(cplx& node, const Curve& curve, cplx centroid) {
  if (kernels::point_in_polygon(curve.z, node)) return false;
  for (double s = 0.9; s > 0.05; s -= 0.1) {
    const cplx candidate = centroid + s * (node - centroid);
    if (kernels::point_in_polygon(curve.z, candidate)) {
      node = candidate;
      return true;
    }
  }
  node = centroid;
  return true;
}

struct GNResult {
  Params params;
  double defect = std::numeric_limits<double>::infinity();
  double sup = std::numeric_limits<double>::infinity();
  int iterations = 0;
  bool converged = false;
  int reprojections = 0;
};

GNResult gauss_newton(Params q, const Curve& curve) {
  const int M = curve.size();
  const int d = q.dim();
  const cplx centroid = curve.centroid();

  GNResult out;
  recenter_log_a(q, curve);
  std::vector<double> r = residual_of(q, curve);
  double cost = cost_of(r);

  double mu = 1e-3;
  Eigen::MatrixXd J(M, d);
  for (int it = 1; it <= 100; ++it) {
    out.iterations = it;
    for (int j = 0; j < M; ++j) {
      J(j, 0) = 1.0;
      for (std::size_t i = 0; i < q.nodes.size(); ++i) {
        const cplx w = 1.0 / (curve.z[std::size_t(j)] - q.nodes[i]);
        J(j, 1 + 2 * int(i)) = -double(q.mults[i]) * w.real();
        J(j, 2 + 2 * int(i)) = double(q.mults[i]) * w.imag();
      }
    }
    Eigen::Map<const Eigen::VectorXd> rv(r.data(), M);
    const Eigen::MatrixXd H = J.transpose() * J;
    const Eigen::VectorXd g = J.transpose() * rv;

    bool accepted = false;
    bool stationary = false;
    Eigen::VectorXd delta;
    for (int attempt = 0; attempt < 28 && !accepted; ++attempt) {
      Eigen::MatrixXd Hd = H;
      for (int i = 0; i < d; ++i) Hd(i, i) += mu;
      const Eigen::LDLT<Eigen::MatrixXd> ldlt(Hd);
      delta = ldlt.solve(-g);
      if (ldlt.info() != Eigen::Success || !delta.allFinite()) {
        mu *= 10.0;
        continue;
      }
      if (delta.norm() < 1e-12) {  // stationary point at the damping scale
        stationary = true;
        break;
      }
      Params trial = q;
      trial.log_a += delta(0);
      for (std::size_t i = 0; i < trial.nodes.size(); ++i)
        trial.nodes[i] += cplx(delta(1 + 2 * int(i)), delta(2 + 2 * int(i)));
      for (auto& nd : trial.nodes)
        if (reproject_node(nd, curve, centroid)) ++out.reprojections;
      recenter_log_a(trial, curve);
      auto rt = residual_of(trial, curve);
      const double ct = cost_of(rt);
      if (ct < cost) {
        q = trial;
        r = std::move(rt);
        cost = ct;
        mu = std::max(mu / 10.0, 1e-15);
        accepted = true;
      } else {
        mu *= 10.0;
        if (mu > 1e14) break;
      }
    }
    if (stationary) {
      out.converged = true;
      break;
    }
    if (!accepted) break;  // damping exhausted (singular Jacobian or stall)
    if (delta.norm() < 1e-12) {
      out.converged = true;
      break;
    }
  }

  out.params = std::move(q);
  const auto rep = ResidualReport::from_samples(std::move(r));
  out.defect = rep.rms;
  out.sup = rep.sup;
  return out;
}

bool lex_less(const Params& a, const Params& b) {
  if (a.log_a != b.log_a) return a.log_a < b.log_a;
  for (std::size_t i = 0; i < std::min(a.nodes.size(), b.nodes.size()); ++i) {
    if (a.nodes[i].real() != b.nodes[i].real()) return a.nodes[i].real() < b.nodes[i].real();
    if (a.nodes[i].imag() != b.nodes[i].imag()) return a.nodes[i].imag() < b.nodes[i].imag();
  }
  return a.nodes.size() < b.nodes.size();
}

void canonicalize(Params& q) {
  std::vector<std::size_t> idx(q.nodes.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::sort(idx.begin(), idx.end(), [&](std::size_t i, std::size_t j) {
    if (q.nodes[i].real() != q.nodes[j].real()) return q.nodes[i].real() < q.nodes[j].real();
    return q.nodes[i].imag() < q.nodes[j].imag();
  });
  std::vector<cplx> nodes(q.nodes.size());
  std::vector<int> mults(q.mults.size());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    nodes[i] = q.nodes[idx[i]];
    mults[i] = q.mults[idx[i]];
  }
  q.nodes = std::move(nodes);
  q.mults = std::move(mults);
}

Params default_init(const Curve& curve, int n) {
  const cplx c = curve.centroid();
  double mean_r = 0.0;
  for (const cplx& z : curve.z) mean_r += std::abs(z - c);
  mean_r /= double(curve.size());
  Params q;
  q.nodes.resize(std::size_t(n));
  q.mults.assign(std::size_t(n), 1);
  // The 0.35 rad twist keeps the ring off the curve's symmetry axes, where
  // the Gauss-Newton step can land on a stationary saddle.
  for (int j = 0; j < n; ++j)
    q.nodes[std::size_t(j)] =
        c + 0.5 * mean_r * std::polar(1.0, kTwoPi * (double(j) + 0.5) / double(n) + 0.35);
  return q;
}

Params confluent_init(const Curve& curve, int n, cplx center) {
  Params q;
  q.nodes = {center};
  q.mults = {n};
  return q;
}

double curve_diameter(const Curve& curve) {
  double lo_x = curve.z[0].real(), hi_x = lo_x, lo_y = curve.z[0].imag(), hi_y = lo_y;
  for (const cplx& z : curve.z) {
    lo_x = std::min(lo_x, z.real());
    hi_x = std::max(hi_x, z.real());
    lo_y = std::min(lo_y, z.imag());
    hi_y = std::max(hi_y, z.imag());
  }
  return std::hypot(hi_x - lo_x, hi_y - lo_y);
}

double cluster_radius(const Params& q) {
  double r = 0.0;
  for (std::size_t i = 0; i < q.nodes.size(); ++i)
    for (std::size_t j = i + 1; j < q.nodes.size(); ++j)
      r = std::max(r, std::abs(q.nodes[i] - q.nodes[j]));
  return r;
}

DefectReport to_report(const GNResult& g, int n, std::uint64_t seed) {
  DefectReport rep;
  rep.n = n;
  rep.defect = g.defect;
  rep.sup_defect = g.sup;
  rep.iterations = g.iterations;
  rep.converged = g.converged;
  rep.seed = seed;
  rep.reprojections = g.reprojections;
  if (std::isfinite(g.params.log_a)) rep.best = g.params.to_poly();
  return rep;
}

// Run GN and, if the simple nodes have collapsed into a cluster, refit in the
// confluent (z - lambda)^n parametrization (circles are degree-n lemniscates
// with a single repeated node and must remain fittable at every n).
GNResult run_with_confluent_fallback(Params init, const Curve& curve) {
  GNResult best = gauss_newton(std::move(init), curve);
  canonicalize(best.params);
  const int n_nodes = int(best.params.nodes.size());
  if (n_nodes >= 2 && cluster_radius(best.params) < 1e-4 * curve_diameter(curve)) {
    cplx mean = 0.0;
    int total = 0;
    for (std::size_t i = 0; i < best.params.nodes.size(); ++i) {
      mean += best.params.nodes[i] * double(best.params.mults[i]);
      total += best.params.mults[i];
    }
    GNResult con = gauss_newton(confluent_init(curve, total, mean / double(total)), curve);
    if (con.defect <= best.defect) {
      con.reprojections += best.reprojections;
      return con;
    }
  }
  return best;
}

}  // namespace

DefectReport fit(const Curve& curve, int n, const std::optional<LemPoly>& init) {
  if (n < 1) throw UsageError("fit: degree must be >= 1");
  if (curve.size() < 8 * n) throw UsageError("fit: need at least 8n samples");

  Params q0;
  if (init) {
    q0.log_a = std::log(init->scale());
    q0.nodes = init->nodes();
    q0.mults = init->mults();
    if (init->degree() != n) throw UsageError("fit: init degree mismatch");
  } else {
    q0 = default_init(curve, n);
  }
  GNResult g = run_with_confluent_fallback(std::move(q0), curve);
  canonicalize(g.params);
  return to_report(g, n, 0);
}

DefectReport defect_report(const Curve& curve, int n, int restarts, std::uint64_t seed) {
  if (n < 1) throw UsageError("defect: degree must be >= 1");
  if (curve.size() < 8 * n) throw UsageError("defect: need at least 8n samples");

  const cplx c = curve.centroid();
  double disk_r = 0.0;
  for (const cplx& z : curve.z) disk_r = std::max(disk_r, std::abs(z - c));

  std::vector<Params> candidates;
  candidates.push_back(default_init(curve, n));
  std::mt19937_64 gen(seed);
  for (int r = 0; r < restarts; ++r) {
    Params q;
    q.nodes.resize(std::size_t(n));
    q.mults.assign(std::size_t(n), 1);
    for (int j = 0; j < n; ++j) {
      const double rad = disk_r * std::sqrt(uniform01(gen));
      const double ang = kTwoPi * uniform01(gen);
      q.nodes[std::size_t(j)] = c + rad * std::polar(1.0, ang);
    }
    candidates.push_back(std::move(q));
  }
  if (n >= 2) candidates.push_back(confluent_init(curve, n, c));

  // Restarts are independent; the winner is scheduling-independent
  // (min by defect, ties by lexicographic parameter order).
  std::vector<GNResult> results(candidates.size());
#pragma omp parallel for schedule(dynamic)
  for (long i = 0; i < long(candidates.size()); ++i)
    results[std::size_t(i)] = run_with_confluent_fallback(candidates[std::size_t(i)], curve);

  std::size_t best = 0;
  for (std::size_t i = 1; i < results.size(); ++i) {
    canonicalize(results[i].params);
    if (results[i].defect < results[best].defect ||
        (results[i].defect == results[best].defect &&
         lex_less(results[i].params, results[best].params)))
      best = i;
  }
  int all_failed = 1;
  for (const auto& g : results)
    if (std::isfinite(g.defect)) all_failed = 0;
  if (all_failed) {
    DefectReport rep = to_report(results[best], n, seed);
    rep.converged = false;
    return rep;
  }
  return to_report(results[best], n, seed);
}

}  // namespace lemlab
