#include "lemlab/poly.hpp"

#include <algorithm>
#include <cassert>
#include <limits>
#include <sstream>

#include "lemlab/kernels.hpp"

namespace lemlab {

ComplexPoly::ComplexPoly(std::vector<cplx> coeffs) : coeff_(std::move(coeffs)) {
  while (coeff_.size() > 1 && coeff_.back() == cplx(0.0)) coeff_.pop_back();
  if (coeff_.empty()) coeff_.push_back(cplx(0.0));
}

ComplexPoly ComplexPoly::from_roots(cplx scale, std::span<const cplx> rts) {
  std::vector<cplx> c{scale};
  for (const cplx& r : rts) {
    c.push_back(cplx(0.0));
    for (std::size_t k = c.size() - 1; k > 0; --k) c[k] = c[k - 1] - r * c[k];
    c[0] = -r * c[0];
  }
  return ComplexPoly(std::move(c));
}

cplx ComplexPoly::eval(cplx z) const {
  cplx acc = 0.0;
  for (std::size_t k = coeff_.size(); k-- > 0;) acc = acc * z + coeff_[k];
  return acc;
}

std::vector<cplx> ComplexPoly::eval_many(std::span<const cplx> pts) const {
  return kernels::horner_many_auto(coeff_, pts);
}

ComplexPoly ComplexPoly::derivative() const {
  if (coeff_.size() == 1) return ComplexPoly();
  std::vector<cplx> d(coeff_.size() - 1);
  for (std::size_t k = 1; k < coeff_.size(); ++k) d[k - 1] = double(k) * coeff_[k];
  return ComplexPoly(std::move(d));
}

ComplexPoly ComplexPoly::conj_coeffs() const {
  std::vector<cplx> c(coeff_.size());
  for (std::size_t k = 0; k < coeff_.size(); ++k) c[k] = std::conj(coeff_[k]);
  return ComplexPoly(std::move(c));
}

ComplexPoly ComplexPoly::operator+(const ComplexPoly& o) const {
  std::vector<cplx> c(std::max(coeff_.size(), o.coeff_.size()), cplx(0.0));
  for (std::size_t k = 0; k < coeff_.size(); ++k) c[k] += coeff_[k];
  for (std::size_t k = 0; k < o.coeff_.size(); ++k) c[k] += o.coeff_[k];
  return ComplexPoly(std::move(c));
}

ComplexPoly ComplexPoly::operator-(const ComplexPoly& o) const {
  std::vector<cplx> c(std::max(coeff_.size(), o.coeff_.size()), cplx(0.0));
  for (std::size_t k = 0; k < coeff_.size(); ++k) c[k] += coeff_[k];
  for (std::size_t k = 0; k < o.coeff_.size(); ++k) c[k] -= o.coeff_[k];
  return ComplexPoly(std::move(c));
}

ComplexPoly ComplexPoly::operator*(const ComplexPoly& o) const {
  if (is_zero() || o.is_zero()) return ComplexPoly();
  std::vector<cplx> c(coeff_.size() + o.coeff_.size() - 1, cplx(0.0));
  for (std::size_t i = 0; i < coeff_.size(); ++i)
    for (std::size_t j = 0; j < o.coeff_.size(); ++j) c[i + j] += coeff_[i] * o.coeff_[j];
  return ComplexPoly(std::move(c));
}

ComplexPoly ComplexPoly::operator*(cplx s) const {
  std::vector<cplx> c(coeff_);
  for (auto& v : c) v *= s;
  return ComplexPoly(std::move(c));
}

ComplexPoly ComplexPoly::deflate(cplx root, double tol) const {
  if (degree() < 1) throw UsageError("deflate: degree must be >= 1");
  std::vector<cplx> q(coeff_.size() - 1);
  cplx b = coeff_.back();
  for (std::size_t k = coeff_.size() - 1; k-- > 0;) {
    const cplx next = coeff_[k] + root * b;
    q[k] = b;
    b = next;
  }
  double scale = 0.0;
  for (const auto& c : coeff_) scale = std::max(scale, std::abs(c));
  if (std::abs(b) > tol * std::max(1.0, scale))
    throw UsageError("deflate: remainder not negligible");
  return ComplexPoly(std::move(q));
}

namespace {

// Evaluation-magnitude bound used as the Aberth stopping scale.
double eval_scale(const std::vector<cplx>& c, cplx z) {
  double s = 0.0;
  double zp = 1.0;
  const double az = std::abs(z);
  for (const auto& ck : c) {
    s += std::abs(ck) * zp;
    zp *= az;
  }
  return s;
}

bool compare_re_im(const cplx& a, const cplx& b) {
  if (a.real() != b.real()) return a.real() < b.real();
  return a.imag() < b.imag();
}

}  // namespace

std::vector<cplx> roots(const ComplexPoly& p, double tol, int max_iter) {
  const int n = p.degree();
  if (n < 1) throw UsageError("roots: degree must be >= 1");
  const auto& c = p.coeffs();
  if (n == 1) return {-c[0] / c[1]};

  // Cauchy-type bound for the initial circle.
  double bound = 0.0;
  for (int k = 0; k < n; ++k) bound = std::max(bound, std::abs(c[std::size_t(k)] / c[std::size_t(n)]));
  const double R = 1.0 + bound;

  std::vector<cplx> z(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i)
    z[std::size_t(i)] = R * std::polar(1.0, kTwoPi * (double(i) + 0.357) / double(n));

  double max_coeff = 0.0;
  for (const auto& ck : c) max_coeff = std::max(max_coeff, std::abs(ck));

  // Iterate each root down to its evaluation rounding floor; the user
  // tolerance is the final guarantee, not the stopping rule (multiple roots
  // need the extra sweeps).
  constexpr double kEps = std::numeric_limits<double>::epsilon();
  const ComplexPoly dp = p.derivative();
  bool converged = false;
  for (int it = 0; it < max_iter && !converged; ++it) {
    converged = true;
    for (int i = 0; i < n; ++i) {
      const cplx zi = z[std::size_t(i)];
      const cplx pv = p.eval(zi);
      if (std::abs(pv) <= 16.0 * kEps * eval_scale(c, zi)) continue;
      cplx dv = dp.eval(zi);
      if (dv == cplx(0.0)) dv = cplx(1e-30, 0.0);
      const cplx newton = pv / dv;
      cplx sum = 0.0;
      for (int j = 0; j < n; ++j)
        if (j != i) sum += 1.0 / (zi - z[std::size_t(j)]);
      const cplx denom = 1.0 - newton * sum;
      const cplx delta = denom == cplx(0.0) ? newton : newton / denom;
      z[std::size_t(i)] = zi - delta;
      if (std::abs(delta) > 4.0 * kEps * (1.0 + std::abs(zi))) converged = false;
    }
  }

  // Collapse clusters left by multiple roots: the mean cancels the leading
  // error term, and modified Newton (step scaled by the multiplicity)
  // restores quadratic convergence at the m-fold root.
  std::vector<bool> used(std::size_t(n), false);
  for (int i = 0; i < n; ++i) {
    if (used[std::size_t(i)]) continue;
    std::vector<int> cluster{i};
    const double ctol = 1e-6 * (1.0 + std::abs(z[std::size_t(i)]));
    for (int j = i + 1; j < n; ++j)
      if (!used[std::size_t(j)] && std::abs(z[std::size_t(j)] - z[std::size_t(i)]) < ctol)
        cluster.push_back(j);
    if (cluster.size() < 2) continue;
    cplx mean = 0.0;
    for (int j : cluster) mean += z[std::size_t(j)];
    mean /= double(cluster.size());
    for (int polish = 0; polish < 3; ++polish) {
      const cplx dv = dp.eval(mean);
      if (dv == cplx(0.0)) break;
      mean -= double(cluster.size()) * p.eval(mean) / dv;
    }
    for (int j : cluster) {
      z[std::size_t(j)] = mean;
      used[std::size_t(j)] = true;
    }
  }

  std::sort(z.begin(), z.end(), compare_re_im);
  for (const cplx& zi : z) {
    if (std::abs(p.eval(zi)) <= tol * std::max(max_coeff, eval_scale(c, zi))) continue;
    std::ostringstream msg;
    msg << "roots: no convergence after " << max_iter << " iterations (degree " << n << ")";
    throw RootsError(msg.str(), z);
  }
  return z;
}

LemPoly::LemPoly(double scale, std::vector<cplx> nodes, std::vector<int> mults)
    : scale_(scale), nodes_(std::move(nodes)), mults_(std::move(mults)) {
  if (!(scale_ > 0.0)) throw UsageError("LemPoly: scale must be positive");
  if (nodes_.size() != mults_.size()) throw UsageError("LemPoly: nodes/multiplicities mismatch");
  degree_ = 0;
  for (int k : mults_) {
    if (k < 1) throw UsageError("LemPoly: multiplicities must be >= 1");
    degree_ += k;
  }
  if (degree_ < 1) throw UsageError("LemPoly: degree must be >= 1");
  std::vector<cplx> all_roots;
  all_roots.reserve(std::size_t(degree_));
  for (std::size_t j = 0; j < nodes_.size(); ++j)
    for (int k = 0; k < mults_[j]; ++k) all_roots.push_back(nodes_[j]);
  expanded_ = ComplexPoly::from_roots(cplx(scale_), all_roots);
}

LemPoly::LemPoly(double scale, std::vector<cplx> nodes)
    : LemPoly(scale, nodes, std::vector<int>(nodes.size(), 1)) {}

bool LemPoly::simple_nodes() const {
  return std::all_of(mults_.begin(), mults_.end(), [](int k) { return k == 1; });
}

cplx LemPoly::eval(cplx z) const {
  cplx r = scale_;
  for (std::size_t j = 0; j < nodes_.size(); ++j)
    for (int k = 0; k < mults_[j]; ++k) r *= z - nodes_[j];
  return r;
}

double LemPoly::log_abs(cplx z) const {
  double r = std::log(scale_);
  for (std::size_t j = 0; j < nodes_.size(); ++j)
    r += double(mults_[j]) * std::log(std::abs(z - nodes_[j]));
  return r;
}

CriticalDecomp double_pole_decomposition(const LemPoly& lp, double tol) {
  const int n = lp.degree();
  const ComplexPoly& p = lp.poly();
  ComplexPoly dp = p.derivative();
  const ComplexPoly ddp = dp.derivative();

  // P' = prod_j (z-lambda_j)^{k_j - 1} * S(z); deflate the repeated-node part
  // so only the free critical points remain.
  double node_scale = 1.0;
  for (const cplx& nd : lp.nodes()) node_scale = std::max(node_scale, std::abs(nd));
  for (std::size_t j = 0; j < lp.nodes().size(); ++j)
    for (int k = 1; k < lp.mults()[j]; ++k) dp = dp.deflate(lp.nodes()[j], 1e-7 * node_scale);

  CriticalDecomp out;
  out.constant = 1.0 / double(n);
  if (dp.degree() < 1) return out;  // single confluent node: P/P' = (z-lambda)/n

  std::vector<cplx> xi = roots(dp, 1e-13, 400);
  for (std::size_t i = 0; i < xi.size(); ++i)
    for (std::size_t j = i + 1; j < xi.size(); ++j)
      if (std::abs(xi[i] - xi[j]) < tol * std::max(1.0, node_scale))
        throw ConfluentCriticalPointsError(
            "double_pole_decomposition: confluent critical points");

  out.poles = std::move(xi);
  out.coefficients.reserve(out.poles.size());
  double dd_scale = 0.0;
  for (const auto& ck : ddp.coeffs()) dd_scale = std::max(dd_scale, std::abs(ck));
  for (const cplx& x : out.poles) {
    const cplx dd = ddp.eval(x);
    if (std::abs(dd) < 1e-7 * dd_scale * std::max(1.0, node_scale))
      throw ConfluentCriticalPointsError(
          "double_pole_decomposition: P'' vanishes at a critical point (double poles only)");
    out.coefficients.push_back(-p.eval(x) / dd);
  }
  return out;
}

}  // namespace lemlab
