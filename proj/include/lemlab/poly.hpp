#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lemlab/core.hpp"

namespace lemlab {

/// Dense complex polynomial, coefficients in ascending degree order.
/// Trailing zero coefficients are trimmed; the zero polynomial is {0}.
class ComplexPoly {
 public:
  ComplexPoly() : coeff_{cplx(0.0)} {}
  explicit ComplexPoly(std::vector<cplx> coeffs);
  static ComplexPoly from_roots(cplx scale, std::span<const cplx> roots);

  int degree() const { return int(coeff_.size()) - 1; }
  bool is_zero() const { return coeff_.size() == 1 && coeff_[0] == cplx(0.0); }
  const std::vector<cplx>& coeffs() const { return coeff_; }
  cplx operator[](std::size_t k) const { return k < coeff_.size() ? coeff_[k] : cplx(0.0); }

  cplx eval(cplx z) const;
  std::vector<cplx> eval_many(std::span<const cplx> pts) const;

  ComplexPoly derivative() const;
  /// Companion polynomial with conjugated coefficients.
  ComplexPoly conj_coeffs() const;

  ComplexPoly operator+(const ComplexPoly& o) const;
  ComplexPoly operator-(const ComplexPoly& o) const;
  ComplexPoly operator*(const ComplexPoly& o) const;
  ComplexPoly operator*(cplx s) const;

  /// Synthetic division by (z - root); returns quotient, checks |remainder| <= tol.
  ComplexPoly deflate(cplx root, double tol) const;

 private:
  std::vector<cplx> coeff_;
};

/// Raised when the simultaneous root iteration fails to converge; carries
/// the best iterates found so far.
class RootsError : public Error {
 public:
  RootsError(const std::string& what, std::vector<cplx> best)
      : Error(what), best_iterates(std::move(best)) {}
  std::vector<cplx> best_iterates;
};

/// All complex roots by Aberth-Ehrlich simultaneous iteration (see docs/README;
/// companion-matrix eigenvalues were the rejected alternative). Multiple roots
/// are returned repeated. Roots are sorted by (Re, Im) for determinism.
std::vector<cplx> roots(const ComplexPoly& p, double tol = 1e-12, int max_iter = 200);

/// Polynomial held in factored form a * prod_j (z - lambda_j)^{k_j} with a > 0.
/// The factored data is authoritative; the expansion is cached.
class LemPoly {
 public:
  LemPoly(double scale, std::vector<cplx> nodes, std::vector<int> mults);
  LemPoly(double scale, std::vector<cplx> nodes);  // all multiplicities 1

  double scale() const { return scale_; }
  const std::vector<cplx>& nodes() const { return nodes_; }
  const std::vector<int>& mults() const { return mults_; }
  int degree() const { return degree_; }
  bool simple_nodes() const;

  /// Evaluation from the factored data (better conditioned than the expansion).
  cplx eval(cplx z) const;
  double log_abs(cplx z) const;

  const ComplexPoly& poly() const { return expanded_; }

 private:
  double scale_;
  std::vector<cplx> nodes_;
  std::vector<int> mults_;
  int degree_;
  ComplexPoly expanded_;
};

class ConfluentCriticalPointsError : public Error {
 public:
  explicit ConfluentCriticalPointsError(const std::string& what) : Error(what) {}
};

/// Partial-fraction data of [P/P']': constant term 1/n plus pure double poles
/// at the free critical points of P.
struct CriticalDecomp {
  double constant = 0.0;          // always 1/deg(P)
  std::vector<cplx> poles;        // xi_k
  std::vector<cplx> coefficients; // A_k

  cplx eval(cplx z) const {
    cplx r = constant;
    for (std::size_t k = 0; k < poles.size(); ++k) {
      const cplx d = z - poles[k];
      r += coefficients[k] / (d * d);
    }
    return r;
  }
};

/// Decompose [P/P']' = 1/n + sum_k A_k/(z - xi_k)^2. Requires the free
/// critical points (zeros of P' not canceled by repeated nodes) to be simple;
/// confluent configurations raise ConfluentCriticalPointsError.
CriticalDecomp double_pole_decomposition(const LemPoly& p, double tol = 1e-9);

}  // namespace lemlab
