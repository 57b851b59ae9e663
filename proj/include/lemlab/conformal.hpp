#pragma once

#include <optional>
#include <span>
#include <vector>

#include "lemlab/core.hpp"
#include "lemlab/poly.hpp"

namespace lemlab {

/// Truncated exterior conformal map z(w) = b w + sum_{k=0..N} a_k w^{-k},
/// univalent on |w| > 1 with z'(inf) = b > 0.
struct LaurentMap {
  double b = 1.0;
  std::vector<cplx> a;  // a_0 .. a_N

  LaurentMap() : a{cplx(0.0)} {}
  LaurentMap(double b_, std::vector<cplx> a_) : b(b_), a(std::move(a_)) {
    if (!(b > 0.0)) throw UsageError("LaurentMap: b must be positive");
    if (a.empty()) a.push_back(cplx(0.0));
  }

  int order() const { return int(a.size()) - 1; }  // truncation order N

  /// Pad the tail with zeros up to order N.
  void grow(int N) {
    while (order() < N) a.push_back(cplx(0.0));
  }
};

/// Closed boundary sampled at M = 2^k uniform theta points; sample j
/// corresponds to w = e^{i theta_j} under the map/trace that produced it.
struct Curve {
  std::vector<cplx> z;
  std::optional<cplx> seed;  // continuation seed for traced lemniscates

  Curve() = default;
  explicit Curve(std::vector<cplx> samples, std::optional<cplx> seed_pt = std::nullopt)
      : z(std::move(samples)), seed(seed_pt) {
    if (!is_power_of_two(int(z.size())))
      throw UsageError("Curve: sample count must be a power of two");
  }

  int size() const { return int(z.size()); }
  double theta(int j) const { return kTwoPi * double(j) / double(z.size()); }
  cplx centroid() const {
    cplx c = 0.0;
    for (const cplx& p : z) c += p;
    return c / double(z.size());
  }
};

class NotExteriorMapError : public Error {
 public:
  explicit NotExteriorMapError(const std::string& what) : Error(what) {}
};

class TraceError : public Error {
 public:
  explicit TraceError(const std::string& what) : Error(what) {}
};

/// Sample z(e^{i theta_j}) on the uniform M-grid via inverse FFT.
/// Requires M to be a power of two with M >= 4(N+1).
Curve sample_boundary(const LaurentMap& map, int M);

/// dz/dtheta samples on the M-grid.
std::vector<cplx> boundary_dtheta(const LaurentMap& map, int M);

struct MapFitReport {
  LaurentMap map;
  /// Largest dropped tail coefficient magnitude (frequencies below -N).
  double tail_excess = 0.0;
  /// Largest positive-frequency (>= 2) mode magnitude; must be noise.
  double positive_mode_sup = 0.0;
};

struct MapFitOptions {
  int max_order = -1;             // default M/4 - 1
  double tail_threshold = 1e-13;  // relative to b; trailing coefficients below are dropped
  double positive_mode_tol = 1e-8;  // relative to b; larger content is an error
};

/// Inverse of sample_boundary by forward Fourier analysis. The curve must
/// carry theta-correspondence to a univalent exterior map.
MapFitReport fit_map_from_curve(const Curve& curve, const MapFitOptions& opt = {});

/// Trace the lemniscate {|P| = 1}: z_j solves P(z_j) = e^{i n theta_j},
/// by Newton continuation in theta from a real-axis seed at w = 1.
Curve trace_lemniscate(const LemPoly& p, int M);

struct UnivalenceReport {
  bool ok = false;
  double margin = 0.0;  // min_j |dz/dtheta|
  int winding = 0;
};

/// Univalence proxy: positive |z_theta| on the grid and winding number 1
/// about an interior point.
UnivalenceReport univalence_check(const LaurentMap& map, int M);

}  // namespace lemlab
