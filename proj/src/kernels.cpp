#include "lemlab/kernels.hpp"

#include <algorithm>
#include <cstdlib>

#ifdef _OPENMP
#include <omp.h>
#endif

namespace lemlab::kernels {

namespace {
// Inputs below this size are not worth a parallel region.
constexpr int kParallelCutoff = 128;

bool use_parallel(std::size_t n) {
#ifdef _OPENMP
  return n >= kParallelCutoff;
#else
  (void)n;
  return false;
#endif
}
}  // namespace

void fft_pow2(std::vector<cplx>& a, int sign) {
  const std::size_t n = a.size();
  if (!is_power_of_two(int(n))) throw UsageError("fft_pow2: size must be a power of two");
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = double(sign) * kTwoPi / double(len);
    for (std::size_t i = 0; i < n; i += len) {
      for (std::size_t k = 0; k < len / 2; ++k) {
        const cplx w = std::polar(1.0, ang * double(k));
        const cplx u = a[i + k];
        const cplx v = a[i + k + len / 2] * w;
        a[i + k] = u + v;
        a[i + k + len / 2] = u - v;
      }
    }
  }
}

std::vector<cplx> synth_spectrum(std::vector<cplx> spectrum) {
  fft_pow2(spectrum, +1);
  return spectrum;
}

std::vector<cplx> fourier_coefficients(std::vector<cplx> samples) {
  const double inv = 1.0 / double(samples.size());
  fft_pow2(samples, -1);
  for (auto& c : samples) c *= inv;
  return samples;
}

namespace {
inline cplx laurent_point(double b, std::span<const cplx> a, double theta) {
  const cplx w = std::polar(1.0, theta);
  const cplx winv = std::conj(w);  // 1/w on the unit circle
  cplx acc = 0.0;
  // Horner in 1/w over a_N .. a_0.
  for (std::size_t k = a.size(); k-- > 0;) acc = acc * winv + a[k];
  return b * w + acc;
}

inline cplx laurent_dtheta_point(double b, std::span<const cplx> a, double theta) {
  const cplx w = std::polar(1.0, theta);
  const cplx winv = std::conj(w);
  cplx acc = 0.0;  // sum_k (-i k) a_k w^{-k}
  for (std::size_t k = a.size(); k-- > 0;) acc = acc * winv + cplx(0.0, -double(k)) * a[k];
  return cplx(0.0, 1.0) * b * w + acc;
}
}  // namespace

std::vector<cplx> synth_laurent_serial(double b, std::span<const cplx> a, int M) {
  std::vector<cplx> z(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) z[std::size_t(j)] = laurent_point(b, a, kTwoPi * double(j) / double(M));
  return z;
}

std::vector<cplx> synth_laurent_parallel(double b, std::span<const cplx> a, int M) {
  std::vector<cplx> z(static_cast<std::size_t>(M));
#pragma omp parallel for schedule(static)
  for (int j = 0; j < M; ++j) z[std::size_t(j)] = laurent_point(b, a, kTwoPi * double(j) / double(M));
  return z;
}

std::vector<cplx> synth_laurent_auto(double b, std::span<const cplx> a, int M) {
  return use_parallel(std::size_t(M)) ? synth_laurent_parallel(b, a, M)
                                      : synth_laurent_serial(b, a, M);
}

std::vector<cplx> synth_laurent_dtheta_serial(double b, std::span<const cplx> a, int M) {
  std::vector<cplx> z(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j)
    z[std::size_t(j)] = laurent_dtheta_point(b, a, kTwoPi * double(j) / double(M));
  return z;
}

std::vector<cplx> synth_laurent_dtheta_parallel(double b, std::span<const cplx> a, int M) {
  std::vector<cplx> z(static_cast<std::size_t>(M));
#pragma omp parallel for schedule(static)
  for (int j = 0; j < M; ++j)
    z[std::size_t(j)] = laurent_dtheta_point(b, a, kTwoPi * double(j) / double(M));
  return z;
}

std::vector<cplx> synth_laurent_dtheta_auto(double b, std::span<const cplx> a, int M) {
  return use_parallel(std::size_t(M)) ? synth_laurent_dtheta_parallel(b, a, M)
                                      : synth_laurent_dtheta_serial(b, a, M);
}

std::vector<double> im_conj_product_minus_serial(std::span<const cplx> u,
                                                 std::span<const cplx> v, double rhs) {
  std::vector<double> r(u.size());
  for (std::size_t j = 0; j < u.size(); ++j)
    r[j] = std::imag(std::conj(u[j]) * v[j]) - rhs;
  return r;
}

std::vector<double> im_conj_product_minus_parallel(std::span<const cplx> u,
                                                   std::span<const cplx> v, double rhs) {
  std::vector<double> r(u.size());
  const long n = long(u.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j)
    r[std::size_t(j)] = std::imag(std::conj(u[std::size_t(j)]) * v[std::size_t(j)]) - rhs;
  return r;
}

std::vector<double> im_conj_product_minus_auto(std::span<const cplx> u,
                                               std::span<const cplx> v, double rhs) {
  return use_parallel(u.size()) ? im_conj_product_minus_parallel(u, v, rhs)
                                : im_conj_product_minus_serial(u, v, rhs);
}

namespace {
inline double log_abs_point(double log_scale, std::span<const cplx> nodes,
                            std::span<const int> mults, cplx z) {
  double r = log_scale;
  for (std::size_t i = 0; i < nodes.size(); ++i)
    r += double(mults[i]) * std::log(std::abs(z - nodes[i]));
  return r;
}
}  // namespace

std::vector<double> log_abs_factored_serial(double log_scale, std::span<const cplx> nodes,
                                            std::span<const int> mults,
                                            std::span<const cplx> z) {
  std::vector<double> r(z.size());
  for (std::size_t j = 0; j < z.size(); ++j) r[j] = log_abs_point(log_scale, nodes, mults, z[j]);
  return r;
}

std::vector<double> log_abs_factored_parallel(double log_scale, std::span<const cplx> nodes,
                                              std::span<const int> mults,
                                              std::span<const cplx> z) {
  std::vector<double> r(z.size());
  const long n = long(z.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j)
    r[std::size_t(j)] = log_abs_point(log_scale, nodes, mults, z[std::size_t(j)]);
  return r;
}

std::vector<double> log_abs_factored_auto(double log_scale, std::span<const cplx> nodes,
                                          std::span<const int> mults,
                                          std::span<const cplx> z) {
  return use_parallel(z.size()) ? log_abs_factored_parallel(log_scale, nodes, mults, z)
                                : log_abs_factored_serial(log_scale, nodes, mults, z);
}

namespace {
inline cplx horner_point(std::span<const cplx> coeffs, cplx z) {
  cplx acc = 0.0;
  for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * z + coeffs[k];
  return acc;
}
}  // namespace

std::vector<cplx> horner_many_serial(std::span<const cplx> coeffs, std::span<const cplx> pts) {
  std::vector<cplx> r(pts.size());
  for (std::size_t j = 0; j < pts.size(); ++j) r[j] = horner_point(coeffs, pts[j]);
  return r;
}

std::vector<cplx> horner_many_parallel(std::span<const cplx> coeffs, std::span<const cplx> pts) {
  std::vector<cplx> r(pts.size());
  const long n = long(pts.size());
#pragma omp parallel for schedule(static)
  for (long j = 0; j < n; ++j) r[std::size_t(j)] = horner_point(coeffs, pts[std::size_t(j)]);
  return r;
}

std::vector<cplx> horner_many_auto(std::span<const cplx> coeffs, std::span<const cplx> pts) {
  return use_parallel(pts.size()) ? horner_many_parallel(coeffs, pts)
                                  : horner_many_serial(coeffs, pts);
}

namespace {
inline double orient(cplx a, cplx b, cplx c) {
  return (b.real() - a.real()) * (c.imag() - a.imag()) -
         (b.imag() - a.imag()) * (c.real() - a.real());
}

inline bool on_segment(cplx a, cplx b, cplx p) {
  return std::min(a.real(), b.real()) <= p.real() && p.real() <= std::max(a.real(), b.real()) &&
         std::min(a.imag(), b.imag()) <= p.imag() && p.imag() <= std::max(a.imag(), b.imag());
}

// Proper or improper intersection of segments [a,b] and [c,d].
bool segments_intersect(cplx a, cplx b, cplx c, cplx d) {
  const double o1 = orient(a, b, c);
  const double o2 = orient(a, b, d);
  const double o3 = orient(c, d, a);
  const double o4 = orient(c, d, b);
  if (((o1 > 0 && o2 < 0) || (o1 < 0 && o2 > 0)) &&
      ((o3 > 0 && o4 < 0) || (o3 < 0 && o4 > 0)))
    return true;
  if (o1 == 0 && on_segment(a, b, c)) return true;
  if (o2 == 0 && on_segment(a, b, d)) return true;
  if (o3 == 0 && on_segment(c, d, a)) return true;
  if (o4 == 0 && on_segment(c, d, b)) return true;
  return false;
}

// Segment i of the closed polygon against all later non-adjacent segments.
bool segment_clashes(std::span<const cplx> p, long i) {
  const long m = long(p.size());
  const cplx a = p[std::size_t(i)];
  const cplx b = p[std::size_t((i + 1) % m)];
  for (long j = i + 2; j < m; ++j) {
    if (i == 0 && j == m - 1) continue;  // wrap-around neighbors share a vertex
    const cplx c = p[std::size_t(j)];
    const cplx d = p[std::size_t((j + 1) % m)];
    if (segments_intersect(a, b, c, d)) return true;
  }
  return false;
}
}  // namespace

bool polygon_is_simple_serial(std::span<const cplx> p) {
  const long m = long(p.size());
  if (m < 3) return false;
  for (long i = 0; i < m; ++i)
    if (p[std::size_t(i)] == p[std::size_t((i + 1) % m)]) return false;
  for (long i = 0; i < m - 2; ++i)
    if (segment_clashes(p, i)) return false;
  return true;
}

bool polygon_is_simple_parallel(std::span<const cplx> p) {
  const long m = long(p.size());
  if (m < 3) return false;
  for (long i = 0; i < m; ++i)
    if (p[std::size_t(i)] == p[std::size_t((i + 1) % m)]) return false;
  bool clash = false;
#pragma omp parallel for schedule(dynamic, 16)
  for (long i = 0; i < m - 2; ++i) {
    bool local;
#pragma omp atomic read
    local = clash;
    if (local) continue;
    if (segment_clashes(p, i)) {
#pragma omp atomic write
      clash = true;
    }
  }
  return !clash;
}

bool polygon_is_simple_auto(std::span<const cplx> p) {
  return use_parallel(p.size()) ? polygon_is_simple_parallel(p) : polygon_is_simple_serial(p);
}

int winding_number(std::span<const cplx> poly, cplx p) {
  // Crossing-count form of the nonzero winding rule.
  int wn = 0;
  const std::size_t m = poly.size();
  for (std::size_t i = 0; i < m; ++i) {
    const cplx a = poly[i];
    const cplx b = poly[(i + 1) % m];
    if (a.imag() <= p.imag()) {
      if (b.imag() > p.imag() && orient(a, b, p) > 0) ++wn;
    } else {
      if (b.imag() <= p.imag() && orient(a, b, p) < 0) --wn;
    }
  }
  return wn;
}

bool point_in_polygon(std::span<const cplx> poly, cplx p) {
  return winding_number(poly, p) != 0;
}

}  // namespace lemlab::kernels
