#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <random>

#include "lemlab/conformal.hpp"
#include "lemlab/io.hpp"

using namespace lemlab;

TEST_CASE("sample_boundary: circle, shift and ellipse") {
  // b=1, no tail: the 8th roots of unity.
  const Curve c8 = sample_boundary(LaurentMap(1.0, {cplx(0.0)}), 8);
  for (int j = 0; j < 8; ++j)
    CHECK(std::abs(c8.z[std::size_t(j)] - std::polar(1.0, kTwoPi * j / 8.0)) < 1e-14);

  // a_0 translates.
  const Curve shifted = sample_boundary(LaurentMap(1.0, {cplx(0.3)}), 8);
  for (int j = 0; j < 8; ++j)
    CHECK(std::abs(shifted.z[std::size_t(j)] - (c8.z[std::size_t(j)] + 0.3)) < 1e-14);

  // b=1, a_1=0.5 is the ellipse with semiaxes 1.5, 0.5.
  const Curve ell = sample_boundary(LaurentMap(1.0, {cplx(0.0), cplx(0.5)}), 64);
  for (const cplx& z : ell.z) {
    const double lhs = z.real() * z.real() / (1.5 * 1.5) + z.imag() * z.imag() / (0.5 * 0.5);
    CHECK(std::abs(lhs - 1.0) < 1e-12);
  }
}

TEST_CASE("sample_boundary: aliasing and grid preconditions") {
  LaurentMap map(1.0, std::vector<cplx>(9, cplx(0.01)));  // N = 8
  CHECK_THROWS_AS(sample_boundary(map, 16), AliasingError);  // needs >= 36
  CHECK_THROWS_AS(sample_boundary(map, 48), UsageError);     // not a power of two
  CHECK_NOTHROW(sample_boundary(map, 64));
}

TEST_CASE("fit_map_from_curve round-trips sample_boundary") {
  std::mt19937_64 gen(5);
  std::vector<cplx> a(static_cast<std::size_t>(7));
  for (auto& c : a) c = 0.04 * cplx(uniform01(gen) - 0.5, uniform01(gen) - 0.5);
  a[0] = cplx(0.2, -0.1);
  const LaurentMap map(1.7, a);
  const auto rep = fit_map_from_curve(sample_boundary(map, 64));
  CHECK(rep.map.b == doctest::Approx(map.b).epsilon(1e-14));
  REQUIRE(rep.map.order() >= map.order());
  for (int k = 0; k <= map.order(); ++k)
    CHECK(std::abs(rep.map.a[std::size_t(k)] - map.a[std::size_t(k)]) < 1e-12);
  CHECK(rep.positive_mode_sup < 1e-12);
}

TEST_CASE("fit_map_from_curve: circle about a center") {
  std::vector<cplx> z(32);
  for (int j = 0; j < 32; ++j)
    z[std::size_t(j)] = cplx(1.0, 1.0) + std::polar(2.0, kTwoPi * j / 32.0);
  const auto rep = fit_map_from_curve(Curve(std::move(z)));
  CHECK(rep.map.b == doctest::Approx(2.0).epsilon(1e-14));
  CHECK(std::abs(rep.map.a[0] - cplx(1.0, 1.0)) < 1e-13);
  CHECK(rep.map.order() == 0);
}

TEST_CASE("fit_map_from_curve rejects non-exterior parametrizations") {
  // Reversed orientation puts the radius on frequency -1, not +1.
  std::vector<cplx> z(32);
  for (int j = 0; j < 32; ++j) z[std::size_t(j)] = std::polar(1.0, -kTwoPi * j / 32.0);
  CHECK_THROWS_AS(fit_map_from_curve(Curve(std::move(z))), NotExteriorMapError);

  // Heavy positive-frequency content (interior-map layout) is rejected too.
  std::vector<cplx> w(32);
  for (int j = 0; j < 32; ++j) {
    const cplx u = std::polar(1.0, kTwoPi * j / 32.0);
    w[std::size_t(j)] = u + 0.4 * u * u;
  }
  CHECK_THROWS_AS(fit_map_from_curve(Curve(std::move(w))), NotExteriorMapError);
}

TEST_CASE("trace_lemniscate: degree-1 cases are circles") {
  // P = z: the unit circle on the nose.
  const Curve unit = trace_lemniscate(LemPoly(1.0, {cplx(0.0)}), 64);
  for (int j = 0; j < 64; ++j)
    CHECK(std::abs(unit.z[std::size_t(j)] - std::polar(1.0, kTwoPi * j / 64.0)) < 1e-12);

  // P = (z-c)/r: circle of radius r about c.
  const cplx c(0.4, -0.2);
  const double r = 1.7;
  const Curve circ = trace_lemniscate(LemPoly(1.0 / r, {c}), 64);
  for (int j = 0; j < 64; ++j)
    CHECK(std::abs(circ.z[std::size_t(j)] - (c + std::polar(r, kTwoPi * j / 64.0))) < 1e-12);
  CHECK(circ.seed.has_value());
}

TEST_CASE("trace_lemniscate: Bernoulli boundary values") {
  const LemPoly p(1.0, {cplx(0.8), cplx(-0.8)});
  const int M = 256;
  const Curve curve = trace_lemniscate(p, M);
  // theta = 0 point solves z^2 - 0.64 = 1 on the positive real axis.
  CHECK(std::abs(curve.z[0] - std::sqrt(1.64)) < 1e-12);
  // |P| = 1 and P = e^{2 i theta} along the trace.
  for (int j = 0; j < M; ++j) {
    const cplx v = p.eval(curve.z[std::size_t(j)]);
    CHECK(std::abs(std::abs(v) - 1.0) < 1e-12);
    CHECK(std::abs(v - std::polar(1.0, 2.0 * curve.theta(j))) < 1e-11);
  }
}

TEST_CASE("trace_lemniscate: confluent circle covers the boundary once") {
  const LemPoly p(1.0, {cplx(0.1)}, {2});
  const Curve curve = trace_lemniscate(p, 64);
  for (int j = 0; j < 64; ++j)
    CHECK(std::abs(curve.z[std::size_t(j)] - (cplx(0.1) + std::polar(1.0, kTwoPi * j / 64.0))) <
          1e-12);
}

TEST_CASE("trace_lemniscate rejects disconnected lemniscates") {
  // rho > 1: |P(0)| = rho^2 > 1, two separate ovals.
  const LemPoly p(1.0, {cplx(1.2), cplx(-1.2)});
  CHECK_THROWS_AS(trace_lemniscate(p, 256), TraceError);
}

TEST_CASE("traced Bernoulli fits an exterior map with center symmetry") {
  const LemPoly p(1.0, {cplx(0.8), cplx(-0.8)});
  const int M = 1024;
  const Curve curve = trace_lemniscate(p, M);
  const auto rep = fit_map_from_curve(curve);
  CHECK(rep.map.b == doctest::Approx(1.0).epsilon(1e-12));
  // z(-w) = -z(w): only odd-exponent Laurent coefficients survive.
  for (int k = 0; k <= rep.map.order(); k += 2)
    CHECK(std::abs(rep.map.a[std::size_t(k)]) < 1e-12);
  CHECK(std::abs(rep.map.a[1] - cplx(0.32)) < 1e-12);  // sqrt(w^2+0.64) ~ w + 0.32/w - ...

  // Reconstruction: resampling the fitted map reproduces the trace.
  const Curve back = sample_boundary(rep.map, M);
  double sup = 0.0;
  for (int j = 0; j < M; ++j)
    sup = std::max(sup, std::abs(back.z[std::size_t(j)] - curve.z[std::size_t(j)]));
  CHECK(sup < 1e-10);

  // |P(z(theta))| = 1 on the resampled boundary.
  for (int j = 0; j < M; j += 7)
    CHECK(std::abs(std::abs(p.eval(back.z[std::size_t(j)])) - 1.0) < 1e-9);
}

TEST_CASE("univalence_check") {
  const auto circle = univalence_check(LaurentMap(2.0, {cplx(0.0)}), 64);
  CHECK(circle.ok);
  CHECK(circle.margin == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(circle.winding == 1);

  // b=1, a_1=1: |dz/dtheta|^2 = 2 - 2 cos 2theta vanishes at theta = 0.
  const auto degenerate = univalence_check(LaurentMap(1.0, {cplx(0.0), cplx(1.0)}), 64);
  CHECK_FALSE(degenerate.ok);
  CHECK(degenerate.margin < 1e-12);

  const auto ellipse = univalence_check(LaurentMap(1.0, {cplx(0.0), cplx(0.5)}), 64);
  CHECK(ellipse.ok);
  CHECK(ellipse.margin == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("curve CSV round trip") {
  const Curve curve = sample_boundary(LaurentMap(1.3, {cplx(0.1, 0.2), cplx(0.25)}), 32);
  const std::string csv = io::curve_csv(curve);
  CHECK(csv.rfind("theta,re_z,im_z\n", 0) == 0);
  const Curve back = io::curve_from_csv(csv);
  REQUIRE(back.size() == curve.size());
  for (int j = 0; j < curve.size(); ++j) {
    CHECK(back.z[std::size_t(j)].real() == curve.z[std::size_t(j)].real());
    CHECK(back.z[std::size_t(j)].imag() == curve.z[std::size_t(j)].imag());
  }
  CHECK_THROWS_AS(io::curve_from_csv("x,y\n1,2\n"), UsageError);
  CHECK_THROWS_AS(Curve(std::vector<cplx>(12)), UsageError);
}
