#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <random>

#include "lemlab/fit.hpp"
#include "lemlab/flow.hpp"

using namespace lemlab;

namespace {

FlowState make_state(double b, std::vector<cplx> a, double t = 0.0) {
  FlowState s;
  s.t = t;
  s.map = LaurentMap(b, std::move(a));
  return s;
}

}  // namespace

TEST_CASE("coefficient_velocities: circle gives b_dot = 1/b") {
  for (double b : {0.5, 1.0, 2.0}) {
    const auto vel = coefficient_velocities(LaurentMap(b, {cplx(0.0)}));
    CHECK(vel.b_dot == doctest::Approx(1.0 / b).epsilon(1e-13));
    for (const cplx& ad : vel.a_dot) CHECK(std::abs(ad) < 1e-13);
    CHECK(vel.unmatched_residual < 1e-12);
  }
}

TEST_CASE("coefficient_velocities: ellipse mode matching") {
  // Matching modes of Im(conj(z_t) z_theta) = 1 for z = b w + a/w gives
  // b bdot - a adot = 1 and b adot - a bdot = 0.
  const double b = 1.0, a = 0.5;
  const auto vel = coefficient_velocities(LaurentMap(b, {cplx(0.0), cplx(a)}));
  const double bdot = vel.b_dot;
  const double adot = vel.a_dot[1].real();
  CHECK(b * bdot - a * adot == doctest::Approx(1.0).epsilon(1e-13));
  CHECK(b * adot - a * bdot == doctest::Approx(0.0).epsilon(1e-13));
  CHECK(std::abs(vel.a_dot[0]) < 1e-14);
  CHECK(std::abs(vel.a_dot[1].imag()) < 1e-14);
  // closed form: bdot = b/(b^2-a^2)
  CHECK(bdot == doctest::Approx(4.0 / 3.0).epsilon(1e-13));
  CHECK(adot == doctest::Approx(2.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("coefficient_velocities solves the PG equation pointwise") {
  std::mt19937_64 gen(31);
  std::vector<cplx> a(static_cast<std::size_t>(7));
  for (auto& c : a) c = 0.05 * cplx(uniform01(gen) - 0.5, uniform01(gen) - 0.5);
  const LaurentMap map(1.2, a);
  const auto vel = coefficient_velocities(map);
  CHECK(pg_residual(map, vel, 256).sup < 1e-12);
}

TEST_CASE("pg_residual: circle sanity values") {
  const LaurentMap map(2.0, {cplx(0.0)});
  MapVelocity good;
  good.b_dot = 0.5;
  good.a_dot = {cplx(0.0)};
  CHECK(pg_residual(map, good, 64).sup < 1e-14);

  MapVelocity frozen;
  frozen.b_dot = 0.0;
  frozen.a_dot = {cplx(0.0)};
  const auto rep = pg_residual(map, frozen, 64);
  for (double r : rep.samples) CHECK(r == doctest::Approx(-1.0).epsilon(1e-14));
}

TEST_CASE("step: dt = 0 is the identity") {
  const FlowState s = make_state(1.0, {cplx(0.1, -0.2), cplx(0.3)});
  const FlowState s2 = step(s, 0.0);
  CHECK(s2.t == s.t);
  CHECK(s2.map.b == s.map.b);
  CHECK(s2.map.a == s.map.a);
  CHECK_THROWS_AS(step(s, 0.02), UsageError);  // dt_max default 1e-2
}

TEST_CASE("step: circle oracle b(0.5) = sqrt(2) after 500 RK4 steps") {
  FlowState s = make_state(1.0, {cplx(0.0)});
  for (int i = 0; i < 500; ++i) s = step(s, 1e-3);
  CHECK(std::abs(s.map.b - std::sqrt(2.0)) < 1e-10);
  CHECK(s.t == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("step: ellipse conservation laws to 1e-9") {
  // b bdot - a adot = 1 integrates to b^2 - a^2 = b0^2 - a0^2 + 2t;
  // b adot - a bdot = 0 freezes a/b.
  FlowState s = make_state(1.0, {cplx(0.0), cplx(0.5)});
  for (int i = 0; i < 500; ++i) s = step(s, 1e-3);
  const double b = s.map.b, a = s.map.a[1].real();
  CHECK(std::abs((b * b - a * a) - 1.75) < 1e-9);
  CHECK(std::abs(a / b - 0.5) < 1e-9);
  CHECK(std::abs(s.map.a[1].imag()) < 1e-12);
  // closed form b = sqrt(1.75/0.75)
  CHECK(b == doctest::Approx(std::sqrt(7.0 / 3.0)).epsilon(1e-9));
}

TEST_CASE("step: RK4 is 4th order on the circle") {
  auto err_at = [](double dt) {
    FlowState s = make_state(1.0, {cplx(0.0)});
    const int n = int(std::lround(0.5 / dt));
    for (int i = 0; i < n; ++i) s = step(s, dt);
    return std::abs(s.map.b - std::sqrt(2.0));
  };
  const double e1 = err_at(1e-2), e2 = err_at(5e-3);
  CHECK(e1 / e2 > 12.0);
  CHECK(e1 / e2 < 20.0);
}

TEST_CASE("step: forward-backward pair returns within O(dt^5)") {
  for (auto a1 : {0.0, 0.4}) {
    const FlowState s = make_state(1.0, {cplx(0.05, 0.02), cplx(a1)});
    const FlowState back = step(step(s, 1e-2), -1e-2);
    CHECK(std::abs(back.map.b - s.map.b) < 1e-9);
    for (int k = 0; k <= s.map.order(); ++k)
      CHECK(std::abs(back.map.a[std::size_t(k)] - s.map.a[std::size_t(k)]) < 1e-9);
    CHECK(back.t == doctest::Approx(0.0).epsilon(1e-15));
  }
}

TEST_CASE("evolve: circle runs clean with monotone radius") {
  std::vector<double> radii;
  const Observer watch = [&](const FlowState& s) { radii.push_back(s.map.b); };
  const Observer obs[] = {watch};
  const auto traj = evolve(make_state(1.0, {cplx(0.0)}), 0.3, 1e-3, obs);
  CHECK(traj.events.empty());
  CHECK(traj.states.size() == 301);
  CHECK(radii.size() == 301);
  for (std::size_t i = 1; i < radii.size(); ++i) CHECK(radii[i] > radii[i - 1]);
  // no observers is fine too
  const auto traj2 = evolve(make_state(1.0, {cplx(0.0)}), 0.01, 1e-3);
  CHECK(traj2.states.size() == 11);
  CHECK_THROWS_AS(evolve(make_state(1.0, {cplx(0.0)}), 0.0105, 1e-3), UsageError);
}

TEST_CASE("evolve: backward ellipse hits a cusp in finite time") {
  // b^2 - a^2 shrinks by 2|t|; the margin b - a must collapse before 0.375.
  const auto traj = evolve(make_state(1.0, {cplx(0.0), cplx(0.5)}), -0.5, -1e-3);
  REQUIRE(traj.events.size() == 1);
  CHECK(traj.events[0].type == Event::Type::cusp);
  CHECK(traj.events[0].t < -0.3);
  CHECK(traj.events[0].t > -0.375);
  CHECK_FALSE(traj.states.empty());
  CHECK(traj.states.back().t > -0.375);
}

TEST_CASE("step throws CuspError near a degenerate map") {
  const FlowState s = make_state(1.0, {cplx(0.0), cplx(0.99995)});
  CHECK_THROWS_AS(step(s, 1e-3), CuspError);
}

TEST_CASE("moments: centered circle") {
  std::vector<cplx> z(128);
  for (int j = 0; j < 128; ++j) z[std::size_t(j)] = std::polar(2.0, kTwoPi * j / 128.0);
  const auto mv = moments(Curve(std::move(z)), 8);
  CHECK(mv.area == doctest::Approx(kPi * 4.0).epsilon(1e-13));
  for (const cplx& m : mv.m) CHECK(std::abs(m) < 1e-13);
}

TEST_CASE("moments: off-center circle matches the residue value") {
  // For |c| < r the conserved first moment is -(1/2i) oint zbar dz / z = -pi conj(c):
  // zbar = conj(c) + r^2/(z-c) on the circle; both poles of dz/(z(z-c)) lie inside.
  const cplx c(0.5, 0.25);
  const double r = 2.0;
  for (int M : {128, 256}) {
    std::vector<cplx> z(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) z[std::size_t(j)] = c + std::polar(r, kTwoPi * j / M);
    const auto mv = moments(Curve(std::move(z)), 1);
    CHECK(std::abs(mv.m[0] - (-kPi * std::conj(c))) < 1e-12);
  }
}

TEST_CASE("complement_moments: area and centroid, quasi-random area oracle") {
  const cplx c(0.5, 0.25);
  const double r = 2.0;
  std::vector<cplx> z(256);
  for (int j = 0; j < 256; ++j) z[std::size_t(j)] = c + std::polar(r, kTwoPi * j / 256.0);
  const auto cm = complement_moments(Curve(std::move(z)), 2);
  CHECK(std::abs(cm[0] - kPi * r * r) < 1e-11);
  // int_disk z dA = area * centroid
  CHECK(std::abs(cm[1] - kPi * r * r * c) < 1e-11);

  // Low-discrepancy (Halton) area integration of int z dA over the disk.
  auto halton = [](int index, int base) {
    double f = 1.0, res = 0.0;
    for (int i = index; i > 0; i /= base) {
      f /= base;
      res += f * double(i % base);
    }
    return res;
  };
  cplx acc = 0.0;
  const int Nmc = 400000;
  int hits = 0;
  for (int i = 1; i <= Nmc; ++i) {
    const double x = c.real() - r + 2.0 * r * halton(i, 2);
    const double y = c.imag() - r + 2.0 * r * halton(i, 3);
    if (std::norm(cplx(x, y) - c) <= r * r) {
      acc += cplx(x, y);
      ++hits;
    }
  }
  const double box = 4.0 * r * r;
  const cplx mc = acc * (box / double(Nmc));
  CHECK(std::abs(mc - cm[1]) / std::abs(cm[1]) < 1e-3);
  (void)hits;
}

TEST_CASE("moments are conserved along the ellipse flow") {
  std::vector<MomentVector> mv;
  const Observer track = [&](const FlowState& s) {
    mv.push_back(moments(sample_boundary(s.map, 256), 8));
  };
  const Observer obs[] = {track};
  const auto traj = evolve(make_state(1.0, {cplx(0.0), cplx(0.5)}), 1.0, 1e-3, obs);
  REQUIRE(traj.events.empty());
  REQUIRE(mv.size() == 1001);
  for (std::size_t i = 0; i < mv.size(); ++i) {
    const double t = traj.states[i].t;
    CHECK(std::abs(mv[i].area - mv[0].area - kTwoPi * t) < 1e-8 * (1.0 + t));
    for (int k = 1; k <= 8; ++k)
      CHECK(std::abs(mv[i].m[std::size_t(k - 1)] - mv[0].m[std::size_t(k - 1)]) <
            1e-7 * (1.0 + std::abs(mv[0].m[std::size_t(k - 1)])));
  }
}

TEST_CASE("harmonic_velocity: defining identity and circle value") {
  const LaurentMap circle(2.0, {cplx(0.0)});
  for (double v : harmonic_velocity(circle, 64))
    CHECK(v == doctest::Approx(0.5).epsilon(1e-14));

  const LaurentMap ell(1.0, {cplx(0.0), cplx(0.4)});
  const auto v = harmonic_velocity(ell, 128);
  const auto zt = boundary_dtheta(ell, 128);
  for (int j = 0; j < 128; ++j) {
    CHECK(v[std::size_t(j)] > 0.0);
    CHECK(v[std::size_t(j)] * std::abs(zt[std::size_t(j)]) == doctest::Approx(1.0).epsilon(1e-14));
  }
  CHECK_THROWS_AS(harmonic_velocity(LaurentMap(1.0, {cplx(0.0), cplx(0.999999)}), 128),
                  CuspError);
}

TEST_CASE("WeightField validation") {
  CHECK_THROWS_AS(WeightField({1.0, 0.0, 1.0}), UsageError);
  CHECK_THROWS_AS(WeightField({1.0, -0.5}), UsageError);
  CHECK_THROWS_AS(WeightField({}), UsageError);
  CHECK_NOTHROW(WeightField({0.5, 2.0}));
}

TEST_CASE("weighted_step: chi = 1 pushes a circle exactly to radius b + dt/b") {
  const double b = 1.5, dt = 1e-3;
  const LaurentMap map(b, {cplx(0.0)});
  const Curve curve = sample_boundary(map, 128);
  const Curve pushed = weighted_step(curve, map, WeightField(std::vector<double>(128, 1.0)), dt);
  for (int j = 0; j < 128; ++j)
    CHECK(std::abs(pushed.z[std::size_t(j)] -
                   std::polar(b + dt / b, kTwoPi * j / 128.0)) < 1e-14);
}

TEST_CASE("weighted_step: nonconstant chi leaves a positive degree-1 defect") {
  const LaurentMap map(1.0, {cplx(0.0)});
  const int M = 128;
  const Curve curve = sample_boundary(map, M);

  // chi = 1 + 0.5 cos(theta): the first-order deformation is a pure
  // translation that the degree-1 fit absorbs, so the defect is positive
  // but of second order.
  std::vector<double> chi1(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j) chi1[std::size_t(j)] = 1.0 + 0.5 * std::cos(kTwoPi * j / M);
  auto defect1 = [&](double dt) {
    return defect(weighted_step(curve, map, WeightField(chi1), dt), 1);
  };
  const double t1 = defect1(2e-3), t2 = defect1(1e-3);
  CHECK(t1 > 1e-9);
  CHECK(t1 / t2 == doctest::Approx(4.0).epsilon(0.1));  // translation mode: O(dt^2)

  // chi = 1 + 0.5 cos(2 theta) deforms at first order with no degree-1
  // lemniscate absorbing it: the defect scales as O(dt).
  std::vector<double> chi2(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j)
    chi2[std::size_t(j)] = 1.0 + 0.5 * std::cos(2.0 * kTwoPi * j / M);
  auto defect2 = [&](double dt) {
    return defect(weighted_step(curve, map, WeightField(chi2), dt), 1);
  };
  const double s1 = defect2(2e-3), s2 = defect2(1e-3);
  CHECK(s1 > 1e-5);
  CHECK(s1 / s2 == doctest::Approx(2.0).epsilon(0.05));  // O(dt)
}

TEST_CASE("weighted_step: chi = 1 tracks one Euler map step to O(dt^2)") {
  const LaurentMap map(1.0, {cplx(0.0), cplx(0.4)});
  const int M = 256;
  const Curve curve = sample_boundary(map, M);
  const auto vel = coefficient_velocities(map);
  const WeightField one(std::vector<double>(M, 1.0));

  // Distance from a point to the polyline through the dense samples.
  auto dist_to_polyline = [](cplx p, const std::vector<cplx>& poly) {
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < poly.size(); ++i) {
      const cplx a = poly[i];
      const cplx b = poly[(i + 1) % poly.size()];
      const cplx ab = b - a;
      const double t =
          std::clamp(((p - a) * std::conj(ab)).real() / std::norm(ab), 0.0, 1.0);
      best = std::min(best, std::abs(p - (a + t * ab)));
    }
    return best;
  };
  auto hausdorff_to_euler = [&](double dt) {
    const Curve pushed = weighted_step(curve, map, one, dt);
    LaurentMap euler(map.b + dt * vel.b_dot, map.a);
    for (int k = 0; k <= euler.order(); ++k)
      euler.a[std::size_t(k)] += dt * vel.a_dot[std::size_t(k)];
    const Curve dense = sample_boundary(euler, 4096);
    double sup = 0.0;
    for (const cplx& p : pushed.z) sup = std::max(sup, dist_to_polyline(p, dense.z));
    return sup;
  };
  const double h1 = hausdorff_to_euler(1e-2), h2 = hausdorff_to_euler(5e-3);
  CHECK(h1 < 1e-3);
  CHECK(h1 / h2 > 2.5);  // second order in dt
  CHECK(h1 / h2 < 6.5);
}

TEST_CASE("weighted_step rejects self-intersecting pushes") {
  // A pinched-dumbbell boundary pushed inward hard enough crosses itself.
  const LaurentMap map(1.0, {cplx(0.0), cplx(0.0), cplx(0.0), cplx(0.23)});
  const int M = 256;
  const Curve curve = sample_boundary(map, M);
  const WeightField big(std::vector<double>(M, 60.0));
  CHECK_THROWS_AS(weighted_step(curve, map, big, -1.0), Error);
}
