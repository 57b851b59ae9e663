#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lemlab/fit.hpp"
#include "lemlab/io.hpp"

using namespace lemlab;

namespace {

Curve circle_curve(cplx center, double radius, int M) {
  std::vector<cplx> z(static_cast<std::size_t>(M));
  for (int j = 0; j < M; ++j)
    z[std::size_t(j)] = center + std::polar(radius, kTwoPi * j / double(M));
  return Curve(std::move(z));
}

}  // namespace

TEST_CASE("level_residual: exact trace, constant offset, mean-zero interior node") {
  const LemPoly bern(1.0, {cplx(0.8), cplx(-0.8)});
  const Curve trace = trace_lemniscate(bern, 256);
  CHECK(level_residual(bern, trace).sup < 1e-12);

  // |z/2| = 1/2 on the unit circle: residual is the constant log(1/2).
  const LemPoly half(0.5, {cplx(0.0)});
  const Curve unit = circle_curve(cplx(0.0), 1.0, 128);
  for (double r : level_residual(half, unit).samples)
    CHECK(r == doctest::Approx(std::log(0.5)).epsilon(1e-14));

  // P = z - 0.5 on the unit circle: mean of log|e^{i theta} - 0.5| vanishes
  // (mean-value property of log|z - c| for |c| < 1); signs must vary.
  const LemPoly shifted(1.0, {cplx(0.5)});
  const auto rep = level_residual(shifted, unit);
  double mean = 0.0;
  bool pos = false, neg = false;
  for (double r : rep.samples) {
    mean += r;
    pos = pos || r > 0.0;
    neg = neg || r < 0.0;
  }
  mean /= double(rep.samples.size());
  CHECK(std::abs(mean) < 1e-12);
  CHECK(pos);
  CHECK(neg);
}

TEST_CASE("level_residual: node on the curve marks an infinite residual") {
  Curve unit = circle_curve(cplx(0.0), 1.0, 64);
  const LemPoly touching(1.0, {unit.z[0]});
  const auto rep = level_residual(touching, unit);
  CHECK(std::isinf(rep.sup));
}

TEST_CASE("fit: circle at degree 1 recovers center and scale") {
  const cplx c(0.3, -0.2);
  const double r = 1.4;
  const auto rep = fit(circle_curve(c, r, 64), 1);
  REQUIRE(rep.best.has_value());
  CHECK(rep.converged);
  CHECK(rep.defect < 1e-12);
  CHECK(std::abs(rep.best->nodes()[0] - c) < 1e-10);
  CHECK(rep.best->scale() == doctest::Approx(1.0 / r).epsilon(1e-10));
}

TEST_CASE("fit: traced Bernoulli self-fit from the default init") {
  const LemPoly bern(1.0, {cplx(0.8), cplx(-0.8)});
  const Curve curve = trace_lemniscate(bern, 256);
  const auto rep = fit(curve, 2);
  REQUIRE(rep.best.has_value());
  CHECK(rep.defect < 1e-10);
  CHECK(std::abs(rep.best->nodes()[0] - cplx(-0.8)) < 1e-8);
  CHECK(std::abs(rep.best->nodes()[1] - cplx(0.8)) < 1e-8);
  CHECK(rep.best->scale() == doctest::Approx(1.0).epsilon(1e-8));

  // Under-parametrized fit must leave a strictly positive defect.
  const auto rep1 = defect_report(curve, 1);
  CHECK(rep1.defect > 1e-3);
}

TEST_CASE("defect: circles are degree-n lemniscates for every n (confluent fallback)") {
  const Curve curve = circle_curve(cplx(0.2, 0.1), 1.3, 128);
  for (int n : {1, 2, 3, 5}) {
    const auto rep = defect_report(curve, n);
    REQUIRE(rep.best.has_value());
    CHECK(rep.defect < 1e-10);
    if (n >= 2) {
      CHECK(rep.best->nodes().size() == 1);
      CHECK(rep.best->mults()[0] == n);
      CHECK(std::abs(rep.best->nodes()[0] - cplx(0.2, 0.1)) < 1e-8);
    }
  }
}

TEST_CASE("fit idempotence: refitting the trace of the fit is stable") {
  const LemPoly bern(1.0, {cplx(0.8), cplx(-0.8)});
  const auto rep = fit(trace_lemniscate(bern, 256), 2);
  REQUIRE(rep.best.has_value());
  const Curve again = trace_lemniscate(*rep.best, 256);
  const auto rep2 = fit(again, 2, rep.best);
  CHECK(std::abs(rep2.defect - rep.defect) < 1e-12);
}

TEST_CASE("defect equivariance under scaling and rotation") {
  const LemPoly bern(1.0, {cplx(0.8), cplx(-0.8)});
  const Curve curve = trace_lemniscate(bern, 256);
  const auto base = defect_report(curve, 2);

  const double s = 1.7;
  Curve scaled = curve;
  for (auto& z : scaled.z) z *= s;
  const auto srep = defect_report(scaled, 2);
  CHECK(std::abs(srep.defect - base.defect) < 1e-12);
  REQUIRE(srep.best.has_value());
  CHECK(std::abs(srep.best->nodes()[1] - s * base.best->nodes()[1]) < 1e-7);
  CHECK(srep.best->scale() ==
        doctest::Approx(base.best->scale() * std::pow(s, -2.0)).epsilon(1e-7));

  const cplx rot = std::polar(1.0, 0.7);
  Curve rotated = curve;
  for (auto& z : rotated.z) z *= rot;
  const auto rrep = defect_report(rotated, 2);
  CHECK(std::abs(rrep.defect - base.defect) < 1e-12);
}

TEST_CASE("defect stability under sample refinement") {
  // A smooth non-lemniscate curve: the pushed circle with nonconstant weight.
  const LaurentMap map(1.0, {cplx(0.0)});
  auto pushed_at = [&](int M) {
    const Curve c = sample_boundary(map, M);
    std::vector<double> chi(static_cast<std::size_t>(M));
    for (int j = 0; j < M; ++j) chi[std::size_t(j)] = 1.0 + 0.5 * std::cos(kTwoPi * j / M);
    return weighted_step(c, map, WeightField(chi), 5e-3);
  };
  const double dM = defect(pushed_at(256), 1);
  const double d2M = defect(pushed_at(512), 1);
  CHECK(dM > 1e-6);
  CHECK(std::abs(dM - d2M) < 1e-8);
}

TEST_CASE("fit is deterministic and reports are serializable") {
  const Curve curve = circle_curve(cplx(0.1, 0.0), 1.0, 64);
  const auto r1 = defect_report(curve, 2, 8, 42);
  const auto r2 = defect_report(curve, 2, 8, 42);
  CHECK(io::defect_report_json(r1) == io::defect_report_json(r2));
  CHECK(r1.seed == 42);
  const std::string json = io::defect_report_json(r1);
  CHECK(json.find("\"n\": 2") != std::string::npos);
  CHECK(json.find("\"nodes\"") != std::string::npos);
  CHECK(json.find("\"mult\"") != std::string::npos);
  CHECK(json.find("\"seed\": 42") != std::string::npos);
}

TEST_CASE("fit preconditions") {
  const Curve curve = circle_curve(cplx(0.0), 1.0, 16);
  CHECK_THROWS_AS((void)fit(curve, 0), UsageError);
  CHECK_THROWS_AS((void)fit(curve, 3), UsageError);  // M < 8n
  CHECK_THROWS_AS((void)defect_report(curve, 0), UsageError);
}
