#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "lemlab/io.hpp"
#include "lemlab/scenario.hpp"

using namespace lemlab;

TEST_CASE("canonical scenario parses") {
  const auto cfg = parse_scenario(canonical_scenario_text());
  CHECK(std::holds_alternative<LemniscateInit>(cfg.initial));
  const auto& l = std::get<LemniscateInit>(cfg.initial);
  CHECK(l.nodes.size() == 2);
  CHECK(cfg.T == 0.1);
  CHECK(cfg.dt == 1e-3);
  CHECK(cfg.M == 256);
  CHECK(cfg.fit_degree == 2);
  CHECK(cfg.effective_fit_degree() == 2);
  CHECK(cfg.sweep_rho.size() == 3);
  CHECK(cfg.sweep_n.size() == 2);
  const LaurentMap map = initial_map(cfg);
  CHECK(map.b == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("config validation errors name the field") {
  auto expect_error = [](const std::string& text, const std::string& needle) {
    try {
      (void)parse_scenario(text);
      FAIL("expected UsageError for: ", text);
    } catch (const UsageError& e) {
      const std::string what = e.what();
      INFO(what);
      CHECK(what.find(needle) != std::string::npos);
    }
  };
  expect_error("initial.circle.b0 = 1\nrun.dt = 0\n", "run.dt");
  expect_error("initial.circle.b0 = 1\nbogus.key = 3\n", "bogus.key");
  expect_error("initial.circle.b0 = 1\ngrid.M = 100\n", "grid.M");
  expect_error("run.T = 1\n", "initial.");
  expect_error("initial.circle.b0 = 1\ninitial.ellipse.a0 = 0.5\n", "initial.");
  expect_error("initial.circle.b0 = 1\ntol.cusp = -1\n", "tol.cusp");
  expect_error("initial.circle.b0 = 1\ntol.tail = 0\n", "tol.tail");
  expect_error("initial.circle.b0 = -2\n", "initial.circle.b0");
  expect_error("initial.lemniscate.a = 1\n", "initial.lemniscate.nodes");
  expect_error("initial.circle.b0 = 1\ninitial.circle.b0 = 2\n", "duplicate");
  expect_error("initial.circle.b0 = 1\nfit.degree = 0\n", "fit.degree");
  expect_error("initial.circle.b0 = one\n", "initial.circle.b0");
}

TEST_CASE("initial maps from each variant") {
  {
    const auto cfg = parse_scenario("initial.circle.b0 = 2\ninitial.circle.center = 1 1\n");
    const auto map = initial_map(cfg);
    CHECK(map.b == 2.0);
    CHECK(map.a[0] == cplx(1.0, 1.0));
  }
  {
    const auto cfg = parse_scenario("initial.ellipse.b0 = 1\ninitial.ellipse.a0 = 0.5\n");
    const auto map = initial_map(cfg);
    CHECK(map.b == 1.0);
    CHECK(map.a[1] == cplx(0.5));
  }
  {
    const auto cfg = parse_scenario(
        "initial.coefficients.b = 1.5\ninitial.coefficients.a = 0.1 0.0, 0.2 -0.1\n");
    const auto map = initial_map(cfg);
    CHECK(map.b == 1.5);
    CHECK(map.a[1] == cplx(0.2, -0.1));
  }
  {
    const auto cfg = parse_scenario(
        "initial.lemniscate.a = 1\ninitial.lemniscate.nodes = 0.1 0\n"
        "initial.lemniscate.mults = 2\ngrid.M = 128\n");
    const auto map = initial_map(cfg);
    CHECK(map.b == doctest::Approx(1.0).epsilon(1e-10));
    CHECK(std::abs(map.a[0] - cplx(0.1)) < 1e-10);
  }
}

TEST_CASE("events and trajectory serialization") {
  std::vector<Event> events = {{Event::Type::cusp, 0.25, 3e-5}};
  const std::string json = io::events_json(events);
  CHECK(json.find("\"type\": \"cusp\"") != std::string::npos);
  CHECK(json.find("\"t\": 0.25") != std::string::npos);
  CHECK(io::events_json({}).find("[]") != std::string::npos);

  FlowState s;
  s.map = LaurentMap(1.0, {cplx(0.5, -0.5)});
  s.cusp_margin = 0.9;
  MomentVector mv;
  mv.area = 3.0;
  mv.m = {cplx(1.0, 2.0)};
  const std::string csv = io::trajectory_csv({s}, {mv}, 1, 1);
  CHECK(csv.rfind("t,b,re_a0,im_a0,re_a1,im_a1,area,re_m1,im_m1,cusp_margin\n", 0) == 0);
  CHECK(csv.find("0,1,0.5,-0.5,0,0,3,1,2,0.9") != std::string::npos);
}

TEST_CASE("SVG emitter produces polylines in a sane viewport") {
  const Curve c = sample_boundary(LaurentMap(1.0, {cplx(0.0)}), 32);
  const std::string svg = io::boundary_family_svg({c, c});
  CHECK(svg.find("<svg") != std::string::npos);
  CHECK(svg.find("polyline") != std::string::npos);
  CHECK(svg.find("stroke-opacity=\"0.25\"") != std::string::npos);
  CHECK(svg.find("stroke-opacity=\"1\"") != std::string::npos);
}
