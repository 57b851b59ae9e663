#include "lemlab/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace lemlab::io {

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string curve_csv(const Curve& curve) {
  std::string out = "theta,re_z,im_z\n";
  for (int j = 0; j < curve.size(); ++j) {
    out += fmt17(curve.theta(j));
    out += ',';
    out += fmt17(curve.z[std::size_t(j)].real());
    out += ',';
    out += fmt17(curve.z[std::size_t(j)].imag());
    out += '\n';
  }
  return out;
}

Curve curve_from_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("theta,re_z,im_z", 0) != 0)
    throw UsageError("curve CSV: missing `theta,re_z,im_z` header");
  std::vector<cplx> z;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    double th, re, im;
    if (std::sscanf(line.c_str(), "%lf,%lf,%lf", &th, &re, &im) != 3)
      throw UsageError("curve CSV: malformed row: " + line);
    z.emplace_back(re, im);
  }
  if (z.empty()) throw UsageError("curve CSV: no samples");
  return Curve(std::move(z));
}

std::string trajectory_csv(const std::vector<FlowState>& states,
                           const std::vector<MomentVector>& moments, int N, int K) {
  std::string out = "t,b";
  for (int k = 0; k <= N; ++k) {
    out += ",re_a" + std::to_string(k);
    out += ",im_a" + std::to_string(k);
  }
  out += ",area";
  for (int k = 1; k <= K; ++k) {
    out += ",re_m" + std::to_string(k);
    out += ",im_m" + std::to_string(k);
  }
  out += ",cusp_margin\n";

  for (std::size_t i = 0; i < states.size(); ++i) {
    const FlowState& s = states[i];
    out += fmt17(s.t);
    out += ',';
    out += fmt17(s.map.b);
    for (int k = 0; k <= N; ++k) {
      const cplx a = k <= s.map.order() ? s.map.a[std::size_t(k)] : cplx(0.0);
      out += ',';
      out += fmt17(a.real());
      out += ',';
      out += fmt17(a.imag());
    }
    const MomentVector& mv = moments[i];
    out += ',';
    out += fmt17(mv.area);
    for (int k = 1; k <= K; ++k) {
      const cplx m = k <= int(mv.m.size()) ? mv.m[std::size_t(k - 1)] : cplx(0.0);
      out += ',';
      out += fmt17(m.real());
      out += ',';
      out += fmt17(m.imag());
    }
    out += ',';
    out += fmt17(s.cusp_margin);
    out += '\n';
  }
  return out;
}

std::string events_json(const std::vector<Event>& events) {
  nlohmann::json arr = nlohmann::json::array();
  for (const Event& e : events) {
    arr.push_back({{"type", e.type == Event::Type::cusp ? "cusp" : "blowup"},
                   {"t", e.t},
                   {"margin", e.margin}});
  }
  return arr.dump(2) + "\n";
}

std::string defect_report_json(const DefectReport& rep) {
  nlohmann::json j;
  j["n"] = rep.n;
  if (rep.best) {
    j["a"] = rep.best->scale();
    nlohmann::json nodes = nlohmann::json::array();
    for (std::size_t i = 0; i < rep.best->nodes().size(); ++i)
      nodes.push_back({{"re", rep.best->nodes()[i].real()},
                       {"im", rep.best->nodes()[i].imag()},
                       {"mult", rep.best->mults()[i]}});
    j["nodes"] = nodes;
  } else {
    j["a"] = nullptr;
    j["nodes"] = nlohmann::json::array();
  }
  j["defect"] = rep.defect;
  j["sup_defect"] = rep.sup_defect;
  j["converged"] = rep.converged;
  j["iterations"] = rep.iterations;
  j["seed"] = rep.seed;
  return j.dump(2) + "\n";
}

std::string checks_json(const std::vector<CheckResult>& checks) {
  nlohmann::json arr = nlohmann::json::array();
  for (const CheckResult& c : checks)
    arr.push_back({{"check", c.check},
                   {"inputs", c.inputs},
                   {"residual", c.residual},
                   {"threshold", c.threshold},
                   {"pass", c.pass}});
  return arr.dump(2) + "\n";
}

std::string boundary_family_svg(const std::vector<Curve>& snapshots) {
  double lo_x = 0.0, hi_x = 1.0, lo_y = 0.0, hi_y = 1.0;
  bool first = true;
  for (const Curve& c : snapshots) {
    for (const cplx& z : c.z) {
      if (first) {
        lo_x = hi_x = z.real();
        lo_y = hi_y = z.imag();
        first = false;
      }
      lo_x = std::min(lo_x, z.real());
      hi_x = std::max(hi_x, z.real());
      lo_y = std::min(lo_y, z.imag());
      hi_y = std::max(hi_y, z.imag());
    }
  }
  const double pad = 0.05 * std::max(hi_x - lo_x, hi_y - lo_y) + 1e-9;
  lo_x -= pad;
  hi_x += pad;
  lo_y -= pad;
  hi_y += pad;

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"800\" height=\"800\" viewBox=\""
      << lo_x << " " << -hi_y << " " << (hi_x - lo_x) << " " << (hi_y - lo_y) << "\">\n";
  for (std::size_t i = 0; i < snapshots.size(); ++i) {
    const double opacity =
        snapshots.size() > 1 ? 0.25 + 0.75 * double(i) / double(snapshots.size() - 1) : 1.0;
    svg << "  <polyline fill=\"none\" stroke=\"black\" stroke-width=\""
        << 0.004 * (hi_x - lo_x) << "\" stroke-opacity=\"" << opacity << "\" points=\"";
    const Curve& c = snapshots[i];
    for (int j = 0; j <= c.size(); ++j) {
      const cplx z = c.z[std::size_t(j % c.size())];
      svg << z.real() << "," << -z.imag() << " ";  // SVG y axis points down
    }
    svg << "\"/>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw UsageError("cannot open for writing: " + path);
  out << content;
  if (!out) throw UsageError("write failed: " + path);
}

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw UsageError("cannot open: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace lemlab::io
