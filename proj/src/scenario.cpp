#include "lemlab/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <sstream>

#include "lemlab/io.hpp"

namespace lemlab {

namespace {

std::vector<std::string> tokens_of(const std::string& value) {
  std::string norm = value;
  std::replace(norm.begin(), norm.end(), ',', ' ');
  std::istringstream in(norm);
  std::vector<std::string> toks;
  std::string t;
  while (in >> t) toks.push_back(t);
  return toks;
}

double parse_double(const std::string& key, const std::string& tok) {
  std::size_t pos = 0;
  double v = 0.0;
  try {
    v = std::stod(tok, &pos);
  } catch (const std::exception&) {
    throw UsageError("config: " + key + ": not a number: " + tok);
  }
  if (pos != tok.size()) throw UsageError("config: " + key + ": not a number: " + tok);
  return v;
}

long parse_int(const std::string& key, const std::string& tok) {
  const double v = parse_double(key, tok);
  const long n = std::lround(v);
  if (double(n) != v) throw UsageError("config: " + key + ": not an integer: " + tok);
  return n;
}

struct RawConfig {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) > 0; }
  bool has_prefix(const std::string& prefix) const {
    for (const auto& [k, v] : kv)
      if (k.rfind(prefix, 0) == 0) return true;
    return false;
  }
  std::vector<std::string> toks(const std::string& key) const { return tokens_of(kv.at(key)); }

  double num(const std::string& key, double fallback) const {
    if (!has(key)) return fallback;
    const auto t = toks(key);
    if (t.size() != 1) throw UsageError("config: " + key + ": expected one number");
    return parse_double(key, t[0]);
  }
  long integer(const std::string& key, long fallback) const {
    if (!has(key)) return fallback;
    const auto t = toks(key);
    if (t.size() != 1) throw UsageError("config: " + key + ": expected one integer");
    return parse_int(key, t[0]);
  }
  cplx complex_pair(const std::string& key, cplx fallback) const {
    if (!has(key)) return fallback;
    const auto t = toks(key);
    if (t.size() != 2) throw UsageError("config: " + key + ": expected `re im`");
    return {parse_double(key, t[0]), parse_double(key, t[1])};
  }
  std::vector<cplx> complex_list(const std::string& key) const {
    const auto t = toks(key);
    if (t.empty() || t.size() % 2 != 0)
      throw UsageError("config: " + key + ": expected `re im` pairs");
    std::vector<cplx> v;
    for (std::size_t i = 0; i < t.size(); i += 2)
      v.emplace_back(parse_double(key, t[i]), parse_double(key, t[i + 1]));
    return v;
  }
};

const std::vector<std::string> kKnownKeys = {
    "initial.circle.b0",      "initial.circle.center",   "initial.ellipse.b0",
    "initial.ellipse.a0",     "initial.lemniscate.a",    "initial.lemniscate.nodes",
    "initial.lemniscate.mults", "initial.coefficients.b", "initial.coefficients.a",
    "run.T",                  "run.dt",                  "grid.N",
    "grid.M",                 "grid.K",                  "fit.degree",
    "fit.restarts",           "fit.seed",                "tol.tail",
    "tol.cusp",               "out.dir",                 "out.svg_stride",
    "sweep.rho",              "sweep.n",
};

}  // namespace

ScenarioConfig parse_scenario(const std::string& text) {
  RawConfig raw;
  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw UsageError("config: line " + std::to_string(lineno) + ": expected `key = value`");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string() : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key.empty() || value.empty())
      throw UsageError("config: line " + std::to_string(lineno) + ": empty key or value");
    if (std::find(kKnownKeys.begin(), kKnownKeys.end(), key) == kKnownKeys.end())
      throw UsageError("config: unknown key: " + key);
    if (raw.kv.count(key)) throw UsageError("config: duplicate key: " + key);
    raw.kv[key] = value;
  }

  ScenarioConfig cfg;

  int variants = 0;
  if (raw.has_prefix("initial.circle.")) ++variants;
  if (raw.has_prefix("initial.ellipse.")) ++variants;
  if (raw.has_prefix("initial.lemniscate.")) ++variants;
  if (raw.has_prefix("initial.coefficients.")) ++variants;
  if (variants != 1)
    throw UsageError("config: exactly one initial.* variant must be present (found " +
                     std::to_string(variants) + ")");

  if (raw.has_prefix("initial.circle.")) {
    CircleInit c;
    c.b0 = raw.num("initial.circle.b0", 1.0);
    c.center = raw.complex_pair("initial.circle.center", cplx(0.0));
    if (!(c.b0 > 0.0)) throw UsageError("config: initial.circle.b0 must be positive");
    cfg.initial = c;
  } else if (raw.has_prefix("initial.ellipse.")) {
    EllipseInit e;
    e.b0 = raw.num("initial.ellipse.b0", 1.0);
    e.a0 = raw.num("initial.ellipse.a0", 0.0);
    if (!(e.b0 > 0.0)) throw UsageError("config: initial.ellipse.b0 must be positive");
    cfg.initial = e;
  } else if (raw.has_prefix("initial.lemniscate.")) {
    LemniscateInit l;
    l.a = raw.num("initial.lemniscate.a", 1.0);
    if (!raw.has("initial.lemniscate.nodes"))
      throw UsageError("config: initial.lemniscate.nodes is required");
    l.nodes = raw.complex_list("initial.lemniscate.nodes");
    if (raw.has("initial.lemniscate.mults")) {
      for (const auto& t : raw.toks("initial.lemniscate.mults"))
        l.mults.push_back(int(parse_int("initial.lemniscate.mults", t)));
      if (l.mults.size() != l.nodes.size())
        throw UsageError("config: initial.lemniscate.mults length mismatch");
    }
    if (!(l.a > 0.0)) throw UsageError("config: initial.lemniscate.a must be positive");
    cfg.initial = l;
  } else {
    CoefficientsInit c;
    c.b = raw.num("initial.coefficients.b", 1.0);
    if (!raw.has("initial.coefficients.a"))
      throw UsageError("config: initial.coefficients.a is required");
    c.a = raw.complex_list("initial.coefficients.a");
    if (!(c.b > 0.0)) throw UsageError("config: initial.coefficients.b must be positive");
    cfg.initial = c;
  }

  cfg.T = raw.num("run.T", cfg.T);
  cfg.dt = raw.num("run.dt", cfg.dt);
  if (cfg.dt == 0.0) throw UsageError("config: run.dt must be nonzero");
  cfg.N = int(raw.integer("grid.N", cfg.N));
  cfg.M = int(raw.integer("grid.M", cfg.M));
  cfg.K = int(raw.integer("grid.K", cfg.K));
  if (!is_power_of_two(cfg.M)) throw UsageError("config: grid.M must be a power of two");
  if (cfg.N < 0 || cfg.K < 0) throw UsageError("config: grid.N and grid.K must be >= 0");
  cfg.fit_degree = int(raw.integer("fit.degree", cfg.fit_degree));
  if (raw.has("fit.degree") && cfg.fit_degree < 1)
    throw UsageError("config: fit.degree must be >= 1");
  cfg.fit_restarts = int(raw.integer("fit.restarts", cfg.fit_restarts));
  if (cfg.fit_restarts < 0) throw UsageError("config: fit.restarts must be >= 0");
  cfg.fit_seed = std::uint64_t(raw.integer("fit.seed", long(cfg.fit_seed)));
  cfg.tol_tail = raw.num("tol.tail", cfg.tol_tail);
  cfg.tol_cusp = raw.num("tol.cusp", cfg.tol_cusp);
  if (!(cfg.tol_tail > 0.0)) throw UsageError("config: tol.tail must be positive");
  if (!(cfg.tol_cusp > 0.0)) throw UsageError("config: tol.cusp must be positive");
  if (raw.has("out.dir")) cfg.out_dir = raw.kv.at("out.dir");
  cfg.svg_stride = int(raw.integer("out.svg_stride", cfg.svg_stride));
  if (cfg.svg_stride < 0) throw UsageError("config: out.svg_stride must be >= 0");

  if (raw.has("sweep.rho"))
    for (const auto& t : raw.toks("sweep.rho"))
      cfg.sweep_rho.push_back(parse_double("sweep.rho", t));
  if (raw.has("sweep.n"))
    for (const auto& t : raw.toks("sweep.n")) {
      const long n = parse_int("sweep.n", t);
      if (n < 1) throw UsageError("config: sweep.n entries must be >= 1");
      cfg.sweep_n.push_back(int(n));
    }
  for (double r : cfg.sweep_rho)
    if (r < 0.0) throw UsageError("config: sweep.rho entries must be >= 0");

  return cfg;
}

ScenarioConfig load_scenario(const std::string& path) {
  return parse_scenario(io::read_file(path));
}

int ScenarioConfig::effective_fit_degree() const {
  if (fit_degree >= 1) return fit_degree;
  if (const auto* l = std::get_if<LemniscateInit>(&initial)) {
    int deg = 0;
    for (std::size_t i = 0; i < l->nodes.size(); ++i)
      deg += l->mults.empty() ? 1 : l->mults[i];
    return deg;
  }
  return 1;
}

LaurentMap initial_map(const ScenarioConfig& cfg) {
  if (const auto* c = std::get_if<CircleInit>(&cfg.initial))
    return LaurentMap(c->b0, {c->center});
  if (const auto* e = std::get_if<EllipseInit>(&cfg.initial))
    return LaurentMap(e->b0, {cplx(0.0), cplx(e->a0)});
  if (const auto* l = std::get_if<LemniscateInit>(&cfg.initial)) {
    const LemPoly p(l->a, l->nodes,
                    l->mults.empty() ? std::vector<int>(l->nodes.size(), 1) : l->mults);
    MapFitOptions opt;
    opt.max_order = cfg.M / 4 - 1;
    opt.tail_threshold = cfg.tol_tail;
    return fit_map_from_curve(trace_lemniscate(p, cfg.M), opt).map;
  }
  const auto& c = std::get<CoefficientsInit>(cfg.initial);
  return LaurentMap(c.b, c.a);
}

std::string canonical_scenario_text() {
  return R"(# lemlab scenario: Bernoulli-style lemniscate destruction run
# exactly one initial.* group may be present

initial.lemniscate.a = 1.0
initial.lemniscate.nodes = 0.8 0.0, -0.8 0.0
initial.lemniscate.mults = 1, 1

run.T = 0.1
run.dt = 0.001

grid.N = 16        # coefficient cap
grid.M = 256       # boundary samples, power of two
grid.K = 8         # tracked moments

fit.degree = 2
fit.restarts = 8
fit.seed = 12345

tol.tail = 1e-13
tol.cusp = 1e-4

out.dir = out
out.svg_stride = 10

# sweep axes (used by `lemlab sweep`): star lemniscates z^n - rho^n
sweep.rho = 0.2, 0.5, 0.8
sweep.n = 2, 3
)";
}

}  // namespace lemlab
