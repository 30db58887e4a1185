// holgeo: trace, classify, probe and coercivity from the command line.

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "holgeo/io.hpp"

using namespace holgeo;

namespace {

struct Args {
  std::string config, start, velocity, z0, path, at, synthetic, grid_rings;
  std::string out, csv, svg;
  double tol = 1e-10;
  int tuples = 32;
  std::uint64_t seed = 0;
  int budget = 4;
  bool family = false;
};

json parse_flag(const std::string& text, const std::string& what) {
  std::string body = text;
  if (!body.empty() && body[0] == '@') return load_json_file(body.substr(1));
  try {
    return json::parse(body);
  } catch (const json::parse_error&) {
    throw ConfigError("cannot parse " + what + ": " + text);
  }
}

// Flag value if given, else the config key, else nullopt.
std::optional<json> pick(const std::string& flag, const json& cfg, const char* key) {
  if (!flag.empty()) return parse_flag(flag, std::string("--") + key);
  if (cfg.is_object() && cfg.contains(key)) return cfg.at(key);
  return std::nullopt;
}

void write_text(const std::string& path, const std::string& text) {
  if (path.empty() || path == "-") {
    std::cout << text;
    return;
  }
  std::ofstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + path);
  f << text;
}

void write_json(const Args& a, const json& j) { write_text(a.out, j.dump(2) + "\n"); }

struct Setup {
  json cfg;
  std::optional<WarpedMetric> metric;
  std::optional<SyntheticProblem> synthetic;
};

Setup load(const Args& a, bool allow_synthetic) {
  Setup s;
  if (!a.synthetic.empty()) {
    if (!allow_synthetic) throw ConfigError("--synthetic is not available for this command");
    s.synthetic = synthetic_problem(a.synthetic);
    return s;
  }
  if (a.config.empty()) throw ConfigError("--config is required");
  s.cfg = load_json_file(a.config);
  s.metric = metric_from_json(s.cfg.contains("metric") ? s.cfg.at("metric") : s.cfg);
  return s;
}

cplx start_parameter(const Args& a, const json& cfg) {
  const auto z = pick(a.z0, cfg, "z0");
  return z ? complex_from_json(*z) : cplx(0);
}

GeodesicState geodesic_start(const Args& a, const Setup& s) {
  GeodesicState g;
  g.z = start_parameter(a, s.cfg);
  const auto u = pick(a.start, s.cfg, "start");
  const auto v = pick(a.velocity, s.cfg, "velocity");
  if (!u || !v) throw ConfigError("--start and --velocity are required");
  g.u = point_from_json(*u);
  g.v = point_from_json(*v);
  const auto n = static_cast<Eigen::Index>(s.metric->dim());
  if (g.u.size() != n || g.v.size() != n) throw ConfigError("start and velocity need one entry per factor");
  try {
    s.metric->check_domain(g.u);
  } catch (const DomainViolation& e) {
    throw ConfigError(e.what());
  }
  if (!s.metric->is_ordinary(g.u)) throw ConfigError("start point is not metrically ordinary");
  return g;
}

std::optional<PlanePath> path_arg(const Args& a, const json& cfg, cplx start) {
  const auto p = pick(a.path, cfg, "path");
  if (!p) return std::nullopt;
  return path_from_json(*p, start);
}

int cmd_trace(const Args& a) {
  const Setup s = load(a, true);
  if (s.synthetic) {
    const auto path = path_arg(a, s.cfg, s.synthetic->z0);
    if (!path) throw ConfigError("--path is required");
    const auto rec = continue_along(s.synthetic->system, initial_state(*s.synthetic), *path, a.tol);
    write_json(a, to_json(rec));
    if (!a.csv.empty()) write_text(a.csv, record_csv(rec));
    return rec.status.ok() ? 0 : 2;
  }
  const GeodesicState g = geodesic_start(a, s);
  const auto path = path_arg(a, s.cfg, g.z);
  if (!path) throw ConfigError("--path is required");
  const GeodesicSystem sys(*s.metric);
  validate_tolerance(a.tol);
  const auto rec = continue_along(*s.metric, g, *path, a.tol);
  write_json(a, to_json(rec, sys));
  if (!a.csv.empty()) write_text(a.csv, record_csv(rec, sys));
  return rec.status.ok() ? 0 : 2;
}

int cmd_classify(const Args& a) {
  const Setup s = load(a, true);
  std::optional<cplx> at;
  if (auto j = pick(a.at, s.cfg, "at")) at = complex_from_json(*j);
  if (s.synthetic) {
    const auto start = initial_state(*s.synthetic);
    if (!at) {
      if (const auto path = path_arg(a, s.cfg, start.z)) {
        const auto rec = continue_along(s.synthetic->system, start, *path, a.tol, false);
        at = rec.status.ok() ? path->end() : rec.status.z;
      } else {
        at = s.synthetic->singular;
      }
    }
    write_json(a, to_json(classify_singularity(s.synthetic->system, start, *at, a.tol)));
    return 0;
  }
  const GeodesicState g = geodesic_start(a, s);
  if (!at) {
    const auto path = path_arg(a, s.cfg, g.z);
    if (!path) throw ConfigError("--at or --path is required");
    const auto rec = continue_along(*s.metric, g, *path, a.tol);
    at = rec.status.ok() ? path->end() : rec.status.z;
  }
  write_json(a, to_json(classify_singularity(*s.metric, g, *at, a.tol)));
  return 0;
}

int cmd_probe(const Args& a) {
  const Setup s = load(a, false);
  const GeodesicState g = geodesic_start(a, s);
  ProbeGrid grid;
  if (!a.grid_rings.empty()) {
    grid.rings.clear();
    std::stringstream ss(a.grid_rings);
    for (std::string item; std::getline(ss, item, ',');) {
      try {
        grid.rings.push_back(std::stod(item));
      } catch (const std::exception&) {
        throw ConfigError("bad --grid-rings entry '" + item + "'");
      }
    }
  }
  if (a.budget < 0) throw ConfigError("--budget must be nonnegative");
  ProbeOptions o;
  o.budget = a.budget;
  o.tol = a.tol;
  const auto report = probe_completeness(*s.metric, g, grid, o);
  write_json(a, to_json(report));
  if (!a.csv.empty()) write_text(a.csv, probe_csv(report));
  if (!a.svg.empty()) write_text(a.svg, probe_svg(report));
  switch (report.verdict) {
    case ProbeVerdict::looks_complete: return 0;
    case ProbeVerdict::looks_incomplete: return 2;
    case ProbeVerdict::inconclusive: return 3;
  }
  return 3;
}

int cmd_coercivity(const Args& a) {
  const Setup s = load(a, false);
  CoercivityVerdict v;
  if (a.family) {
    v = coercivity_check_family(*s.metric);
  } else {
    std::optional<Point> base;
    if (auto j = pick(a.start, s.cfg, "start")) {
      base = point_from_json(*j);
      if (base->size() != s.metric->dim()) throw ConfigError("base point needs one entry per factor");
      try {
        s.metric->check_domain(*base);
      } catch (const DomainViolation& e) {
        throw ConfigError(e.what());
      }
      if (!s.metric->is_ordinary(*base)) throw ConfigError("base point is not metrically ordinary");
    }
    SampleOptions o;
    o.tol = a.tol;
    v = coercivity_check(*s.metric, a.tuples, a.seed, base, o);
  }
  write_json(a, to_json(v));
  switch (v.overall) {
    case OverallVerdict::coercive: return 0;
    case OverallVerdict::not_coercive: return 2;
    case OverallVerdict::undetermined: return 3;
  }
  return 3;
}

void common(CLI::App* c, Args& a) {
  c->add_option("--config", a.config, "metric config (JSON)");
  c->add_option("--start", a.start, "start point u, JSON list of [re, im]");
  c->add_option("--z0", a.z0, "start parameter, [re, im]");
  c->add_option("--tol", a.tol, "integration tolerance")->capture_default_str();
  c->add_option("--out", a.out, "output file (default stdout)");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"holgeo: complex geodesics of meromorphic warped metrics"};
  app.require_subcommand(1);
  Args trace, classify, probe, coerc;

  auto* t = app.add_subcommand("trace", "continue a geodesic along a path");
  common(t, trace);
  t->add_option("--velocity", trace.velocity, "start velocity du/dz");
  t->add_option("--path", trace.path, "waypoints or {\"legs\": [...]}, JSON or @file");
  t->add_option("--synthetic", trace.synthetic, "use a synthetic scalar system instead of a metric");
  t->add_option("--csv", trace.csv, "sample CSV file");

  auto* c = app.add_subcommand("classify", "classify the obstruction near a parameter value");
  common(c, classify);
  c->add_option("--velocity", classify.velocity, "start velocity du/dz");
  c->add_option("--path", classify.path, "trace this path and classify where it stops");
  c->add_option("--at", classify.at, "parameter value to classify, [re, im]");
  c->add_option("--synthetic", classify.synthetic, "use a synthetic scalar system instead of a metric");

  auto* p = app.add_subcommand("probe", "probe geodesic completeness on a target grid");
  common(p, probe);
  p->add_option("--velocity", probe.velocity, "start velocity du/dz");
  p->add_option("--grid-rings", probe.grid_rings, "comma separated ring radii");
  p->add_option("--budget", probe.budget, "detour retries per target")->capture_default_str();
  p->add_option("--csv", probe.csv, "target CSV file");
  p->add_option("--svg", probe.svg, "target grid SVG file");

  auto* k = app.add_subcommand("coercivity", "decide or sample coercivity");
  common(k, coerc);
  k->add_option("--tuples", coerc.tuples, "random tuples (A_1 .. A_N)")->capture_default_str();
  k->add_option("--seed", coerc.seed, "tuple seed")->capture_default_str();
  k->add_flag("--family", coerc.family, "closed-form decision for the quadratic family");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 1;
  }

  try {
    if (t->parsed()) return cmd_trace(trace);
    if (c->parsed()) return cmd_classify(classify);
    if (p->parsed()) return cmd_probe(probe);
    if (k->parsed()) return cmd_coercivity(coerc);
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 1;
}
