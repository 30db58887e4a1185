#include "holgeo/io.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <numbers>
#include <sstream>

#include "holgeo/errors.hpp"

namespace holgeo {

namespace {

json opt_number(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

json vec_json(const Eigen::VectorXcd& v, Eigen::Index from, Eigen::Index count) {
  json out = json::array();
  for (Eigen::Index i = from; i < from + count; ++i) out.push_back(to_json(v(i)));
  return out;
}

json locus_json(const LocusId& l) {
  return {{"component", l.component}, {"point", to_json(l.point)}, {"pole", l.pole}, {"coefficient", l.coefficient}};
}

json summary_json(const GridSummary& g) {
  return {{"reached", g.reached}, {"blocked", g.blocked}, {"boundary_blocked", g.boundary_blocked},
          {"isolated", g.isolated}};
}

std::string fmt(double x) {
  std::ostringstream os;
  os << std::setprecision(17) << x;
  return os.str();
}

void csv_complex(std::ostringstream& os, cplx z) { os << ',' << fmt(z.real()) << ',' << fmt(z.imag()); }

}  // namespace

json to_json(cplx z) { return json::array({opt_number(z.real()), opt_number(z.imag())}); }

cplx complex_from_json(const json& j) {
  if (j.is_number()) return {j.get<double>(), 0.0};
  if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
    return {j[0].get<double>(), j[1].get<double>()};
  throw ConfigError("expected a complex number [re, im], got " + j.dump());
}

json to_json(const ComplexPoly& p) {
  json out = json::array();
  for (const auto& c : p.coeffs()) out.push_back(to_json(c));
  return out;
}

ComplexPoly poly_from_json(const json& j) {
  if (j.is_number()) return ComplexPoly::constant(complex_from_json(j));
  if (!j.is_array() || j.empty()) throw ConfigError("expected a polynomial as a list of [re, im], got " + j.dump());
  std::vector<cplx> c;
  for (const auto& x : j) c.push_back(complex_from_json(x));
  return ComplexPoly(std::move(c));
}

json to_json(const Rational& r) { return {{"num", to_json(r.num())}, {"den", to_json(r.den())}}; }

Rational rational_from_json(const json& j) {
  if (!j.is_object() || !j.contains("num")) throw ConfigError("expected {\"num\": ..., \"den\": ...}, got " + j.dump());
  const ComplexPoly den = j.contains("den") ? poly_from_json(j.at("den")) : ComplexPoly::constant(1.0);
  try {
    return Rational(poly_from_json(j.at("num")), den);
  } catch (const InvalidRational& e) {
    throw ConfigError(e.what());
  }
}

json to_json(const WarpedMetric& m) {
  json factors = json::array(), a = json::array(), f = json::array();
  for (auto k : m.factors()) factors.push_back(to_string(k));
  for (int k = 1; k < m.dim(); ++k) {
    a.push_back(to_json(m.warp(k)));
    f.push_back(to_json(m.fiber(k)));
  }
  return {{"factors", factors}, {"b1", to_json(m.b1())}, {"a", a}, {"f", f}};
}

WarpedMetric metric_from_json(const json& j) {
  if (!j.is_object() || !j.contains("factors") || !j.contains("b1"))
    throw ConfigError("metric config needs \"factors\" and \"b1\"");
  try {
    std::vector<FactorKind> factors;
    for (const auto& x : j.at("factors")) factors.push_back(factor_kind_from_string(x.get<std::string>()));
    std::vector<Rational> a, f;
    if (j.contains("a"))
      for (const auto& x : j.at("a")) a.push_back(rational_from_json(x));
    if (j.contains("f")) {
      for (const auto& x : j.at("f")) f.push_back(rational_from_json(x));
    } else {
      f.assign(a.size(), Rational::constant(1.0));
    }
    return WarpedMetric(std::move(factors), rational_from_json(j.at("b1")), std::move(a), std::move(f));
  } catch (const InvalidMetric& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
}

json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read " + path);
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

Point point_from_json(const json& j) {
  if (!j.is_array() || j.empty()) throw ConfigError("expected a list of complex numbers, got " + j.dump());
  Point p(static_cast<Eigen::Index>(j.size()));
  for (std::size_t i = 0; i < j.size(); ++i) p(static_cast<Eigen::Index>(i)) = complex_from_json(j[i]);
  return p;
}

PlanePath path_from_json(const json& j, cplx start) {
  PlanePath path(start);
  try {
    if (j.is_array()) {
      for (const auto& x : j) path.segment_to(complex_from_json(x));
    } else if (j.is_object() && j.contains("legs")) {
      for (const auto& leg : j.at("legs")) {
        if (leg.contains("to")) {
          path.segment_to(complex_from_json(leg.at("to")));
        } else if (leg.contains("arc")) {
          const auto& a = leg.at("arc");
          path.arc_sweep(complex_from_json(a.at("center")), a.at("sweep").get<double>());
        } else {
          throw ConfigError("path leg needs \"to\" or \"arc\": " + leg.dump());
        }
      }
    } else {
      throw ConfigError("path must be a list of waypoints or {\"legs\": [...]}");
    }
  } catch (const InvalidPath& e) {
    throw ConfigError(e.what());
  } catch (const json::exception& e) {
    throw ConfigError(e.what());
  }
  if (path.legs().empty()) throw ConfigError("path has no legs");
  return path;
}

json to_json(const TerminalStatus& s) {
  json out = {{"kind", to_string(s.kind)}, {"z", to_json(s.z)}};
  if (s.component >= 0) out["component"] = s.component;
  if (s.locus) out["locus"] = locus_json(*s.locus);
  return out;
}

json to_json(const ContinuationRecord& rec, const GeodesicSystem& sys) {
  json samples = json::array();
  for (const auto& s : rec.samples) {
    const auto g = sys.from_ode(s);
    json u = json::array(), v = json::array();
    for (Eigen::Index i = 0; i < g.u.size(); ++i) {
      u.push_back(to_json(g.u(i)));
      v.push_back(to_json(g.v(i)));
    }
    samples.push_back({{"z", to_json(s.z)}, {"u", u}, {"v", v}});
  }
  return {{"status", to_json(rec.status)},
          {"steps", rec.steps},
          {"rejected", rec.rejected},
          {"legs_completed", rec.leg_ends.size()},
          {"drift", opt_number(conservation_drift(sys.metric(), rec))},
          {"samples", samples}};
}

json to_json(const ContinuationRecord& rec) {
  json samples = json::array();
  for (const auto& s : rec.samples) samples.push_back({{"z", to_json(s.z)}, {"u", vec_json(s.y, 0, s.y.size())}});
  return {{"status", to_json(rec.status)},
          {"steps", rec.steps},
          {"rejected", rec.rejected},
          {"legs_completed", rec.leg_ends.size()},
          {"samples", samples}};
}

std::string record_csv(const ContinuationRecord& rec, const GeodesicSystem& sys) {
  std::ostringstream os;
  const int n = sys.position_dim();
  os << "z_re,z_im";
  for (int i = 1; i <= n; ++i) os << ",u" << i << "_re,u" << i << "_im";
  for (int i = 1; i <= n; ++i) os << ",v" << i << "_re,v" << i << "_im";
  os << '\n';
  for (const auto& s : rec.samples) {
    const auto g = sys.from_ode(s);
    os << fmt(s.z.real()) << ',' << fmt(s.z.imag());
    for (int i = 0; i < n; ++i) csv_complex(os, g.u(i));
    for (int i = 0; i < n; ++i) csv_complex(os, g.v(i));
    os << '\n';
  }
  return os.str();
}

std::string record_csv(const ContinuationRecord& rec) {
  std::ostringstream os;
  const auto n = rec.samples.empty() ? 0 : rec.samples.front().y.size();
  os << "z_re,z_im";
  for (Eigen::Index i = 1; i <= n; ++i) os << ",u" << i << "_re,u" << i << "_im";
  os << '\n';
  for (const auto& s : rec.samples) {
    os << fmt(s.z.real()) << ',' << fmt(s.z.imag());
    for (Eigen::Index i = 0; i < s.y.size(); ++i) csv_complex(os, s.y(i));
    os << '\n';
  }
  return os.str();
}

json to_json(const SingularityVerdict& v) {
  const auto& e = v.evidence;
  json out = {{"kind", to_string(v.kind)}};
  if (v.kind == SingularityKind::pole) out["order"] = v.order;
  out["location"] = to_json(v.location);
  json spreads = json::array();
  for (double s : e.spreads) spreads.push_back(opt_number(s));
  out["evidence"] = {{"approach", to_json(e.approach)},
                     {"radii", e.radii},
                     {"loops", e.loops},
                     {"spreads", spreads},
                     {"blowing_components", e.blowing_components},
                     {"slope", opt_number(e.slope)},
                     {"residual", opt_number(e.residual)},
                     {"note", e.note}};
  return out;
}

json to_json(const ProbeReport& r) {
  json targets = json::array();
  for (const auto& t : r.targets) {
    json j;
    if (t.infinite) {
      j["zeta"] = "infinity";
    } else {
      j["zeta"] = to_json(t.zeta);
      j["ring"] = t.ring;
      j["angle"] = t.angle;
    }
    j["status"] = t.reached ? "reached" : "blocked";
    j["attempts"] = t.attempts;
    if (!t.reached) j["obstruction"] = to_json(t.obstruction);
    if (t.verdict) j["verdict"] = to_json(*t.verdict);
    targets.push_back(j);
  }
  json summary = summary_json(r.summary);
  summary["verdict"] = to_string(r.verdict);
  return {{"verdict", to_string(r.verdict)},
          {"grid",
           {{"rings", r.grid.rings},
            {"angles", r.grid.angles},
            {"infinity_rays", r.grid.infinity_rays},
            {"infinity_radius", r.grid.infinity_radius}}},
          {"summary", summary},
          {"refined", summary_json(r.refined)},
          {"targets", targets}};
}

std::string probe_csv(const ProbeReport& r) {
  std::ostringstream os;
  os << "zeta_re,zeta_im,status\n";
  for (const auto& t : r.targets) {
    if (t.infinite)
      os << "inf,inf";
    else
      os << fmt(t.zeta.real()) << ',' << fmt(t.zeta.imag());
    os << ',' << (t.reached ? "reached" : "blocked") << '\n';
  }
  return os.str();
}

std::string probe_svg(const ProbeReport& r) {
  // Ring i is drawn at radius 40 + 30 i; infinity is the outer band.
  const int rings = static_cast<int>(r.grid.rings.size());
  const double outer = 40 + 30.0 * rings;
  const double size = 2 * outer + 40, c = size / 2;
  auto colour = [](const ProbeTarget& t) {
    if (t.reached) return "#2a9d4a";
    return t.obstruction.kind == StatusKind::domain_exit ? "#d1342f" : "#e89b18";
  };
  std::ostringstream os;
  os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << size << "\" height=\"" << size << "\" viewBox=\"0 0 "
     << size << ' ' << size << "\">\n";
  os << "<rect width=\"" << size << "\" height=\"" << size << "\" fill=\"white\"/>\n";
  for (int i = 0; i < rings; ++i)
    os << "<circle cx=\"" << c << "\" cy=\"" << c << "\" r=\"" << 40 + 30 * i
       << "\" fill=\"none\" stroke=\"#ccc\" stroke-width=\"0.5\"/>\n";
  for (const auto& t : r.targets) {
    if (t.infinite) {
      os << "<circle cx=\"" << c << "\" cy=\"" << c << "\" r=\"" << outer
         << "\" fill=\"none\" stroke-width=\"4\" stroke=\"" << colour(t) << "\"/>\n";
      continue;
    }
    const double phi = 2 * std::numbers::pi * t.angle / r.grid.angles;
    const double rad = 40 + 30.0 * t.ring;
    os << "<circle cx=\"" << fmt(c + rad * std::cos(phi)) << "\" cy=\"" << fmt(c - rad * std::sin(phi))
       << "\" r=\"4\" fill=\"" << colour(t) << "\"/>\n";
  }
  os << "<circle cx=\"" << c << "\" cy=\"" << c << "\" r=\"2\" fill=\"black\"/>\n</svg>\n";
  return os.str();
}

json to_json(const CoercivityVerdict& v) {
  json components = json::array();
  for (const auto& c : v.components) {
    json j = {{"component", c.component}, {"kind", to_string(c.kind)}};
    if (c.form)
      j["form"] = {{"kind", to_string(c.form->kind)},
                   {"a", to_json(c.form->a)},
                   {"b", to_json(c.form->b)},
                   {"c", to_json(c.form->c)}};
    if (!c.witness.empty()) j["witness"] = c.witness;
    if (c.kind != ComponentKind::coercive_closed_form || c.large_extent > 0)
      j["image_extent"] = {{"short", opt_number(c.small_extent)}, {"long", opt_number(c.large_extent)}};
    if (!c.note.empty()) j["note"] = c.note;
    components.push_back(j);
  }
  json base = json::array();
  for (Eigen::Index i = 0; i < v.base.size(); ++i) base.push_back(to_json(v.base(i)));
  return {{"overall", to_string(v.overall)},
          {"seed", v.seed},
          {"tuples", v.tuples},
          {"base", base},
          {"components", components}};
}

}  // namespace holgeo
