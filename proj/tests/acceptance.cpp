// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "holgeo/coercivity.hpp"
#include "holgeo/io.hpp"
#include "holgeo/probe.hpp"
#include "oracles.hpp"

using namespace holgeo;

namespace {

constexpr double kPi = std::numbers::pi;
const ComplexPoly eta{0.0, 1.0};

struct Outcome {
  bool pass = false;
  std::string detail;
};

Point pt(std::initializer_list<cplx> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (auto x : xs) p(i++) = x;
  return p;
}

std::string num(double x) {
  std::ostringstream os;
  os.precision(3);
  os << x;
  return os.str();
}

Outcome ac1() {
  std::mt19937_64 rng(1001);
  double worst = 0;
  int points = 0, zero_mismatch = 0;
  for (int trial = 0; trial < 10; ++trial) {
    const auto m = oracle::random_metric(rng, 3);
    int here = 0;
    while (here < 100) {
      Point u(3);
      for (int c = 0; c < 3; ++c) u(c) = oracle::random_complex(rng, 2.0);
      if (!m.is_ordinary(u)) continue;
      const auto c = m.christoffel(u);
      const auto ref = oracle::christoffel_general(m, u);
      for (int k = 0; k < 3; ++k)
        for (int a = 0; a < 3; ++a)
          for (int b = 0; b < 3; ++b) {
            const cplx want = ref[k][a][b], got = c(k, a, b);
            if (want == cplx(0)) {
              if (got != cplx(0)) ++zero_mismatch;
            } else {
              worst = std::max(worst, std::abs(got - want) / std::abs(want));
            }
          }
      ++here;
    }
    points += here;
  }
  return {worst <= 1e-10 && zero_mismatch == 0,
          std::to_string(points) + " points, max relative error " + num(worst) + ", sparsity mismatches " +
              std::to_string(zero_mismatch)};
}

Outcome ac2() {
  std::mt19937_64 rng(2002);
  const double tol = 1e-10;
  int done = 0, trials = 0, bad = 0;
  double worst = 0;
  while (done < 50 && trials < 2000) {
    ++trials;
    const auto m = oracle::random_metric(rng, 2);
    Point u(2), v(2);
    for (int i = 0; i < 2; ++i) {
      u(i) = oracle::random_complex(rng, 1.0);
      v(i) = oracle::random_complex(rng, 0.5);
    }
    if (!m.is_ordinary(u)) continue;
    std::uniform_real_distribution<double> len(0.5, 10.0), ang(0.0, 2 * kPi);
    const double length = len(rng);
    const cplx target = std::polar(length, ang(rng));
    const auto rec = integrate_segment(m, {0.0, u, v}, target, tol);
    if (rec.status.kind != StatusKind::completed) continue;
    ++done;
    const double ratio = conservation_drift(m, rec) / (100 * tol * (1 + length));
    worst = std::max(worst, ratio);
    if (ratio > 1) ++bad;
  }
  return {done == 50 && bad == 0, std::to_string(done) + " trajectories (" + std::to_string(trials) +
                                      " drawn), worst drift / bound " + num(worst)};
}

Outcome ac3() {
  const WarpedMetric m({FactorKind::plane}, Rational(ComplexPoly{1.0}, eta * eta), {}, {});
  double worst = 0;
  bool ok = true;
  for (cplx z : {cplx(1), cplx(2), cplx(1, 1)}) {
    const auto rec = integrate_segment(m, {0.0, pt({1.0}), pt({1.0})}, z, 1e-10);
    ok = ok && rec.status.kind == StatusKind::completed;
    worst = std::max(worst, std::abs(rec.final_state().y(0) - std::exp(z)));
  }
  return {ok && worst <= 1e-7, "max |u(z) - e^z| = " + num(worst)};
}

Outcome ac4() {
  auto at = [](const SyntheticProblem& p, cplx z, cplx u) {
    OdeState s = initial_state(p);
    s.z = z;
    s.y(0) = u;
    return s;
  };
  const auto sq = synthetic_problem("sqrt");
  const auto r2 = monodromy_probe(sq.system, at(sq, 1.0, 1.0), 0.0, 8, 1e-10);
  const auto lg = synthetic_problem("log");
  const auto rl = monodromy_probe(lg.system, initial_state(lg), 0.0, 8, 1e-10);
  const auto id = synthetic_problem("identity");
  const auto r1 = monodromy_probe(id.system, at(id, 1.0, 1.0), 0.0, 8, 1e-10);
  double inc = 0;
  for (const auto& d : rl.increments) inc = std::max(inc, std::abs(d(0) - cplx(0, 2 * kPi)));
  const bool ok = r2.kind == MonodromyKind::closed && r2.turns == 2 && rl.kind == MonodromyKind::open &&
                  rl.turns == 8 && rl.increments.size() == 8 && inc <= 1e-6 && r1.kind == MonodromyKind::closed &&
                  r1.turns == 1;
  return {ok, "sqrt " + std::string(to_string(r2.kind)) + "(" + std::to_string(r2.turns) + "), log " +
                  to_string(rl.kind) + "(" + std::to_string(rl.turns) + ") increment error " + num(inc) +
                  ", identity " + to_string(r1.kind) + "(" + std::to_string(r1.turns) + ")"};
}

Outcome ac5() {
  std::string detail;
  bool ok = true;
  for (int k = 1; k <= 3; ++k) {
    const auto p = synthetic_problem("pole" + std::to_string(k));
    const auto v = classify_singularity(p.system, initial_state(p), p.singular, 1e-10);
    ok = ok && v.kind == SingularityKind::pole && v.order == k;
    detail += "pole" + std::to_string(k) + " -> " + to_string(v.kind) + "(" + std::to_string(v.order) + "), ";
  }
  const auto lg = synthetic_problem("log");
  const auto vl = classify_singularity(lg.system, initial_state(lg), lg.singular, 1e-10);
  const auto zl = synthetic_problem("zlogz");
  const auto vz = classify_singularity(zl.system, initial_state(zl), zl.singular, 1e-10);
  ok = ok && vl.kind == SingularityKind::logarithmic && vz.kind == SingularityKind::removable_logarithmic;
  detail += std::string("log -> ") + to_string(vl.kind) + ", z log z -> " + to_string(vz.kind);
  return {ok, detail};
}

struct BasketMember {
  std::string name;
  WarpedMetric metric;
  std::function<GeodesicState(std::mt19937_64&)> start;
};

std::vector<BasketMember> basket() {
  const auto one = Rational::constant(1.0);
  auto family = [&](Rational warp) {
    return WarpedMetric({FactorKind::plane, FactorKind::plane}, one, {std::move(warp)}, {one});
  };
  // Small starts: a point near the origin and a velocity of modulus at most 0.3.
  auto small = [](int n, double reach) {
    return [n, reach](std::mt19937_64& rng) {
      GeodesicState s;
      s.u.resize(n);
      s.v.resize(n);
      std::uniform_real_distribution<double> r(0.0, 1.0), a(0.0, 2 * kPi);
      for (int i = 0; i < n; ++i) {
        s.u(i) = std::polar(reach * r(rng), a(rng));
        s.v(i) = std::polar(0.1 + 0.2 * r(rng), a(rng));
      }
      return s;
    };
  };
  std::mt19937_64 rng(6006);
  auto coeff = [&] { return oracle::random_complex(rng, 1.0); };
  const ComplexPoly q{coeff(), coeff(), coeff() + 0.5};
  std::vector<BasketMember> out;
  out.push_back({"flat plane^2", WarpedMetric::flat({FactorKind::plane, FactorKind::plane}), small(2, 0.5)});
  out.push_back({"flat disc x plane", WarpedMetric::flat({FactorKind::disc, FactorKind::plane}), small(2, 0.5)});
  out.push_back({"exponential", WarpedMetric({FactorKind::plane}, Rational(ComplexPoly{1.0}, eta * eta), {}, {}),
                 [](std::mt19937_64& r) {
                   std::uniform_real_distribution<double> m(0.5, 2.0), a(0.0, 2 * kPi), w(0.1, 0.3);
                   return GeodesicState{0.0, pt({std::polar(m(r), a(r))}), pt({std::polar(w(r), a(r))})};
                 }});
  out.push_back({"family 1/(eta^2-1)", family(Rational(ComplexPoly{1.0}, ComplexPoly{-1.0, 0.0, 1.0})), small(2, 0.5)});
  out.push_back({"family 1/eta", family(Rational(ComplexPoly{1.0}, eta)), small(2, 0.5)});
  out.push_back({"random family", family(Rational(ComplexPoly{1.0}, q)), small(2, 0.5)});
  return out;
}

bool agree(ProbeVerdict p, OverallVerdict c) {
  return (p == ProbeVerdict::looks_complete && c == OverallVerdict::coercive) ||
         (p == ProbeVerdict::looks_incomplete && c == OverallVerdict::not_coercive);
}

Outcome ac6() {
  int disagreements = 0, inconclusive_members = 0;
  std::string detail;
  for (const auto& b : basket()) {
    const auto coer = coercivity_check(b.metric, 32, 0);
    std::mt19937_64 rng(7007);
    int starts = 0, agreed = 0, excluded = 0, draws = 0;
    while (starts < 10 && draws < 200) {
      ++draws;
      const auto s = b.start(rng);
      if (!b.metric.is_ordinary(s.u)) continue;
      ++starts;
      ProbeOptions o;
      o.tol = 1e-8;
      const auto r = probe_completeness(b.metric, s, {}, o);
      if (r.verdict == ProbeVerdict::inconclusive || coer.overall == OverallVerdict::undetermined)
        ++excluded;
      else if (agree(r.verdict, coer.overall))
        ++agreed;
      else
        ++disagreements;
    }
    if (starts < 10) ++disagreements;
    if (excluded > 0) ++inconclusive_members;
    detail += "\n      " + b.name + ": coercivity " + to_string(coer.overall) + ", probe agrees " +
              std::to_string(agreed) + "/" + std::to_string(starts) + ", excluded " + std::to_string(excluded);
  }
  return {disagreements == 0 && inconclusive_members <= 1,
          std::to_string(disagreements) + " disagreements, " + std::to_string(inconclusive_members) +
              " members with excluded pairs" + detail};
}

Outcome ac7() {
  std::mt19937_64 rng(7777);
  auto off_cut = [](cplx w) { return std::abs(w) > 0.1 && std::abs(std::arg(w)) < kPi - 0.05; };
  double worst = 0;
  int checked = 0;
  for (auto kind : {PrimitiveKind::log_form, PrimitiveKind::sqrt_form, PrimitiveKind::linear_form}) {
    int here = 0;
    while (here < 20) {
      const cplx a = kind == PrimitiveKind::log_form ? oracle::random_complex(rng, 2.0) + 0.3 : 0.0;
      const cplx b = kind == PrimitiveKind::linear_form ? 0.0 : oracle::random_complex(rng, 2.0) + 0.3;
      const cplx c = oracle::random_complex(rng, 2.0) + 0.3;
      const auto f = classify_quadratic_primitive(a, b, c);
      const cplx z = oracle::random_complex(rng, 3.0);
      const double h = 1e-3;
      bool safe = f.kind == kind;
      for (double t : {-2.0, -1.0, 0.0, 1.0, 2.0}) {
        const cplx x = z + t * h;
        if (kind == PrimitiveKind::log_form) {
          const cplx w = x * x + (b / a) * x + c / a;
          safe = safe && off_cut(w) && off_cut(x + b / (2.0 * a) + std::sqrt(w));
        } else if (kind == PrimitiveKind::sqrt_form) {
          safe = safe && off_cut(b * x + c);
        }
      }
      if (!safe) continue;
      const cplx d = oracle::derivative_fd([&](cplx x) { return f.evaluate(x); }, z, h);
      worst = std::max(worst, std::abs(d * f.integrand_root(z) - 1.0));
      ++here;
    }
    checked += here;
  }
  return {worst <= 1e-8, std::to_string(checked) + " triples, max |dPhi/deta * root - 1| = " + num(worst)};
}

Outcome ac8() {
  bool ok = true;
  std::string detail;
  for (const auto& b : basket()) {
    const auto bases = ordinary_base_points(b.metric, 3);
    if (bases.size() < 3) {
      ok = false;
      detail += "\n      " + b.name + ": fewer than 3 base points";
      continue;
    }
    std::vector<std::string> seen;
    for (const auto& x : bases) {
      const auto v = coercivity_check(b.metric, 32, 0, x);
      std::string sig = to_string(v.overall);
      for (const auto& c : v.components) sig += std::string("/") + to_string(c.kind);
      seen.push_back(sig);
    }
    const bool same = seen[0] == seen[1] && seen[1] == seen[2];
    ok = ok && same;
    detail += "\n      " + b.name + ": " + seen[0] + (same ? " at all 3 bases" : " | " + seen[1] + " | " + seen[2]);
  }
  return {ok, detail};
}

int run_cli(const std::string& args) {
  const std::string cmd = "\"" + std::string(HOLGEO_CLI) + "\" " + args + " 2>/dev/null";
  const int st = std::system(cmd.c_str());
  return WIFEXITED(st) ? WEXITSTATUS(st) : -1;
}

std::string slurp(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

Outcome ac9() {
  const std::filesystem::path dir = HOLGEO_TMP;
  std::filesystem::create_directories(dir);
  const std::string data = HOLGEO_DATA;
  const std::vector<std::pair<std::string, std::string>> runs{
      {"coercivity", "coercivity --config \"" + data + "/random_family.json\" --seed 17 --tuples 8"},
      {"coercivity_exp", "coercivity --config \"" + data + "/exponential.json\" --seed 3 --tuples 4 --tol 1e-8"},
      {"probe", "probe --config \"" + data + "/mobius.json\""},
      {"trace", "trace --config \"" + data + "/family.json\" --start '[0.1,0.2]' --velocity '[0.3,0.1]' --path '[[2,1],[-1,3]]'"},
      {"classify", "classify --synthetic pole2"},
  };
  int identical = 0;
  std::string detail;
  for (const auto& [name, args] : runs) {
    const auto a = dir / (name + "_a.json"), b = dir / (name + "_b.json");
    const int ea = run_cli(args + " --out \"" + a.string() + "\"");
    const int eb = run_cli(args + " --out \"" + b.string() + "\"");
    const std::string ja = slurp(a), jb = slurp(b);
    const bool same = ea == eb && ea >= 0 && ea != 1 && !ja.empty() && ja == jb;
    if (same) ++identical;
    detail += " " + name + (same ? "=" : "!=");
  }
  return {identical == static_cast<int>(runs.size()),
          std::to_string(identical) + "/" + std::to_string(runs.size()) + " reruns byte-identical:" + detail};
}

}  // namespace

int main() {
  struct Criterion {
    const char* id;
    const char* title;
    double limit;  // seconds
    Outcome (*fn)();
  };
  const Criterion all[] = {
      {"AC1", "Christoffel table vs general formula", 1, ac1},
      {"AC2", "first-integral conservation", 30, ac2},
      {"AC3", "exponential geodesic u = e^z", 1, ac3},
      {"AC4", "monodromy suite", 5, ac4},
      {"AC5", "singularity taxonomy", 10, ac5},
      {"AC6", "completeness vs coercivity on the basket", 300, ac6},
      {"AC7", "primitive derivative identity", 1, ac7},
      {"AC8", "base-point invariance", 120, ac8},
      {"AC9", "deterministic CLI reruns", 60, ac9},
  };
  int failed = 0;
  for (const auto& c : all) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.fn();
    } catch (const std::exception& e) {
      o = {false, std::string("threw: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    const bool pass = o.pass && dt < c.limit;
    if (!pass) ++failed;
    std::printf("%s %s  %s (%.2fs, limit %.0fs): %s\n", c.id, pass ? "PASS" : "FAIL", c.title, dt, c.limit,
                o.detail.c_str());
    std::fflush(stdout);
  }
  return failed == 0 ? 0 : 1;
}
