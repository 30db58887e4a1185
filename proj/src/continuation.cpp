#include "holgeo/continuation.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

#include "holgeo/errors.hpp"

namespace holgeo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

cplx eval_bivariate(const Eigen::MatrixXcd& c, cplx z, cplx u) {
  cplx total = 0, zp = 1;
  for (Eigen::Index i = 0; i < c.rows(); ++i, zp *= z) {
    cplx row = 0;
    for (Eigen::Index j = c.cols(); j-- > 0;) row = row * u + c(i, j);
    total += zp * row;
  }
  return total;
}

Eigen::MatrixXcd coeffs(Eigen::Index rows, Eigen::Index cols, std::initializer_list<std::tuple<int, int, cplx>> terms) {
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(rows, cols);
  for (const auto& [i, j, c] : terms) m(i, j) = c;
  return m;
}

double max_abs(const Eigen::VectorXcd& v) { return v.size() ? v.cwiseAbs().maxCoeff() : 0.0; }

std::string describe(const MonodromyResult& r) {
  std::ostringstream os;
  switch (r.kind) {
    case MonodromyKind::closed: os << "closed_after(" << r.turns << ")"; break;
    case MonodromyKind::open: os << "open_after(" << r.turns << ")"; break;
    case MonodromyKind::blocked: os << "blocked(" << to_string(r.status.kind) << ")"; break;
  }
  return os.str();
}

bool same_outcome(const MonodromyResult& a, const MonodromyResult& b) {
  return a.kind == b.kind && (a.kind != MonodromyKind::closed || a.turns == b.turns);
}

struct Fit {
  double slope = 0.0;
  double residual = std::numeric_limits<double>::infinity();
};

Fit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  Fit f;
  const auto n = static_cast<Eigen::Index>(x.size());
  if (n < 3) return f;
  Eigen::MatrixXd a(n, 2);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    a(i, 0) = 1.0;
    a(i, 1) = x[static_cast<std::size_t>(i)];
    b(i) = y[static_cast<std::size_t>(i)];
  }
  const Eigen::Vector2d coef = a.colPivHouseholderQr().solve(b);
  f.slope = coef(1);
  f.residual = std::sqrt((a * coef - b).squaredNorm() / static_cast<double>(n));
  return f;
}

// Refines the location of a pole of component i from 1/(y'/y) ≈ α + βz.
cplx refine_pole(const OdeSystem& system, const std::vector<OdeState>& samples, int i, cplx fallback) {
  const double top = std::abs(samples.back().y(i));
  std::vector<std::pair<cplx, cplx>> pts;
  for (const auto& s : samples) {
    const cplx yi = s.y(i);
    if (std::abs(yi) < 1e-3 * top) continue;
    const cplx dy = system.rhs(s.z, s.y, s.chart)(i);
    if (dy == cplx(0)) continue;
    pts.emplace_back(s.z, yi / dy);
  }
  if (pts.size() < 3) return fallback;
  const auto n = static_cast<Eigen::Index>(pts.size());
  Eigen::MatrixXcd a(n, 2);
  Eigen::VectorXcd b(n);
  for (Eigen::Index k = 0; k < n; ++k) {
    a(k, 0) = 1.0;
    a(k, 1) = pts[static_cast<std::size_t>(k)].first;
    b(k) = pts[static_cast<std::size_t>(k)].second;
  }
  const Eigen::Vector2cd coef = a.colPivHouseholderQr().solve(b);
  if (coef(1) == cplx(0)) return fallback;
  const cplx z = -coef(0) / coef(1);
  return std::isfinite(z.real()) && std::isfinite(z.imag()) ? z : fallback;
}

}  // namespace

SyntheticSystem::SyntheticSystem(Eigen::MatrixXcd num, Eigen::MatrixXcd den)
    : num_(std::move(num)), den_(std::move(den)) {
  if (den_.size() == 0 || den_.isZero(0)) throw ConfigError("synthetic system needs a nonzero denominator");
  if (num_.size() == 0) num_ = Eigen::MatrixXcd::Zero(1, 1);
}

Eigen::VectorXcd SyntheticSystem::rhs(cplx z, const Eigen::VectorXcd& y, ChartMask) const {
  Eigen::VectorXcd out(1);
  const cplx q = eval_bivariate(den_, z, y(0));
  if (q == cplx(0)) {
    const double inf = std::numeric_limits<double>::infinity();
    out(0) = {inf, inf};
  } else {
    out(0) = eval_bivariate(num_, z, y(0)) / q;
  }
  return out;
}

std::vector<std::string> synthetic_problem_names() {
  return {"identity", "sqrt", "log", "pole", "pole1", "pole2", "pole3", "zlogz"};
}

SyntheticProblem synthetic_problem(const std::string& name) {
  const Eigen::MatrixXcd one = coeffs(1, 1, {{0, 0, 1.0}});
  if (name == "identity") return {name, SyntheticSystem(one, one), 0.0, 0.0, 0.0, "u = z"};
  if (name == "sqrt")
    return {name, SyntheticSystem(one, coeffs(1, 2, {{0, 1, 2.0}})), 1.0, 1.0, 0.0, "u = sqrt(z)"};
  if (name == "log") return {name, SyntheticSystem(one, coeffs(2, 1, {{1, 0, 1.0}})), 1.0, 0.0, 0.0, "u = log(z)"};
  if (name == "pole")
    return {name, SyntheticSystem(coeffs(1, 3, {{0, 2, 1.0}}), one), 0.0, 1.0, 1.0, "u = 1/(1 - z)"};
  if (name == "pole1" || name == "pole2" || name == "pole3") {
    const double k = name.back() - '0';
    return {name, SyntheticSystem(coeffs(1, 2, {{0, 1, k}}), coeffs(2, 1, {{0, 0, 1.0}, {1, 0, -1.0}})), 0.0, 1.0,
            1.0, "u = (1 - z)^-" + std::string(1, name.back())};
  }
  if (name == "zlogz")
    return {name, SyntheticSystem(coeffs(2, 2, {{0, 1, 1.0}, {1, 0, 1.0}}), coeffs(2, 1, {{1, 0, 1.0}})), 1.0, 0.0,
            0.0, "u = z log(z)"};
  throw ConfigError("unknown synthetic system '" + name + "'");
}

OdeState initial_state(const SyntheticProblem& p) {
  OdeState s;
  s.z = p.z0;
  s.y = Eigen::VectorXcd::Constant(1, p.u0);
  return s;
}

ContinuationRecord continue_along(const OdeSystem& system, const OdeState& s, const PlanePath& path, double tol,
                                  bool record_samples) {
  IntegratorOptions opts;
  opts.tol = tol;
  opts.record_samples = record_samples;
  ContinuationRecord rec = integrate_path(system, s, path, opts);
  const bool closed = !path.legs().empty() && std::abs(path.end() - path.start()) <= 1e-12 * (1.0 + std::abs(path.start()));
  if (closed && rec.status.kind == StatusKind::completed) {
    const OdeState& end = rec.final_state();
    const double gap = end.chart == s.chart ? max_abs(end.y - s.y) : std::numeric_limits<double>::infinity();
    const double limit = 100 * tol * (1.0 + path.length()) * (1.0 + max_abs(s.y));
    rec.status.kind = gap <= limit ? StatusKind::loop_closed : StatusKind::loop_open;
  }
  return rec;
}

ContinuationRecord continue_along(const WarpedMetric& m, const GeodesicState& s, const PlanePath& path,
                                  double tol) {
  validate_tolerance(tol);
  if (!m.is_ordinary(s.u)) throw SingularMetricPoint("continuation must start at a metrically ordinary point");
  const GeodesicSystem system(m);
  return continue_along(system, system.to_ode(s), path, tol);
}

const char* to_string(MonodromyKind kind) {
  switch (kind) {
    case MonodromyKind::closed: return "closed";
    case MonodromyKind::open: return "open";
    case MonodromyKind::blocked: return "blocked";
  }
  return "blocked";
}

MonodromyResult monodromy_probe(const OdeSystem& system, const OdeState& s, cplx center, int max_turns,
                                double tol) {
  validate_tolerance(tol);
  const double r = std::abs(s.z - center);
  if (!(r > 0)) throw InvalidPath("monodromy start must lie on a circle of positive radius");
  const double limit = 100 * tol * (1.0 + kTwoPi * r) * (1.0 + max_abs(s.y));

  MonodromyResult out;
  out.last = s;
  IntegratorOptions opts;
  opts.tol = tol;
  opts.record_samples = false;
  for (int turn = 1; turn <= max_turns; ++turn) {
    PlanePath loop(out.last.z);
    loop.arc_sweep(center, kTwoPi);
    const auto rec = integrate_path(system, out.last, loop, opts);
    if (rec.status.kind != StatusKind::completed) {
      out.kind = MonodromyKind::blocked;
      out.status = rec.status;
      return out;
    }
    OdeState next = rec.final_state();
    next.z = s.z;
    out.increments.push_back(next.y - out.last.y);
    out.last = next;
    out.turns = turn;
    if (next.chart == s.chart && max_abs(next.y - s.y) <= limit) {
      out.kind = MonodromyKind::closed;
      return out;
    }
  }
  out.kind = MonodromyKind::open;
  return out;
}

const char* to_string(SingularityKind kind) {
  switch (kind) {
    case SingularityKind::regular: return "regular";
    case SingularityKind::pole: return "pole";
    case SingularityKind::logarithmic: return "logarithmic";
    case SingularityKind::removable_logarithmic: return "removable_logarithmic";
    case SingularityKind::boundary_blocked: return "boundary_blocked";
    case SingularityKind::undetermined: return "undetermined";
  }
  return "undetermined";
}

SingularityVerdict classify_singularity(const OdeSystem& system, const OdeState& s, cplx z_star, double tol,
                                        const ClassifyOptions& options) {
  validate_tolerance(tol);
  SingularityVerdict v;
  v.location = z_star;
  auto& ev = v.evidence;

  PlanePath ray(s.z);
  ray.segment_to(z_star);
  const auto approach = continue_along(system, s, ray, tol);
  ev.approach = approach.status;
  if (approach.status.kind == StatusKind::completed) {
    v.kind = SingularityKind::regular;
    ev.note = "continuation reaches the point";
    return v;
  }
  const cplx z_obs = approach.status.z;
  v.location = z_obs;
  if (approach.status.kind == StatusKind::domain_exit) {
    v.kind = SingularityKind::boundary_blocked;
    return v;
  }
  const double dist = std::abs(s.z - z_obs);
  if (!(dist > 0)) {
    ev.note = "obstruction at the start";
    return v;
  }
  const cplx dir = (s.z - z_obs) / dist;

  // Loops of shrinking radius around the obstruction.
  const double r0 = std::min(0.25 * dist, 0.5);
  std::vector<std::pair<double, MonodromyResult>> trials;
  for (double r : {r0, r0 / 4, r0 / 16}) {
    ev.radii.push_back(r);
    PlanePath lead(s.z);
    lead.segment_to(z_obs + r * dir);
    const auto to_circle = continue_along(system, s, lead, tol, false);
    if (to_circle.status.kind != StatusKind::completed) {
      ev.loops.push_back(std::string("blocked(") + to_string(to_circle.status.kind) + ")");
      ev.spreads.push_back(0.0);
      continue;
    }
    auto mr = monodromy_probe(system, to_circle.final_state(), z_obs, options.max_turns, tol);
    ev.loops.push_back(describe(mr));
    double spread = 0;
    for (const auto& inc : mr.increments) spread = std::max(spread, max_abs(inc));
    ev.spreads.push_back(spread);
    if (mr.kind != MonodromyKind::blocked) trials.emplace_back(r, std::move(mr));
  }
  if (trials.empty()) {
    ev.note = "every loop was blocked";
    return v;
  }
  bool agree = true;
  for (const auto& t : trials) agree = agree && same_outcome(t.second, trials.front().second);
  const MonodromyResult& outcome = trials.back().second;
  if (!agree) ev.note = "loop outcomes differ between radii; smallest radius used";

  if (outcome.kind == MonodromyKind::closed) {
    const int m = outcome.turns;
    // Components that blow up along the approach.
    const auto& samples = approach.samples;
    const OdeState* ref = &samples.front();
    for (const auto& smp : samples)
      if (std::abs(smp.z - z_obs) >= r0) ref = &smp;
    int lead_component = -1;
    double best = 0;
    for (int i = 0; i < system.position_dim(); ++i) {
      const double growth = std::abs(samples.back().y(i)) / (1.0 + std::abs(ref->y(i)));
      if (growth >= 100) {
        ev.blowing_components.push_back(i);
        if (growth > best) best = growth, lead_component = i;
      }
    }
    if (lead_component < 0) {
      v.kind = SingularityKind::regular;
      ev.note = "closed_after(" + std::to_string(m) + "), state bounded";
      return v;
    }

    const cplx zp = refine_pole(system, samples, lead_component, z_obs);
    v.location = zp;
    const double d_last = std::abs(samples.back().z - zp);
    const double big = 10 * d_last;
    if (!(d_last > 0) || !(std::abs(s.z - zp) > big)) {
      ev.note = "approach too short for an order estimate";
      return v;
    }
    const cplx back = (s.z - zp) / std::abs(s.z - zp);
    PlanePath decade(s.z);
    decade.segment_to(zp + big * back);
    for (int j = 1; j < 10; ++j) decade.segment_to(zp + big * std::pow(10.0, -j / 10.0) * back);
    const auto rec = continue_along(system, s, decade, tol);
    std::vector<double> x, y;
    for (std::size_t idx : rec.leg_ends) {
      const OdeState& smp = rec.samples[idx];
      const double d = std::abs(smp.z - zp);
      const double w = std::abs(smp.y(lead_component));
      if (d > 1.01 * big || !(w > 0)) continue;
      x.push_back(std::log(d));
      y.push_back(-std::log(w));
    }
    const Fit fit = linear_fit(x, y);
    ev.slope = fit.slope;
    ev.residual = fit.residual;
    if (x.size() < 5 || fit.residual > options.residual_limit) {
      ev.note = "order regression rejected";
      return v;
    }
    const long order = std::lround(fit.slope * m);
    if (order < 1) {
      ev.note = "reciprocal does not vanish at the point";
      return v;
    }
    v.kind = SingularityKind::pole;
    v.order = static_cast<int>(order);
    return v;
  }

  // Open loops: do the per-turn increments shrink with the radius?
  std::vector<const std::pair<double, MonodromyResult>*> open;
  for (const auto& t : trials)
    if (t.second.kind == MonodromyKind::open) open.push_back(&t);
  v.kind = SingularityKind::logarithmic;
  if (open.size() < 2) {
    ev.note = "single open loop";
    return v;
  }
  const auto& wide = open.front()->second.increments;
  const auto& tight = open.back()->second.increments;
  const Eigen::Index n = wide.front().size();
  bool any_shrinks = false, any_grows = false;
  double wide_all = 0, tight_all = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    double a = 0, b = 0;
    for (const auto& inc : wide) a = std::max(a, std::abs(inc(i)));
    for (const auto& inc : tight) b = std::max(b, std::abs(inc(i)));
    wide_all = std::max(wide_all, a);
    tight_all = std::max(tight_all, b);
    if (b <= 0.25 * a) any_shrinks = true;
    if (b > a) any_grows = true;
  }
  if (tight_all <= 0.25 * wide_all && !any_grows) {
    v.kind = SingularityKind::removable_logarithmic;
  } else if (any_grows && any_shrinks) {
    ev.note = "polar";
  }
  return v;
}

SingularityVerdict classify_singularity(const WarpedMetric& m, const GeodesicState& s, cplx z_star, double tol,
                                        const ClassifyOptions& options) {
  if (!m.is_ordinary(s.u)) throw SingularMetricPoint("classification must start at a metrically ordinary point");
  const GeodesicSystem system(m);
  return classify_singularity(system, system.to_ode(s), z_star, tol, options);
}

}  // namespace holgeo
