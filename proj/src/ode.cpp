#include "holgeo/ode.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "holgeo/errors.hpp"

namespace holgeo {

namespace {

constexpr double kPi = std::numbers::pi;

bool near(cplx a, cplx b) { return std::abs(a - b) <= 1e-12 * std::max({1.0, std::abs(a), std::abs(b)}); }

// Arclength parametrisation of one leg.
struct LegParam {
  cplx a{};      // segment start
  cplx dir{};    // segment unit direction
  cplx center{};
  double radius = 0.0;
  double theta0 = 0.0;
  double sigma = 1.0;
  double length = 0.0;
  bool arc = false;
  cplx end{};

  LegParam(const Leg& leg, cplx leg_start) : a(leg_start) {
    if (const auto* s = std::get_if<Segment>(&leg)) {
      const cplx delta = s->to - leg_start;
      length = std::abs(delta);
      dir = length > 0 ? delta / length : cplx(1.0);
      end = s->to;
    } else {
      const auto& c = std::get<Arc>(leg);
      arc = true;
      center = c.center;
      radius = c.radius;
      theta0 = c.angle_from;
      sigma = c.angle_to >= c.angle_from ? 1.0 : -1.0;
      length = radius * std::abs(c.angle_to - c.angle_from);
      end = PlanePath::leg_end(leg);
    }
  }

  cplx z(double t) const {
    if (t >= length) return end;
    if (!arc) return a + t * dir;
    return center + radius * std::polar(1.0, theta0 + sigma * t / radius);
  }
  cplx dz(double t) const {
    if (!arc) return dir;
    return cplx(0.0, sigma) * std::polar(1.0, theta0 + sigma * t / radius);
  }
};

// Dormand–Prince 5(4).
constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
constexpr double a21 = 1.0 / 5;
constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                 a65 = -5103.0 / 18656;
constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192, b5 = -2187.0 / 6784, b6 = 11.0 / 84;
constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                 e6 = 22.0 / 525, e7 = -1.0 / 40;

bool all_finite(const Eigen::VectorXcd& v) {
  for (Eigen::Index i = 0; i < v.size(); ++i)
    if (!std::isfinite(v(i).real()) || !std::isfinite(v(i).imag())) return false;
  return true;
}

}  // namespace

const char* to_string(StatusKind kind) {
  switch (kind) {
    case StatusKind::completed: return "completed";
    case StatusKind::blow_up: return "blow_up";
    case StatusKind::singular_locus_hit: return "singular_locus_hit";
    case StatusKind::domain_exit: return "domain_exit";
    case StatusKind::step_underflow: return "step_underflow";
    case StatusKind::loop_closed: return "loop_closed";
    case StatusKind::loop_open: return "loop_open";
  }
  return "completed";
}

PlanePath& PlanePath::segment_to(cplx to) {
  legs_.push_back(Segment{to});
  return *this;
}

PlanePath& PlanePath::arc(cplx center, double radius, double angle_from, double angle_to) {
  if (!(radius > 0)) throw InvalidPath("arc radius must be positive");
  const cplx first = center + radius * std::polar(1.0, angle_from);
  if (!near(first, end())) throw InvalidPath("arc does not start where the previous leg ends");
  legs_.push_back(Arc{center, radius, angle_from, angle_to});
  return *this;
}

PlanePath& PlanePath::arc_sweep(cplx center, double sweep) {
  const cplx from = end() - center;
  const double radius = std::abs(from);
  if (!(radius > 0)) throw InvalidPath("arc radius must be positive");
  const double theta = std::arg(from);
  legs_.push_back(Arc{center, radius, theta, theta + sweep});
  return *this;
}

void PlanePath::append(const PlanePath& tail) {
  if (!near(tail.start(), end())) throw InvalidPath("appended path does not start at the end");
  legs_.insert(legs_.end(), tail.legs_.begin(), tail.legs_.end());
}

cplx PlanePath::leg_end(const Leg& leg) {
  if (const auto* s = std::get_if<Segment>(&leg)) return s->to;
  const auto& a = std::get<Arc>(leg);
  return a.center + a.radius * std::polar(1.0, a.angle_to);
}

double PlanePath::leg_length(const Leg& leg, cplx leg_start) {
  if (const auto* s = std::get_if<Segment>(&leg)) return std::abs(s->to - leg_start);
  const auto& a = std::get<Arc>(leg);
  return a.radius * std::abs(a.angle_to - a.angle_from);
}

cplx PlanePath::end() const { return legs_.empty() ? start_ : leg_end(legs_.back()); }

double PlanePath::length() const {
  double total = 0;
  cplx at = start_;
  for (const auto& leg : legs_) {
    total += leg_length(leg, at);
    at = leg_end(leg);
  }
  return total;
}

PlanePath PlanePath::reversed() const {
  std::vector<cplx> starts;
  cplx at = start_;
  for (const auto& leg : legs_) {
    starts.push_back(at);
    at = leg_end(leg);
  }
  PlanePath out(end());
  for (std::size_t i = legs_.size(); i-- > 0;) {
    if (std::holds_alternative<Segment>(legs_[i])) {
      out.legs_.push_back(Segment{starts[i]});
    } else {
      const auto& a = std::get<Arc>(legs_[i]);
      out.legs_.push_back(Arc{a.center, a.radius, a.angle_to, a.angle_from});
    }
  }
  return out;
}

std::optional<PlanePath> detoured_segment(cplx a, cplx b, std::vector<Detour> detours) {
  const double length = std::abs(b - a);
  PlanePath path(a);
  if (length == 0) return path;
  const cplx dir = (b - a) / length;

  struct Interval {
    double lo, hi;
    int side;
  };
  std::vector<Interval> hits;
  for (const auto& d : detours) {
    const cplx rel = (d.point - a) * std::conj(dir);
    const double along = rel.real(), off = std::abs(rel.imag());
    if (off >= d.radius) continue;
    const double r = d.radius + off;
    if (along + r < 0 || along - r > length) continue;
    hits.push_back({along - r, along + r, d.side});
  }
  std::sort(hits.begin(), hits.end(), [](const Interval& x, const Interval& y) { return x.lo < y.lo; });
  std::vector<Interval> merged;
  for (const auto& h : hits) {
    if (!merged.empty() && h.lo <= merged.back().hi)
      merged.back().hi = std::max(merged.back().hi, h.hi);
    else
      merged.push_back(h);
  }
  for (const auto& m : merged) {
    if (m.lo <= 0 || m.hi >= length) return std::nullopt;
    const double centre = 0.5 * (m.lo + m.hi);
    path.segment_to(a + m.lo * dir);
    path.arc_sweep(a + centre * dir, m.side > 0 ? -kPi : kPi);
  }
  path.segment_to(b);
  return path;
}

std::optional<TerminalStatus> OdeSystem::check(cplx z, const Eigen::VectorXcd& y, ChartMask) const {
  const double limit = blowup_threshold();
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    if (std::abs(y(i)) > limit) {
      TerminalStatus s;
      s.kind = StatusKind::blow_up;
      s.z = z;
      s.component = static_cast<int>(i % position_dim());
      return s;
    }
  }
  return std::nullopt;
}

void validate_tolerance(double tol) {
  if (!(tol >= 1e-12 && tol <= 1e-3)) throw InvalidTolerance("tolerance must lie in [1e-12, 1e-3]");
}

ContinuationRecord integrate_path(const OdeSystem& system, const OdeState& start, const PlanePath& path,
                                  const IntegratorOptions& options) {
  validate_tolerance(options.tol);
  if (!near(start.z, path.start())) throw InvalidPath("path does not start at the state's parameter");

  ContinuationRecord rec;
  rec.path = path;
  rec.samples.push_back(start);
  if (auto obstruction = system.check(start.z, start.y, start.chart)) {
    rec.status = *obstruction;
    return rec;
  }

  Eigen::VectorXcd y = start.y;
  ChartMask chart = start.chart;
  const Eigen::Index n = y.size();
  Eigen::VectorXcd k1(n), k2(n), k3(n), k4(n), k5(n), k6(n), k7(n), ynew(n), err(n), tmp(n);
  double h = -1;
  double err_prev = 1e-4;
  cplx leg_start = path.start();

  auto finish = [&](TerminalStatus status, cplx z) {
    if (rec.samples.back().z != z) rec.samples.push_back({z, y, chart});
    rec.status = std::move(status);
    return rec;
  };

  for (const auto& leg : path.legs()) {
    const LegParam lp(leg, leg_start);
    leg_start = lp.end;
    if (lp.length == 0) {
      rec.leg_ends.push_back(rec.samples.size() - 1);
      continue;
    }
    double t = 0;
    double cap = lp.length;
    if (h <= 0) h = std::min(lp.length, 1e-2 * (1.0 + std::abs(lp.z(0))));

    auto f = [&](double tt, const Eigen::VectorXcd& yy) -> Eigen::VectorXcd {
      return system.rhs(lp.z(tt), yy, chart) * lp.dz(tt);
    };

    k1 = f(t, y);
    bool fresh_k1 = true;
    while (t < lp.length) {
      const cplx z = lp.z(t);
      if (++rec.steps > options.max_steps) {
        TerminalStatus s;
        s.kind = StatusKind::step_underflow;
        s.z = z;
        return finish(s, z);
      }
      if (!fresh_k1) {
        k1 = f(t, y);
        fresh_k1 = true;
      }
      const double remaining = lp.length - t;
      h = std::min({h, cap, remaining});
      const double floor = options.underflow_rel * (1.0 + std::abs(z));
      if (h < floor && remaining > floor) {
        TerminalStatus s;
        s.kind = StatusKind::step_underflow;
        s.z = z;
        return finish(s, z);
      }
      const bool last = h >= remaining;
      const double tn = last ? lp.length : t + h;

      bool finite = all_finite(k1);
      if (finite) {
        tmp = y + h * (a21 * k1);
        k2 = f(t + c2 * h, tmp);
        tmp = y + h * (a31 * k1 + a32 * k2);
        k3 = f(t + c3 * h, tmp);
        tmp = y + h * (a41 * k1 + a42 * k2 + a43 * k3);
        k4 = f(t + c4 * h, tmp);
        tmp = y + h * (a51 * k1 + a52 * k2 + a53 * k3 + a54 * k4);
        k5 = f(t + c5 * h, tmp);
        tmp = y + h * (a61 * k1 + a62 * k2 + a63 * k3 + a64 * k4 + a65 * k5);
        k6 = f(tn, tmp);
        ynew = y + h * (b1 * k1 + b3 * k3 + b4 * k4 + b5 * k5 + b6 * k6);
        k7 = f(tn, ynew);
        err = h * (e1 * k1 + e3 * k3 + e4 * k4 + e5 * k5 + e6 * k6 + e7 * k7);
        finite = all_finite(ynew) && all_finite(err);
      }
      if (!finite) {
        ++rec.rejected;
        if (!all_finite(k1)) {
          TerminalStatus s;
          s.kind = StatusKind::step_underflow;
          s.z = z;
          return finish(s, z);
        }
        h *= 0.25;
        continue;
      }

      // Error per unit step, mixed absolute/relative, floored at roundoff.
      constexpr double eps = std::numeric_limits<double>::epsilon();
      double errnorm = 0;
      for (Eigen::Index i = 0; i < n; ++i) {
        const double mag = std::max(std::abs(y(i)), std::abs(ynew(i)));
        const double scale = options.tol * h * (1.0 + mag) + 32 * eps * (mag + h * std::abs(k1(i)));
        errnorm = std::max(errnorm, std::abs(err(i)) / scale);
      }
      if (errnorm > 1.0) {
        ++rec.rejected;
        h *= std::max(0.2, 0.9 * std::pow(errnorm, -0.2));
        continue;
      }

      const cplx zn = lp.z(tn);
      auto obstruction = system.check(zn, ynew, chart);
      if (!obstruction) obstruction = system.check_step(zn, y, ynew, chart);
      if (obstruction) {
        if (h <= options.locate_rel * (1.0 + std::abs(zn))) {
          obstruction->z = zn;
          return finish(*obstruction, z);
        }
        ++rec.rejected;
        cap = 0.5 * h;
        h = cap;
        continue;
      }

      t = tn;
      y = ynew;
      const ChartMask before = chart;
      system.rechart(y, chart);
      if (chart == before) {
        k1 = k7;
      } else {
        fresh_k1 = false;
      }
      if (options.record_samples && !last) rec.samples.push_back({zn, y, chart});

      const double fac = errnorm == 0 ? 5.0
                                       : std::clamp(0.9 * std::pow(errnorm, -0.14) * std::pow(err_prev, 0.08),
                                                    0.2, 5.0);
      err_prev = std::max(errnorm, 1e-4);
      if (!last) h *= fac;
      else h = std::max(h, h * fac);
    }
    rec.samples.push_back({lp.end, y, chart});
    rec.leg_ends.push_back(rec.samples.size() - 1);
  }
  rec.status.kind = StatusKind::completed;
  rec.status.z = path.end();
  return rec;
}

}  // namespace holgeo
