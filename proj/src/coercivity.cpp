#include "holgeo/coercivity.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>

#include "holgeo/errors.hpp"
#include "holgeo/ode.hpp"

namespace holgeo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// y = (Φ, s) with s² = R: Φ' = s, s' = R'/(2s).
class PrimitiveSystem final : public OdeSystem {
 public:
  explicit PrimitiveSystem(const Rational& r) : r_(r), rp_(r.derivative()) {}
  int dim() const override { return 2; }
  int position_dim() const override { return 1; }
  Eigen::VectorXcd rhs(cplx eta, const Eigen::VectorXcd& y, ChartMask) const override {
    Eigen::VectorXcd out(2);
    out(0) = y(1);
    out(1) = rp_.value(eta) / (2.0 * y(1));
    return out;
  }
  double blowup_threshold() const override { return 1e12; }

 private:
  Rational r_, rp_;
};

struct Extent {
  double small = 0.0;
  double large = 0.0;
};

// Max |Φ| over the samples up to the leg `small_leg`, and over all samples.
void explore(const PrimitiveSystem& sys, const OdeState& start, const PlanePath& path, std::size_t small_leg,
             double tol, Extent& ext) {
  IntegratorOptions opts;
  opts.tol = tol;
  const auto rec = integrate_path(sys, start, path, opts);
  const std::size_t cut = small_leg < rec.leg_ends.size() ? rec.leg_ends[small_leg] : rec.samples.size() - 1;
  for (std::size_t i = 0; i < rec.samples.size(); ++i) {
    const double v = std::abs(rec.samples[i].y(0));
    if (!std::isfinite(v)) continue;
    if (i <= cut) ext.small = std::max(ext.small, v);
    ext.large = std::max(ext.large, v);
  }
}

// Distance along direction d from p to the circle |η| = rho (p inside).
double to_circle(cplx p, cplx d, double rho) {
  const double pd = std::real(p * std::conj(d));
  return -pd + std::sqrt(pd * pd - (std::norm(p) - rho * rho));
}

double segment_clearance(cplx a, cplx b, const std::vector<cplx>& pts) {
  double best = std::numeric_limits<double>::infinity();
  const cplx d = b - a;
  for (const cplx p : pts) {
    const double t = std::clamp(std::real((p - a) * std::conj(d)) / std::norm(d), 0.0, 1.0);
    best = std::min(best, std::abs(a + t * d - p));
  }
  return best;
}

Extent sample_branch(const Rational& r, FactorKind factor, cplx base, double sign, const SampleOptions& o) {
  const PrimitiveSystem sys(r);
  OdeState start;
  start.z = base;
  start.y.resize(2);
  start.y(0) = 0.0;
  start.y(1) = sign * std::sqrt(r.value(base));

  std::vector<cplx> singular, poles;
  for (const auto& z : r.zeros())
    if (factor != FactorKind::disc || std::abs(z.value) < 1.0) singular.push_back(z.value);
  for (const auto& p : r.poles())
    if (factor != FactorKind::disc || std::abs(p.value) < 1.0) {
      singular.push_back(p.value);
      poles.push_back(p.value);
    }

  Extent ext;
  // Rays.
  for (int j = 0; j < o.rays; ++j) {
    const cplx d = std::polar(1.0, kTwoPi * (j + 0.5) / o.rays);
    PlanePath path(base);
    if (factor == FactorKind::disc) {
      path.segment_to(base + to_circle(base, d, 1.0 - 1e-2) * d);
      path.segment_to(base + to_circle(base, d, 1.0 - 1e-3) * d);
    } else {
      path.segment_to(base + (o.ray_length / 64) * d);
      path.segment_to(base + o.ray_length * d);
    }
    explore(sys, start, path, 0, o.tol, ext);
  }

  // Loops around each singular point, 1 turn against loop_turns turns.
  for (const cplx p : singular) {
    double rho = 0.25 * std::abs(p - base);
    for (const cplx q : singular)
      if (q != p) rho = std::min(rho, 0.25 * std::abs(p - q));
    if (factor == FactorKind::disc) rho = std::min(rho, 0.5 * (1.0 - std::abs(p)));
    if (!(rho > 0)) continue;
    PlanePath path(base);
    path.segment_to(p + rho * (base - p) / std::abs(base - p));
    for (int t = 0; t < o.loop_turns; ++t) path.arc_sweep(p, kTwoPi);
    explore(sys, start, path, 1, o.tol, ext);
  }

  // A loop around all of them.
  if (factor != FactorKind::disc && !singular.empty()) {
    double reach = 0;
    for (const cplx p : singular) reach = std::max(reach, std::abs(p - base));
    const double rho = 2 * reach + 1;
    cplx lead = base + rho;
    double clearance = -1;
    for (int j = 0; j < 16; ++j) {
      const cplx cand = base + std::polar(rho, kTwoPi * (j + 0.25) / 16);
      const double c = segment_clearance(base, cand, singular);
      if (c > clearance) clearance = c, lead = cand;
    }
    PlanePath path(base);
    path.segment_to(lead);
    for (int t = 0; t < o.loop_turns; ++t) path.arc_sweep(base, kTwoPi);
    explore(sys, start, path, 1, o.tol, ext);
  }

  // Straight approaches to the poles.
  for (const cplx p : poles) {
    const double dist = std::abs(p - base);
    if (dist <= 1e-2) continue;
    const cplx d = (base - p) / dist;
    PlanePath path(base);
    path.segment_to(p + 1e-2 * d);
    path.segment_to(p + 1e-4 * d);
    explore(sys, start, path, 0, o.tol, ext);
  }
  return ext;
}

ComponentVerdict grade(const Extent& e) {
  ComponentVerdict v;
  v.small_extent = e.small;
  v.large_extent = e.large;
  const double ratio = e.small > 0 ? e.large / e.small : std::numeric_limits<double>::infinity();
  if (ratio >= 2.0) {
    v.kind = ComponentKind::coercive_sampled;
  } else if (ratio <= 1.05) {
    v.kind = ComponentKind::not_coercive;
    v.witness = "bounded primitive: image within radius " + std::to_string(e.large) + " of the base value";
  } else {
    v.kind = ComponentKind::undetermined;
  }
  return v;
}

cplx pick_base(const Rational& r, FactorKind factor) {
  for (double radius : {0.3, 0.55, 0.8, 1.7, 3.1})
    for (int j = 0; j < 7; ++j) {
      if (factor == FactorKind::disc && radius >= 1.0) continue;
      const cplx c = std::polar(radius, 0.41 + kTwoPi * j / 7);
      if (!r(c).is_finite_nonzero()) continue;
      bool clear = true;
      for (const auto& z : r.zeros()) clear = clear && std::abs(z.value - c) > 1e-3;
      for (const auto& p : r.poles()) clear = clear && std::abs(p.value - c) > 1e-3;
      if (clear) return c;
    }
  throw NoOrdinaryBasePoint("no regular base point for the primitive");
}

int severity(ComponentKind k) {
  switch (k) {
    case ComponentKind::not_coercive: return 3;
    case ComponentKind::undetermined: return 2;
    case ComponentKind::coercive_sampled: return 1;
    case ComponentKind::coercive_closed_form: return 0;
  }
  return 2;
}

OverallVerdict aggregate(const std::vector<ComponentVerdict>& cs) {
  int worst = 0;
  for (const auto& c : cs) worst = std::max(worst, severity(c.kind));
  if (worst == 3) return OverallVerdict::not_coercive;
  if (worst == 2) return OverallVerdict::undetermined;
  return OverallVerdict::coercive;
}

// α² = (A1 − Σ A_l / a_l) / b1.
Rational alpha_square(const WarpedMetric& m, const std::vector<cplx>& a) {
  Rational sum = Rational::constant(a[0]);
  for (int l = 1; l < m.dim(); ++l) sum = sum - a[static_cast<std::size_t>(l)] * (Rational::constant(1.0) / m.warp(l));
  return sum / m.b1();
}

std::optional<PrimitiveForm> closed_form(const Rational& alpha2) {
  if (!alpha2.is_polynomial() || alpha2.num().degree() > 2) return std::nullopt;
  const auto& p = alpha2.num();
  const cplx scale = alpha2.den()[0];
  try {
    return classify_quadratic_primitive(p[2] / scale, p[1] / scale, p[0] / scale);
  } catch (const DegenerateTriple&) {
    return std::nullopt;
  }
}

}  // namespace

const char* to_string(PrimitiveKind kind) {
  switch (kind) {
    case PrimitiveKind::log_form: return "log_form";
    case PrimitiveKind::sqrt_form: return "sqrt_form";
    case PrimitiveKind::linear_form: return "linear_form";
  }
  return "linear_form";
}

const char* to_string(ComponentKind kind) {
  switch (kind) {
    case ComponentKind::coercive_closed_form: return "coercive_closed_form";
    case ComponentKind::coercive_sampled: return "coercive_sampled";
    case ComponentKind::not_coercive: return "not_coercive";
    case ComponentKind::undetermined: return "undetermined";
  }
  return "undetermined";
}

const char* to_string(OverallVerdict v) {
  switch (v) {
    case OverallVerdict::coercive: return "coercive";
    case OverallVerdict::not_coercive: return "not_coercive";
    case OverallVerdict::undetermined: return "undetermined";
  }
  return "undetermined";
}

cplx PrimitiveForm::evaluate(cplx eta) const {
  switch (kind) {
    case PrimitiveKind::log_form: {
      const cplx w = eta * eta + (b / a) * eta + c / a;
      return std::log(eta + b / (2.0 * a) + std::sqrt(w)) / std::sqrt(a);
    }
    case PrimitiveKind::sqrt_form: return 2.0 / b * std::sqrt(b * eta + c);
    case PrimitiveKind::linear_form: return eta / std::sqrt(c);
  }
  return {};
}

cplx PrimitiveForm::integrand_root(cplx eta) const {
  switch (kind) {
    case PrimitiveKind::log_form: return std::sqrt(a) * std::sqrt(eta * eta + (b / a) * eta + c / a);
    case PrimitiveKind::sqrt_form: return std::sqrt(b * eta + c);
    case PrimitiveKind::linear_form: return std::sqrt(c);
  }
  return {};
}

PrimitiveForm classify_quadratic_primitive(cplx a, cplx b, cplx c) {
  const cplx zero(0);
  if (a == zero && b == zero && c == zero) throw AllZero("(a, b, c) = (0, 0, 0) has no primitive");
  PrimitiveForm f{PrimitiveKind::linear_form, a, b, c};
  if (a != zero) {
    if (f.delta() == zero) throw DegenerateTriple("a != 0 with zero discriminant is not covered");
    f.kind = PrimitiveKind::log_form;
  } else if (b != zero) {
    f.kind = PrimitiveKind::sqrt_form;
  }
  return f;
}

ComponentVerdict coercivity_sample(const Rational& integrand_square, FactorKind factor, cplx base,
                                   const SampleOptions& options) {
  validate_tolerance(options.tol);
  if (integrand_square.is_zero()) throw InvalidRational("integrand square must be nonzero");
  if (!integrand_square(base).is_finite_nonzero())
    throw NoOrdinaryBasePoint("integrand square must be finite and nonzero at the base");
  if (factor == FactorKind::disc && std::abs(base) >= 1.0) throw DomainViolation("base outside the unit disc");
  if (options.branch != 0) return grade(sample_branch(integrand_square, factor, base, options.branch, options));
  const auto plus = grade(sample_branch(integrand_square, factor, base, 1.0, options));
  const auto minus = grade(sample_branch(integrand_square, factor, base, -1.0, options));
  ComponentVerdict v = plus;
  if (plus.kind != minus.kind) {
    v.kind = ComponentKind::undetermined;
    v.witness.clear();
    v.note = "branches disagree";
  }
  return v;
}

ComponentVerdict coercivity_sample(const Rational& integrand_square, FactorKind factor,
                                   const SampleOptions& options) {
  return coercivity_sample(integrand_square, factor, pick_base(integrand_square, factor), options);
}

CoercivityVerdict coercivity_check_family(const WarpedMetric& m) {
  const Rational one = Rational::constant(1.0);
  for (int i = 0; i < m.dim(); ++i)
    if (m.factor(i) != FactorKind::plane) throw PatternMismatch("family needs plane factors");
  if (!(m.b1() == one)) throw PatternMismatch("family needs b1 = 1");
  for (int k = 1; k < m.dim(); ++k) {
    if (!(m.fiber(k) == one)) throw PatternMismatch("family needs f_k = 1");
    const Rational q = one / m.warp(k);
    if (!q.is_polynomial() || q.num().degree() > 2) throw PatternMismatch("family needs warps 1/q with deg q <= 2");
  }

  CoercivityVerdict out;
  out.base = Point::Zero(m.dim());
  const cplx generic[] = {{1.7, 0.3}, {0.6, -0.9}, {1.1, 0.8}, {-0.4, 1.3}, {0.9, -0.2}};
  std::optional<PrimitiveForm> form;
  for (int shift = 0; shift < 5 && !form; ++shift) {
    std::vector<cplx> a;
    for (int l = 0; l < m.dim(); ++l) a.push_back(generic[(l + shift) % 5] * (1.0 + 0.1 * l));
    try {
      form = closed_form(alpha_square(m, a));
    } catch (const AllZero&) {
    }
  }
  if (!form) throw PatternMismatch("no generic tuple gives a nondegenerate quadratic");
  ComponentVerdict first;
  first.component = 0;
  first.kind = ComponentKind::coercive_closed_form;
  first.form = form;
  out.components.push_back(first);
  for (int k = 1; k < m.dim(); ++k) {
    ComponentVerdict c;
    c.component = k;
    c.kind = ComponentKind::coercive_closed_form;
    c.form = classify_quadratic_primitive(0.0, 0.0, 1.0);
    out.components.push_back(c);
  }
  out.overall = aggregate(out.components);
  return out;
}

std::vector<Point> ordinary_base_points(const WarpedMetric& m, int count) {
  std::vector<cplx> cand;
  for (double radius : {0.3, 0.55, 0.8, 1.7, 3.1})
    for (int j = 0; j < 7; ++j) cand.push_back(std::polar(radius, 0.41 + kTwoPi * j / 7));
  const auto n = static_cast<int>(cand.size());
  std::vector<Point> out;
  for (int i = 0; i < n && static_cast<int>(out.size()) < count; ++i) {
    Point p(m.dim());
    bool inside = true;
    for (int c = 0; c < m.dim(); ++c) {
      // Discs take the inner rings only.
      int idx = (i + 3 * c) % n;
      if (m.factor(c) == FactorKind::disc) idx %= 21;
      p(c) = cand[static_cast<std::size_t>(idx)];
      inside = inside && (m.factor(c) != FactorKind::disc || std::abs(p(c)) < 1.0);
    }
    if (!inside || !m.is_ordinary(p)) continue;
    bool clear = true;
    for (const auto& l : m.loci()) clear = clear && std::abs(p(l.component) - l.point) > 1e-3;
    if (clear) out.push_back(p);
  }
  return out;
}

CoercivityVerdict coercivity_check(const WarpedMetric& m, int tuples, std::uint64_t seed,
                                   const std::optional<Point>& base, const SampleOptions& options) {
  if (tuples < 1) throw ConfigError("need at least one tuple");
  Point x0;
  if (base) {
    x0 = *base;
  } else {
    const auto found = ordinary_base_points(m, 1);
    if (found.empty()) throw NoOrdinaryBasePoint("no metrically ordinary point on the search grid");
    x0 = found.front();
  }
  if (!m.is_ordinary(x0)) throw SingularMetricPoint("base point is not metrically ordinary");

  CoercivityVerdict out;
  out.seed = seed;
  out.tuples = tuples;
  out.base = x0;

  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> radius2(0.01, 100.0), angle(0.0, kTwoPi);
  std::vector<ComponentVerdict> per_tuple;
  for (int t = 0; t < tuples; ++t) {
    Rational alpha2 = Rational::constant(1.0);
    for (int attempt = 0;; ++attempt) {
      if (attempt == 1000) throw NoOrdinaryBasePoint("no admissible tuple at this base point");
      std::vector<cplx> a;
      for (int l = 0; l < m.dim(); ++l) {
        const double r = std::sqrt(radius2(rng));
        a.push_back(std::polar(r, angle(rng)));
      }
      alpha2 = alpha_square(m, a);
      if (alpha2.is_zero()) continue;
      const auto at = alpha2(x0(0));
      if (at.is_finite_nonzero() && std::abs(at.value) > 1e-10) break;
    }
    ComponentVerdict v;
    const auto form = m.factor(0) == FactorKind::plane ? closed_form(alpha2) : std::nullopt;
    if (form) {
      v.kind = ComponentKind::coercive_closed_form;
      v.form = form;
    } else {
      v = coercivity_sample(Rational::constant(1.0) / alpha2, m.factor(0), x0(0), options);
    }
    per_tuple.push_back(v);
  }
  ComponentVerdict first = per_tuple.front();
  double worst_ratio = std::numeric_limits<double>::infinity();
  for (const auto& v : per_tuple) {
    if (severity(v.kind) > severity(first.kind)) first = v;
    if (v.small_extent > 0) worst_ratio = std::min(worst_ratio, v.large_extent / v.small_extent);
  }
  first.component = 0;
  if (std::isfinite(worst_ratio)) first.note = "smallest growth ratio over tuples " + std::to_string(worst_ratio);
  out.components.push_back(first);

  for (int k = 1; k < m.dim(); ++k) {
    ComponentVerdict v = coercivity_sample(m.fiber(k), m.factor(k), x0(k), options);
    v.component = k;
    out.components.push_back(v);
  }
  out.overall = aggregate(out.components);
  return out;
}

}  // namespace holgeo
