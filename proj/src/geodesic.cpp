#include "holgeo/geodesic.hpp"

#include <algorithm>
#include <cmath>

#include "holgeo/errors.hpp"

namespace holgeo {

namespace {

Eigen::VectorXcd acceleration(const WarpedMetric& m, const Eigen::VectorXcd& u, const Eigen::VectorXcd& v) {
  const int n = m.dim();
  Eigen::VectorXcd acc(n);
  const cplx x = u(0);
  const cplx b = m.b1_factored().value(x);
  cplx a0 = -0.5 * m.b1_factored().log_derivative(x) * v(0) * v(0);
  for (int k = 1; k < n; ++k) {
    const auto& a = m.warp_factored(k);
    const auto& f = m.fiber_factored(k);
    const cplx la = a.log_derivative(x);
    a0 += 0.5 * la * a.value(x) * f.value(u(k)) / b * v(k) * v(k);
    acc(k) = -0.5 * f.log_derivative(u(k)) * v(k) * v(k) - la * v(k) * v(0);
  }
  acc(0) = a0;
  return acc;
}

}  // namespace

GeodesicSystem::GeodesicSystem(WarpedMetric metric, GeodesicOptions options)
    : metric_(std::move(metric)), options_(options) {
  for (int i = 0; i < metric_.dim(); ++i)
    if (metric_.factor(i) == FactorKind::sphere) spheres_.push_back(i);
  if (spheres_.size() > 8) throw InvalidMetric("at most 8 sphere factors are supported");
  const std::size_t combos = std::size_t{1} << spheres_.size();
  charts_.reserve(combos);
  for (std::size_t c = 0; c < combos; ++c) {
    ChartMask mask = 0;
    for (std::size_t j = 0; j < spheres_.size(); ++j)
      if ((c >> j) & 1u) mask |= ChartMask{1} << spheres_[j];
    charts_.push_back(metric_.in_chart(mask));
  }
}

const WarpedMetric& GeodesicSystem::chart_metric(ChartMask chart) const {
  std::size_t idx = 0;
  for (std::size_t j = 0; j < spheres_.size(); ++j)
    if (in_reciprocal_chart(chart, spheres_[j])) idx |= std::size_t{1} << j;
  return charts_[idx];
}

Eigen::VectorXcd GeodesicSystem::rhs(cplx, const Eigen::VectorXcd& y, ChartMask chart) const {
  const int n = metric_.dim();
  Eigen::VectorXcd out(2 * n);
  out.head(n) = y.tail(n);
  out.tail(n) = acceleration(chart_metric(chart), y.head(n), y.tail(n));
  return out;
}

std::optional<TerminalStatus> GeodesicSystem::check(cplx z, const Eigen::VectorXcd& y, ChartMask chart) const {
  const int n = metric_.dim();
  for (int i = 0; i < n; ++i) {
    if (metric_.factor(i) == FactorKind::disc && std::abs(y(i)) >= 1.0) {
      TerminalStatus s;
      s.kind = StatusKind::domain_exit;
      s.z = z;
      s.component = i;
      return s;
    }
  }
  for (const auto& locus : chart_metric(chart).loci()) {
    const cplx u = y(locus.component);
    if (std::abs(u - locus.point) <= options_.guard_rel * (1.0 + std::abs(u))) {
      TerminalStatus s;
      s.kind = StatusKind::singular_locus_hit;
      s.z = z;
      s.component = locus.component;
      s.locus = locus;
      return s;
    }
  }
  return OdeSystem::check(z, y, chart);
}

std::optional<TerminalStatus> GeodesicSystem::check_step(cplx z, const Eigen::VectorXcd& y0,
                                                         const Eigen::VectorXcd& y1, ChartMask chart) const {
  for (const auto& locus : chart_metric(chart).loci()) {
    const cplx a = y0(locus.component), b = y1(locus.component);
    const cplx d = b - a;
    const double len2 = std::norm(d);
    if (len2 == 0) continue;
    // closest point of the chord a→b to the locus
    const double t = std::clamp(std::real((locus.point - a) * std::conj(d)) / len2, 0.0, 1.0);
    const cplx u = a + t * d;
    if (std::abs(u - locus.point) <= options_.guard_rel * (1.0 + std::abs(u))) {
      TerminalStatus s;
      s.kind = StatusKind::singular_locus_hit;
      s.z = z;
      s.component = locus.component;
      s.locus = locus;
      return s;
    }
  }
  return std::nullopt;
}

void GeodesicSystem::rechart(Eigen::VectorXcd& y, ChartMask& chart) const {
  const int n = metric_.dim();
  for (int i : spheres_) {
    const cplx u = y(i);
    if (std::abs(u) <= options_.sphere_switch) continue;
    // w = 1/u, dw/dz = -w² du/dz; the same formula maps back.
    const cplx w = 1.0 / u;
    y(i) = w;
    y(n + i) = -w * w * y(n + i);
    chart ^= ChartMask{1} << i;
  }
}

OdeState GeodesicSystem::to_ode(const GeodesicState& s) const {
  const int n = metric_.dim();
  if (s.u.size() != n || s.v.size() != n) throw DomainViolation("state has the wrong number of components");
  OdeState out;
  out.z = s.z;
  out.y.resize(2 * n);
  out.y.head(n) = s.u;
  out.y.tail(n) = s.v;
  rechart(out.y, out.chart);
  return out;
}

GeodesicState GeodesicSystem::from_ode(const OdeState& s) const {
  const int n = metric_.dim();
  GeodesicState out{s.z, s.y.head(n), s.y.tail(n)};
  for (int i = 0; i < n; ++i) {
    if (!in_reciprocal_chart(s.chart, i)) continue;
    const cplx w = s.y(i);
    if (w == cplx(0)) {
      const double inf = std::numeric_limits<double>::infinity();
      out.u(i) = {inf, 0};
      out.v(i) = {inf, 0};
    } else {
      out.u(i) = 1.0 / w;
      out.v(i) = -s.y(n + i) / (w * w);
    }
  }
  return out;
}

Point geodesic_rhs(const WarpedMetric& m, const GeodesicState& s) {
  if (!m.is_ordinary(s.u)) throw SingularMetricPoint("geodesic equations evaluated off the ordinary set");
  return acceleration(m, s.u, s.v);
}

FirstIntegrals first_integrals(const WarpedMetric& m, const GeodesicState& s, IntegralCase kind) {
  if (!m.is_ordinary(s.u)) throw SingularMetricPoint("first integrals evaluated off the ordinary set");
  const int n = m.dim();
  FirstIntegrals out;
  out.kind = kind;
  out.values.resize(n);
  if (kind == IntegralCase::A) {
    cplx a1 = s.v(0) * s.v(0) * m.b1().value(s.u(0));
    for (int k = 1; k < n; ++k) {
      const cplx a = m.warp(k).value(s.u(0));
      out.values(k) = s.v(k) * s.v(k) * m.fiber(k).value(s.u(k)) * a * a;
      a1 += out.values(k) / a;
    }
    out.values(0) = a1;
  } else {
    out.values(0) = s.u(0);
    for (int k = 1; k < n; ++k) out.values(k) = s.v(k) * s.v(k) * m.fiber(k).value(s.u(k));
  }
  return out;
}

FirstIntegrals first_integrals(const WarpedMetric& m, const GeodesicState& s) {
  return first_integrals(m, s, s.v(0) == cplx(0) ? IntegralCase::B : IntegralCase::A);
}

ContinuationRecord integrate_segment(const GeodesicSystem& system, const GeodesicState& s, cplx z_target,
                                     double tol, bool record_samples) {
  validate_tolerance(tol);
  if (!system.metric().is_ordinary(s.u))
    throw SingularMetricPoint("integration must start at a metrically ordinary point");
  PlanePath path(s.z);
  path.segment_to(z_target);
  IntegratorOptions opts;
  opts.tol = tol;
  opts.record_samples = record_samples;
  return integrate_path(system, system.to_ode(s), path, opts);
}

ContinuationRecord integrate_segment(const WarpedMetric& m, const GeodesicState& s, cplx z_target, double tol,
                                     const GeodesicOptions& options) {
  validate_tolerance(tol);
  const GeodesicSystem system(m, options);
  return integrate_segment(system, s, z_target, tol);
}

double conservation_drift(const WarpedMetric& m, const ContinuationRecord& rec) {
  if (rec.samples.empty()) return 0.0;
  const GeodesicSystem system(m);
  const int n = m.dim();

  auto integrals = [&](const OdeState& os, IntegralCase kind) {
    const GeodesicState cs{os.z, os.y.head(n), os.y.tail(n)};
    FirstIntegrals fi = first_integrals(system.chart_metric(os.chart), cs, kind);
    // A_1 = u¹ in case B is a coordinate, not an invariant.
    if (kind == IntegralCase::B && in_reciprocal_chart(os.chart, 0)) fi.values(0) = 1.0 / fi.values(0);
    return fi.values;
  };

  const OdeState& first = rec.samples.front();
  const IntegralCase kind = first.y(n) == cplx(0) ? IntegralCase::B : IntegralCase::A;
  const Eigen::VectorXcd ref = integrals(first, kind);
  double drift = 0.0;
  for (const auto& sample : rec.samples) {
    const Eigen::VectorXcd cur = integrals(sample, kind);
    for (int k = 0; k < n; ++k)
      drift = std::max(drift, std::abs(cur(k) - ref(k)) / (1.0 + std::abs(ref(k))));
  }
  return drift;
}

}  // namespace holgeo
