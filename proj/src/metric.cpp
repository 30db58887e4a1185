#include "holgeo/metric.hpp"

#include <sstream>

namespace holgeo {

std::string to_string(FactorKind kind) {
  switch (kind) {
    case FactorKind::disc: return "disc";
    case FactorKind::plane: return "plane";
    case FactorKind::sphere: return "sphere";
  }
  return "plane";
}

FactorKind factor_kind_from_string(const std::string& name) {
  if (name == "disc") return FactorKind::disc;
  if (name == "plane") return FactorKind::plane;
  if (name == "sphere") return FactorKind::sphere;
  throw InvalidMetric("unknown factor kind '" + name + "'");
}

cplx Christoffel::operator()(int upper, int i, int j) const {
  const int n = dim();
  if (upper < 0 || upper >= n || i < 0 || i >= n || j < 0 || j >= n) return {};
  if (upper == 0) {
    if (i == 0 && j == 0) return g1_11;
    if (i == j) return g1_kk(i - 1);
    return {};
  }
  const int k = upper;
  if (i == k && j == k) return gk_kk(k - 1);
  if ((i == 0 && j == k) || (i == k && j == 0)) return gk_1k(k - 1);
  return {};
}

namespace {

void append_loci(std::vector<LocusId>& out, int component, const Rational& r, const std::string& name) {
  for (const auto& z : r.zeros()) out.push_back({component, z.value, false, name});
  for (const auto& p : r.poles()) out.push_back({component, p.value, true, name});
}

cplx ipow(cplx x, int m) {
  cplx r = 1;
  for (int i = 0; i < m; ++i) r *= x;
  return r;
}

}  // namespace

FactoredRational::FactoredRational(const Rational& r)
    : lead_(r.num().leading() / r.den().leading()), zeros_(r.zeros()), poles_(r.poles()) {}

cplx FactoredRational::value(cplx x) const {
  cplx v = lead_;
  for (const auto& z : zeros_) v *= ipow(x - z.value, z.multiplicity);
  for (const auto& p : poles_) v /= ipow(x - p.value, p.multiplicity);
  return v;
}

cplx FactoredRational::log_derivative(cplx x) const {
  cplx s = 0;
  for (const auto& z : zeros_) s += static_cast<double>(z.multiplicity) / (x - z.value);
  for (const auto& p : poles_) s -= static_cast<double>(p.multiplicity) / (x - p.value);
  return s;
}

WarpedMetric::WarpedMetric(std::vector<FactorKind> factors, Rational b1, std::vector<Rational> warp,
                           std::vector<Rational> fiber)
    : factors_(std::move(factors)), b1_(std::move(b1)), warp_(std::move(warp)), fiber_(std::move(fiber)) {
  if (factors_.empty()) throw InvalidMetric("a warped metric needs at least one factor");
  if (factors_.size() > 16) throw InvalidMetric("at most 16 factors are supported");
  const std::size_t fibres = factors_.size() - 1;
  if (warp_.size() != fibres || fiber_.size() != fibres) {
    std::ostringstream os;
    os << "expected " << fibres << " warping and fibre coefficients, got " << warp_.size() << " and "
       << fiber_.size();
    throw InvalidMetric(os.str());
  }
  if (b1_.is_zero()) throw InvalidMetric("b1 must be a nonzero function");
  for (std::size_t k = 0; k < fibres; ++k)
    if (warp_[k].is_zero() || fiber_[k].is_zero())
      throw InvalidMetric("warping and fibre coefficients must be nonzero functions");

  b1p_ = b1_.derivative();
  for (const auto& a : warp_) warpp_.push_back(a.derivative());
  for (const auto& f : fiber_) fiberp_.push_back(f.derivative());

  b1f_ = FactoredRational(b1_);
  for (const auto& a : warp_) warpf_.emplace_back(a);
  for (const auto& f : fiber_) fiberf_.emplace_back(f);

  append_loci(loci_, 0, b1_, "b1");
  for (std::size_t k = 0; k < fibres; ++k) {
    append_loci(loci_, 0, warp_[k], "a" + std::to_string(k + 2));
    append_loci(loci_, static_cast<int>(k + 1), fiber_[k], "f" + std::to_string(k + 2));
  }
}

WarpedMetric WarpedMetric::flat(std::vector<FactorKind> factors) {
  const std::size_t fibres = factors.empty() ? 0 : factors.size() - 1;
  const Rational one = Rational::constant(1.0);
  return WarpedMetric(std::move(factors), one, std::vector<Rational>(fibres, one),
                      std::vector<Rational>(fibres, one));
}

WarpedMetric WarpedMetric::in_chart(ChartMask chart) const {
  if (chart == 0) return *this;
  for (int i = 0; i < dim(); ++i)
    if (in_reciprocal_chart(chart, i) && factor(i) != FactorKind::sphere)
      throw InvalidMetric("only sphere factors have a reciprocal chart");
  Rational b1 = b1_;
  std::vector<Rational> warp = warp_, fiber = fiber_;
  if (in_reciprocal_chart(chart, 0)) {
    // du = -dw/w², so a quadratic-form coefficient picks up w^-4.
    b1 = b1.substitute_reciprocal(-4);
    for (auto& a : warp) a = a.substitute_reciprocal(0);
  }
  for (int k = 1; k < dim(); ++k)
    if (in_reciprocal_chart(chart, k)) fiber[static_cast<std::size_t>(k - 1)] = fiber[static_cast<std::size_t>(k - 1)].substitute_reciprocal(-4);
  return WarpedMetric(factors_, std::move(b1), std::move(warp), std::move(fiber));
}

void WarpedMetric::check_domain(const Point& u) const {
  if (u.size() != dim()) throw DomainViolation("point has the wrong number of components");
  for (int i = 0; i < dim(); ++i)
    if (factor(i) == FactorKind::disc && std::abs(u(i)) >= 1.0)
      throw DomainViolation("disc coordinate " + std::to_string(i + 1) + " has modulus >= 1");
}

std::vector<ExtComplex> WarpedMetric::eval(const Point& u) const {
  check_domain(u);
  std::vector<ExtComplex> g;
  g.reserve(static_cast<std::size_t>(dim()));
  g.push_back(b1_(u(0)));
  for (int k = 1; k < dim(); ++k) {
    const ExtComplex a = warp(k)(u(0));
    const ExtComplex f = fiber(k)(u(k));
    if (a.infinite || f.infinite)
      g.push_back(ExtComplex::infinity());
    else
      g.push_back({a.value * f.value, false});
  }
  return g;
}

bool WarpedMetric::is_ordinary(const Point& u) const {
  check_domain(u);
  if (!b1_(u(0)).is_finite_nonzero()) return false;
  for (int k = 1; k < dim(); ++k) {
    if (!warp(k)(u(0)).is_finite_nonzero()) return false;
    if (!fiber(k)(u(k)).is_finite_nonzero()) return false;
  }
  for (const auto& locus : loci_) {
    const cplx x = u(locus.component);
    if (std::abs(x - locus.point) <= 1e-12 * (1.0 + std::abs(x))) return false;
  }
  return true;
}

Christoffel WarpedMetric::christoffel(const Point& u) const {
  if (!is_ordinary(u)) throw SingularMetricPoint("Christoffel symbols requested off the ordinary set");
  const int n = dim();
  Christoffel c;
  const cplx x = u(0);
  const cplx b = b1f_.value(x);
  c.g1_11 = 0.5 * b1f_.log_derivative(x);
  c.g1_kk.resize(n - 1);
  c.gk_kk.resize(n - 1);
  c.gk_1k.resize(n - 1);
  for (int k = 1; k < n; ++k) {
    const auto& a = warpf_[static_cast<std::size_t>(k - 1)];
    const auto& f = fiberf_[static_cast<std::size_t>(k - 1)];
    const cplx la = a.log_derivative(x);
    // a' = (a'/a)·a
    c.g1_kk(k - 1) = -0.5 * la * a.value(x) * f.value(u(k)) / b;
    c.gk_kk(k - 1) = 0.5 * f.log_derivative(u(k));
    c.gk_1k(k - 1) = 0.5 * la;
  }
  return c;
}

}  // namespace holgeo
