#include <cmath>
#include <numbers>
#include <random>

#include "doctest.h"
#include "holgeo/geodesic.hpp"
#include "oracles.hpp"

using namespace holgeo;

namespace {

const ComplexPoly eta{0.0, 1.0};
const Rational one = Rational::constant(1.0);

Point pt(std::initializer_list<cplx> xs) {
  Point p(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (auto x : xs) p(i++) = x;
  return p;
}

WarpedMetric exponential_metric() {
  return WarpedMetric({FactorKind::plane}, Rational(ComplexPoly{1.0}, eta * eta), {}, {});
}

GeodesicState final_geodesic(const WarpedMetric& m, const ContinuationRecord& rec) {
  return GeodesicSystem(m).from_ode(rec.final_state());
}

}  // namespace

TEST_CASE("geodesic_rhs examples") {
  const auto flat = WarpedMetric::flat({FactorKind::plane, FactorKind::plane});
  CHECK(geodesic_rhs(flat, {0.0, pt({1.0, 2.0}), pt({3.0, -1.0})}).norm() == 0.0);

  const auto acc = geodesic_rhs(exponential_metric(), {0.0, pt({1.0}), pt({1.0})});
  CHECK(std::abs(acc(0) - cplx(1.0)) < 1e-15);

  const WarpedMetric m({FactorKind::plane, FactorKind::plane}, one, {Rational::identity()}, {one});
  const auto acc2 = geodesic_rhs(m, {0.0, pt({1.0, 0.0}), pt({0.0, 1.0})});
  CHECK(std::abs(acc2(0) - cplx(0.5)) < 1e-15);
  CHECK(std::abs(acc2(1)) < 1e-15);

  CHECK_THROWS_AS(geodesic_rhs(m, {0.0, pt({0.0, 0.0}), pt({0.0, 1.0})}), SingularMetricPoint);
}

TEST_CASE("first_integrals examples") {
  const auto flat = WarpedMetric::flat({FactorKind::plane, FactorKind::plane});
  const auto a = first_integrals(flat, {0.0, pt({0.0, 0.0}), pt({1.0, 2.0})});
  CHECK(a.kind == IntegralCase::A);
  CHECK(std::abs(a.values(1) - cplx(4.0)) < 1e-15);
  CHECK(std::abs(a.values(0) - cplx(5.0)) < 1e-15);

  const cplx c(0.7, -0.2);
  const auto b = first_integrals(flat, {0.0, pt({c, 0.0}), pt({0.0, 3.0})});
  CHECK(b.kind == IntegralCase::B);
  CHECK(b.values(0) == c);
  CHECK(std::abs(b.values(1) - cplx(9.0)) < 1e-15);

  const auto z = first_integrals(flat, {0.0, pt({c, 1.0}), pt({0.0, 0.0})});
  CHECK(z.kind == IntegralCase::B);
  CHECK(z.values(1) == cplx(0));
}

TEST_CASE("spade relation holds at the defining state") {
  std::mt19937_64 rng(5);
  const auto m = oracle::random_metric(rng, 3);
  Point u(3), v(3);
  for (int i = 0; i < 3; ++i) {
    u(i) = oracle::random_complex(rng, 1.0);
    v(i) = oracle::random_complex(rng, 1.0);
  }
  REQUIRE(m.is_ordinary(u));
  const auto fi = first_integrals(m, {0.0, u, v});
  cplx rhs = fi.values(0);
  for (int l = 1; l < 3; ++l) rhs -= fi.values(l) / m.warp(l)(u(0)).value;
  CHECK(std::abs(v(0) * v(0) * m.b1()(u(0)).value - rhs) <= 1e-12 * (1.0 + std::abs(rhs)));
}

TEST_CASE("integrate_segment: flat metric is exact") {
  const auto flat = WarpedMetric::flat({FactorKind::plane, FactorKind::plane});
  const auto rec = integrate_segment(flat, {0.0, pt({0.0, 0.0}), pt({1.0, 0.0})}, 5.0, 1e-10);
  CHECK(rec.status.kind == StatusKind::completed);
  const auto end = final_geodesic(flat, rec);
  CHECK(std::abs(end.u(0) - cplx(5.0)) <= 1e-10);
  CHECK(std::abs(end.u(1)) <= 1e-10);
  CHECK(conservation_drift(flat, rec) <= 1e-12);
}

TEST_CASE("integrate_segment: exponential geodesic u = e^z") {
  const auto m = exponential_metric();
  const auto rec = integrate_segment(m, {0.0, pt({1.0}), pt({1.0})}, 1.0, 1e-10);
  REQUIRE(rec.status.kind == StatusKind::completed);
  CHECK(std::abs(final_geodesic(m, rec).u(0) - std::exp(1.0)) <= 1e-8);
  CHECK(conservation_drift(m, rec) <= 1e-8);
}

TEST_CASE("integrate_segment: disc exit") {
  const auto m = WarpedMetric::flat({FactorKind::disc, FactorKind::plane});
  const auto rec = integrate_segment(m, {0.0, pt({0.0, 0.0}), pt({1.0, 0.0})}, 2.0, 1e-10);
  CHECK(rec.status.kind == StatusKind::domain_exit);
  CHECK(rec.status.component == 0);
  CHECK(std::abs(rec.status.z - cplx(1.0)) <= 1e-6);
}

TEST_CASE("integrate_segment: singular locus and blow-up") {
  // u = 1/(1 − z) for b1 = 1/η⁴; v = u² crosses 1e8 first, at 1 − z = 1e-4.
  const WarpedMetric m({FactorKind::plane}, Rational(ComplexPoly{1.0}, eta * eta * eta * eta), {}, {});
  const auto rec = integrate_segment(m, {0.0, pt({1.0}), pt({1.0})}, 2.0, 1e-10);
  CHECK(rec.status.kind == StatusKind::blow_up);
  CHECK(std::abs(rec.status.z - cplx(1.0 - 1e-4)) < 1e-8);

  // u¹ = z through the degeneracy of a2 = η at u¹ = 0.
  const WarpedMetric d({FactorKind::plane, FactorKind::plane}, one, {Rational::identity()}, {one});
  const auto hit = integrate_segment(d, {-1.0, pt({-1.0, 0.0}), pt({1.0, 0.0})}, 1.0, 1e-10);
  CHECK(hit.status.kind == StatusKind::singular_locus_hit);
  REQUIRE(hit.status.locus.has_value());
  CHECK(hit.status.locus->coefficient == "a2");
  CHECK(std::abs(hit.status.z) < 1e-5);
}

TEST_CASE("invalid tolerance") {
  const auto flat = WarpedMetric::flat({FactorKind::plane});
  CHECK_THROWS_AS(integrate_segment(flat, {0.0, pt({0.0}), pt({1.0})}, 1.0, 1e-2), InvalidTolerance);
  CHECK_THROWS_AS(integrate_segment(flat, {0.0, pt({0.0}), pt({1.0})}, 1.0, 1e-13), InvalidTolerance);
}

TEST_CASE("conservation_drift of a constant geodesic is zero") {
  std::mt19937_64 rng(9);
  const auto m = oracle::random_metric(rng, 2);
  Point u = pt({0.3, 0.2});
  REQUIRE(m.is_ordinary(u));
  const auto rec = integrate_segment(m, {0.0, u, pt({0.0, 0.0})}, cplx(2.0, 1.0), 1e-10);
  CHECK(rec.status.kind == StatusKind::completed);
  CHECK(conservation_drift(m, rec) == 0.0);
}

TEST_CASE("sphere factor: geodesic through the point at infinity") {
  // b1 = 4/(1+η²)²: (u')² b1 = 4 from u(0)=0, u'(0)=1, so u = tan z.
  const ComplexPoly q{1.0, 0.0, 1.0};
  const WarpedMetric m({FactorKind::sphere}, Rational(ComplexPoly{4.0}, q * q), {}, {});
  const auto rec = integrate_segment(m, {0.0, pt({0.0}), pt({1.0})}, 2.0, 1e-10);
  REQUIRE(rec.status.kind == StatusKind::completed);
  const auto end = final_geodesic(m, rec);
  CHECK(std::abs(end.u(0) - std::tan(2.0)) <= 1e-7);
  CHECK(conservation_drift(m, rec) <= 1e-8);
}

TEST_CASE("property: flat metric straight lines") {
  std::mt19937_64 rng(17);
  const auto flat = WarpedMetric::flat({FactorKind::plane, FactorKind::plane, FactorKind::plane});
  for (int trial = 0; trial < 20; ++trial) {
    Point u(3), v(3);
    for (int i = 0; i < 3; ++i) {
      u(i) = oracle::random_complex(rng, 2.0);
      v(i) = oracle::random_complex(rng, 1.0);
    }
    const cplx target = std::polar(10.0 * std::uniform_real_distribution<double>(0, 1)(rng),
                                   std::uniform_real_distribution<double>(0, 6.28)(rng));
    const auto rec = integrate_segment(flat, {0.0, u, v}, target, 1e-10);
    REQUIRE(rec.status.kind == StatusKind::completed);
    for (const auto& s : rec.samples) {
      CHECK((s.y.head(3) - (u + v * s.z)).cwiseAbs().maxCoeff() <= 1e-10);
      CHECK((s.y.tail(3) - v).cwiseAbs().maxCoeff() <= 1e-10);
    }
  }
}

TEST_CASE("property: rhs equals -Γ v v") {
  std::mt19937_64 rng(23);
  int checked = 0;
  for (int trial = 0; trial < 100; ++trial) {
    const auto m = oracle::random_metric(rng, 3);
    Point u(3), v(3);
    for (int i = 0; i < 3; ++i) {
      u(i) = oracle::random_complex(rng, 2.0);
      v(i) = oracle::random_complex(rng, 1.0);
    }
    if (!m.is_ordinary(u)) continue;
    const auto acc = geodesic_rhs(m, {0.0, u, v});
    const auto gam = m.christoffel(u);
    for (int k = 0; k < 3; ++k) {
      cplx want = 0;
      for (int i = 0; i < 3; ++i)
        for (int j = 0; j < 3; ++j) want -= gam(k, i, j) * v(i) * v(j);
      CHECK(std::abs(acc(k) - want) <= 1e-12 * (1.0 + std::abs(want)));
    }
    ++checked;
  }
  CHECK(checked >= 90);
}

TEST_CASE("property: drift, time reversal and case-B fidelity on random trajectories") {
  std::mt19937_64 rng(31);
  const double tol = 1e-10;
  int completed = 0;
  for (int trial = 0; trial < 60 && completed < 25; ++trial) {
    const auto m = oracle::random_metric(rng, 2);
    Point u(2), v(2);
    for (int i = 0; i < 2; ++i) {
      u(i) = oracle::random_complex(rng, 1.0);
      v(i) = oracle::random_complex(rng, 0.5);
    }
    if (!m.is_ordinary(u)) continue;
    const cplx target = oracle::random_complex(rng, 2.0);
    const GeodesicState s{0.0, u, v};
    const auto rec = integrate_segment(m, s, target, tol);
    if (rec.status.kind != StatusKind::completed) continue;
    ++completed;
    const double length = std::abs(target);
    CHECK(conservation_drift(m, rec) <= 100 * tol * (1 + length));

    const GeodesicSystem sys(m);
    const auto end = sys.from_ode(rec.final_state());
    const auto back = integrate_segment(m, end, 0.0, tol);
    if (back.status.kind == StatusKind::completed) {
      const auto home = sys.from_ode(back.final_state());
      const double scale = 1.0 + std::max(u.cwiseAbs().maxCoeff(), v.cwiseAbs().maxCoeff());
      CHECK((home.u - u).cwiseAbs().maxCoeff() <= 10 * tol * (1 + 2 * length) * scale);
      CHECK((home.v - v).cwiseAbs().maxCoeff() <= 10 * tol * (1 + 2 * length) * scale);
    }
  }
  CHECK(completed >= 10);
}

TEST_CASE("property: u1 stays constant when v1 = 0 and every warp is critical there") {
  // ü¹ = Σ a'f/(2 b1) (vᵏ)², so u¹ ≡ c solves the system exactly when a'(c) = 0.
  std::mt19937_64 rng(37);
  const double tol = 1e-10;
  int completed = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const cplx c = oracle::random_complex(rng, 1.0);
    const cplx alpha = oracle::random_complex(rng, 1.0), beta = 1.0 + oracle::random_complex(rng, 0.3);
    const ComplexPoly shifted = ComplexPoly::linear_factor(c);
    const Rational a = Rational::polynomial(alpha * (shifted * shifted) + ComplexPoly{beta});
    const auto base = oracle::random_metric(rng, 2);
    const WarpedMetric m({FactorKind::plane, FactorKind::plane}, base.b1(), {a}, {base.fiber(1)});
    const Point u = pt({c, oracle::random_complex(rng, 1.0)});
    const Point v = pt({0.0, oracle::random_complex(rng, 0.5)});
    if (!m.is_ordinary(u)) continue;
    const auto rec = integrate_segment(m, {0.0, u, v}, oracle::random_complex(rng, 2.0), tol);
    if (rec.status.kind != StatusKind::completed) continue;
    ++completed;
    for (const auto& smp : rec.samples) CHECK(std::abs(smp.y(0) - u(0)) <= 10 * tol);
  }
  CHECK(completed >= 5);
}
