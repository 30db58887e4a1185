#include <algorithm>
#include <random>

#include "doctest.h"
#include "holgeo/rational.hpp"
#include "oracles.hpp"

using namespace holgeo;

namespace {

const ComplexPoly eta{0.0, 1.0};
const ComplexPoly one{1.0};

bool contains(const std::vector<Root<double>>& roots, cplx z, int mult, double tol) {
  return std::any_of(roots.begin(), roots.end(),
                     [&](const Root<double>& r) { return std::abs(r.value - z) <= tol && r.multiplicity == mult; });
}

}  // namespace

TEST_CASE("rat_eval on simple functions") {
  const Rational inv(one, eta);
  CHECK(inv(2.0).value == cplx(0.5));
  CHECK_FALSE(inv(2.0).infinite);
  CHECK(inv(0.0).infinite);

  const Rational sq = Rational::polynomial(eta * eta);
  CHECK(sq(0.0).is_zero());
}

TEST_CASE("constructor reduces common factors") {
  // (η² − 1)/(η − 1) = η + 1
  const Rational r(ComplexPoly{-1.0, 0.0, 1.0}, ComplexPoly{-1.0, 1.0});
  CHECK(r.den().degree() == 0);
  CHECK(std::abs(r(3.0).value - cplx(4.0)) < 1e-12);
  CHECK_FALSE(r(1.0).infinite);

  // Reduction is the identity on reduced input.
  const Rational again(r.num(), r.den());
  CHECK(again == r);
}

TEST_CASE("zero denominator is rejected") {
  CHECK_THROWS_AS(Rational(one, ComplexPoly{}), InvalidRational);
}

TEST_CASE("rat_derivative examples") {
  const Rational sq = Rational::polynomial(eta * eta);
  const Rational dsq = sq.derivative();
  CHECK(dsq.is_polynomial());
  CHECK(std::abs(dsq(1.5).value - cplx(3.0)) < 1e-14);

  const Rational inv(one, eta);
  const Rational dinv = inv.derivative();
  for (cplx z : {cplx(2.0), cplx(0.3, -1.0)}) CHECK(std::abs(dinv(z).value + 1.0 / (z * z)) < 1e-13);

  // (η+1)/(η−1) → −2/(η−1)², checked by finite differences at 3 random points
  const Rational r(ComplexPoly{1.0, 1.0}, ComplexPoly{-1.0, 1.0});
  const Rational dr = r.derivative();
  std::mt19937_64 rng(7);
  for (int i = 0; i < 3; ++i) {
    const cplx z = oracle::random_complex(rng, 3.0);
    const auto f = [&](cplx x) { return oracle::eval_direct(r, x); };
    const cplx fd = oracle::derivative_fd(f, z, 1e-3 * (1.0 + std::abs(z)));
    const cplx got = dr(z).value;
    CHECK(std::abs(got - fd) <= 1e-8 * std::abs(fd));
    CHECK(std::abs(got - (-2.0 / ((z - 1.0) * (z - 1.0)))) <= 1e-12 * std::abs(got));
  }
}

TEST_CASE("rat_singular_points examples") {
  const auto p1 = singular_points(Rational(one, eta));
  REQUIRE(p1.poles.size() == 1);
  CHECK(p1.poles[0].value == cplx(0));
  CHECK(p1.zeros.empty());

  const auto p2 = singular_points(Rational::polynomial(ComplexPoly{-1.0, 0.0, 1.0}));
  CHECK(p2.zeros.size() == 2);
  CHECK(contains(p2.zeros, 1.0, 1, 1e-12));
  CHECK(contains(p2.zeros, -1.0, 1, 1e-12));

  // (η²+1)/(η²−2η+1): zeros ±i, double pole at 1
  const ComplexPoly num{1.0, 0.0, 1.0}, den{1.0, -2.0, 1.0};
  const auto p3 = singular_points(Rational(num, den));
  CHECK(contains(p3.zeros, cplx(0, 1), 1, 1e-12));
  CHECK(contains(p3.zeros, cplx(0, -1), 1, 1e-12));
  REQUIRE(p3.poles.size() == 1);
  CHECK(contains(p3.poles, 1.0, 2, 1e-12));
  for (const auto& z : p3.zeros) CHECK(std::abs(num(z.value)) <= 1e-12);
  CHECK(std::abs(den(p3.poles[0].value)) <= 1e-12);
}

TEST_CASE("multiple roots are merged with multiplicity") {
  // (η − 0.5i)³ (η + 2)
  ComplexPoly p = ComplexPoly::linear_factor({0, 0.5});
  p = p * p * p * ComplexPoly::linear_factor(-2.0);
  const auto roots = find_roots(p);
  CHECK(contains(roots, cplx(0, 0.5), 3, 1e-9));
  CHECK(contains(roots, cplx(-2.0), 1, 1e-12));
}

TEST_CASE("property: derivative agrees with centred differences") {
  std::mt19937_64 rng(11);
  int checked = 0;
  for (int trial = 0; trial < 20; ++trial) {
    const Rational r = oracle::random_rational(rng);
    const Rational dr = r.derivative();
    const auto poles = r.poles();
    for (int i = 0; i < 100; ++i) {
      const cplx z = oracle::random_complex(rng, 3.0);
      bool near_pole = false;
      for (const auto& p : poles) near_pole |= std::abs(z - p.value) < 0.2;
      if (near_pole) continue;
      const auto f = [&](cplx x) { return oracle::eval_direct(r, x); };
      const cplx fd = oracle::derivative_fd2(f, z, 1e-6 * (1.0 + std::abs(z)));
      const cplx got = dr(z).value;
      CHECK(std::abs(got - fd) <= 1e-6 * (1.0 + std::abs(got)));
      ++checked;
    }
  }
  CHECK(checked > 1000);
}

TEST_CASE("property: root residuals and reduction idempotence") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 200; ++trial) {
    std::uniform_int_distribution<int> deg(1, 8);
    const ComplexPoly p = oracle::random_poly(rng, deg(rng));
    int total = 0;
    for (const auto& r : find_roots(p)) {
      const double bound = 1e-10 * p.norm1() * std::pow(std::max(1.0, std::abs(r.value)), p.degree());
      CHECK(std::abs(p(r.value)) <= bound);
      total += r.multiplicity;
    }
    CHECK(total == p.degree());

    const Rational q = oracle::random_rational(rng);
    CHECK(Rational(q.num(), q.den()) == q);
  }
}

TEST_CASE("reciprocal substitution") {
  // r = (η + 2)/(η² − 3): r(1/w) w^-4
  const Rational r(ComplexPoly{2.0, 1.0}, ComplexPoly{-3.0, 0.0, 1.0});
  const Rational s = r.substitute_reciprocal(-4);
  for (cplx w : {cplx(0.3, 0.1), cplx(-2.0, 1.0)}) {
    const cplx expect = oracle::eval_direct(r, 1.0 / w) / std::pow(w, 4);
    CHECK(std::abs(s(w).value - expect) <= 1e-12 * std::abs(expect));
  }
}
