#pragma once

// Complex polynomials and rational functions of one variable.
//
// Coefficients are stored in ascending powers. A RationalFn is always kept in
// reduced form: numerator and denominator share no root closer than
// root_separation(). Zero/pole sets are exact in the sense that evaluation
// reports infinity only where the reduced denominator evaluates to exactly 0.

#include <algorithm>
#include <cmath>
#include <complex>
#include <initializer_list>
#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include "holgeo/errors.hpp"

namespace holgeo {

/// A point of the extended complex plane C ∪ {∞}.
template <typename T>
struct Extended {
  std::complex<T> value{};
  bool infinite = false;

  static Extended infinity() { return {std::complex<T>(0), true}; }
  bool is_zero() const { return !infinite && value == std::complex<T>(0); }
  bool is_finite_nonzero() const { return !infinite && value != std::complex<T>(0); }
};

template <typename T>
class Polynomial {
 public:
  using Scalar = std::complex<T>;

  Polynomial() : coeffs_{Scalar(0)} {}
  Polynomial(std::initializer_list<Scalar> c) : coeffs_(c) { trim(); }
  explicit Polynomial(std::vector<Scalar> c) : coeffs_(std::move(c)) { trim(); }

  static Polynomial constant(Scalar c) { return Polynomial({c}); }
  static Polynomial monomial(int power, Scalar c = Scalar(1)) {
    std::vector<Scalar> v(static_cast<std::size_t>(power) + 1, Scalar(0));
    v.back() = c;
    return Polynomial(std::move(v));
  }
  /// (η − r)
  static Polynomial linear_factor(Scalar r) { return Polynomial({-r, Scalar(1)}); }

  const std::vector<Scalar>& coeffs() const { return coeffs_; }
  int degree() const { return static_cast<int>(coeffs_.size()) - 1; }
  bool is_zero() const { return coeffs_.size() == 1 && coeffs_[0] == Scalar(0); }
  bool is_constant() const { return coeffs_.size() == 1; }
  Scalar leading() const { return coeffs_.back(); }
  Scalar operator[](int i) const {
    return i >= 0 && i <= degree() ? coeffs_[static_cast<std::size_t>(i)] : Scalar(0);
  }

  Scalar operator()(Scalar z) const {
    Scalar acc(0);
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * z + *it;
    return acc;
  }

  /// Σ|c_k|, the scale used by residual bounds.
  T norm1() const {
    T s = 0;
    for (const auto& c : coeffs_) s += std::abs(c);
    return s;
  }

  /// Σ|c_k||z|^k: bound on the magnitude of the terms summed by Horner at z.
  T abs_eval(Scalar z) const {
    T r = std::abs(z), acc = 0;
    for (auto it = coeffs_.rbegin(); it != coeffs_.rend(); ++it) acc = acc * r + std::abs(*it);
    return acc;
  }

  Polynomial derivative() const {
    if (degree() == 0) return Polynomial();
    std::vector<Scalar> d(coeffs_.size() - 1);
    for (std::size_t k = 1; k < coeffs_.size(); ++k) d[k - 1] = coeffs_[k] * T(k);
    return Polynomial(std::move(d));
  }

  Polynomial derivative(int order) const {
    Polynomial p = *this;
    for (int i = 0; i < order; ++i) p = p.derivative();
    return p;
  }

  /// η^n · p(1/η); requires n ≥ degree().
  Polynomial reversed(int n) const {
    std::vector<Scalar> r(static_cast<std::size_t>(n) + 1, Scalar(0));
    for (int k = 0; k <= degree(); ++k) r[static_cast<std::size_t>(n - k)] = coeffs_[static_cast<std::size_t>(k)];
    return Polynomial(std::move(r));
  }

  /// Synthetic division by (η − r); the remainder is discarded.
  Polynomial deflate(Scalar r) const {
    if (degree() == 0) return Polynomial();
    std::vector<Scalar> q(coeffs_.size() - 1);
    Scalar carry(0);
    for (int k = degree(); k >= 1; --k) {
      carry = carry * r + coeffs_[static_cast<std::size_t>(k)];
      q[static_cast<std::size_t>(k - 1)] = carry;
    }
    return Polynomial(std::move(q));
  }

  friend Polynomial operator+(const Polynomial& a, const Polynomial& b) {
    std::vector<Scalar> r(std::max(a.coeffs_.size(), b.coeffs_.size()), Scalar(0));
    for (std::size_t i = 0; i < r.size(); ++i) r[i] = a[static_cast<int>(i)] + b[static_cast<int>(i)];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator-(const Polynomial& a) {
    std::vector<Scalar> r = a.coeffs_;
    for (auto& c : r) c = -c;
    return Polynomial(std::move(r));
  }
  friend Polynomial operator-(const Polynomial& a, const Polynomial& b) { return a + (-b); }
  friend Polynomial operator*(const Polynomial& a, const Polynomial& b) {
    if (a.is_zero() || b.is_zero()) return Polynomial();
    std::vector<Scalar> r(a.coeffs_.size() + b.coeffs_.size() - 1, Scalar(0));
    for (std::size_t i = 0; i < a.coeffs_.size(); ++i)
      for (std::size_t j = 0; j < b.coeffs_.size(); ++j) r[i + j] += a.coeffs_[i] * b.coeffs_[j];
    return Polynomial(std::move(r));
  }
  friend Polynomial operator*(Scalar s, const Polynomial& a) { return Polynomial::constant(s) * a; }
  friend bool operator==(const Polynomial& a, const Polynomial& b) { return a.coeffs_ == b.coeffs_; }

 private:
  void trim() {
    while (coeffs_.size() > 1 && coeffs_.back() == Scalar(0)) coeffs_.pop_back();
    if (coeffs_.empty()) coeffs_.push_back(Scalar(0));
  }

  std::vector<Scalar> coeffs_;
};

template <typename T>
struct Root {
  std::complex<T> value;
  int multiplicity = 1;
};

/// Two roots coincide iff their distance is at most this.
template <typename T>
T root_separation(std::complex<T> r) {
  return T(1e-9) * (T(1) + std::abs(r));
}

namespace detail {

template <typename T>
bool residual_ok(const Polynomial<T>& p, std::complex<T> z, T rel) {
  const T scale = p.norm1() * std::pow(std::max(T(1), std::abs(z)), T(p.degree()));
  return std::abs(p(z)) <= rel * scale;
}

// Newton iteration on p from z; returns false if no convergence in 100 steps.
template <typename T>
bool newton_polish(const Polynomial<T>& p, std::complex<T>& z) {
  const Polynomial<T> dp = p.derivative();
  const T eps = std::numeric_limits<T>::epsilon();
  for (int it = 0; it < 100; ++it) {
    const std::complex<T> f = p(z);
    if (std::abs(f) <= 4 * eps * p.degree() * p.abs_eval(z)) return true;
    const std::complex<T> df = dp(z);
    if (df == std::complex<T>(0)) break;
    const std::complex<T> step = f / df;
    z -= step;
    if (std::abs(step) <= 4 * eps * (T(1) + std::abs(z))) return true;
  }
  return residual_ok(p, z, T(1e-12));
}

template <typename T>
std::vector<std::complex<T>> companion_eigenvalues(const Polynomial<T>& p) {
  const int n = p.degree();
  using Mat = Eigen::Matrix<std::complex<T>, Eigen::Dynamic, Eigen::Dynamic>;
  Mat c = Mat::Zero(n, n);
  const std::complex<T> lead = p.leading();
  for (int i = 1; i < n; ++i) c(i, i - 1) = 1;
  for (int i = 0; i < n; ++i) c(i, n - 1) = -p[i] / lead;
  Eigen::ComplexEigenSolver<Mat> es(c, /*computeEigenvectors=*/false);
  if (es.info() != Eigen::Success) throw RootFindingFailure("companion eigenvalue solver failed");
  std::vector<std::complex<T>> out(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) out[static_cast<std::size_t>(i)] = es.eigenvalues()(i);
  return out;
}

}  // namespace detail

/// All roots of p with multiplicity. Roots come from the companion matrix and
/// are Newton-polished; clusters are merged into multiple roots when the
/// cluster centre is a root of p^(m-1) with a roundoff-level residual of p.
/// Exact zero roots (vanishing low-order coefficients) are reported exactly.
template <typename T>
std::vector<Root<T>> find_roots(const Polynomial<T>& p) {
  using C = std::complex<T>;
  if (p.is_zero()) throw RootFindingFailure("roots of the zero polynomial are undefined");
  std::vector<Root<T>> out;

  int zero_mult = 0;
  while (zero_mult < p.degree() && p[zero_mult] == C(0)) ++zero_mult;
  if (zero_mult > 0) out.push_back({C(0), zero_mult});
  std::vector<C> shifted(p.coeffs().begin() + zero_mult, p.coeffs().end());
  const Polynomial<T> q(std::move(shifted));
  if (q.degree() < 1) return out;

  std::vector<C> eig = detail::companion_eigenvalues(q);
  std::vector<bool> used(eig.size(), false);
  for (std::size_t i = 0; i < eig.size(); ++i) {
    if (used[i]) continue;
    const T radius = T(1e-5) * (T(1) + std::abs(eig[i]));
    std::vector<std::size_t> members{i};
    for (std::size_t j = i + 1; j < eig.size(); ++j)
      if (!used[j] && std::abs(eig[j] - eig[i]) <= radius) members.push_back(j);

    bool merged = false;
    if (members.size() > 1) {
      const int m = static_cast<int>(members.size());
      C centre(0);
      for (auto k : members) centre += eig[k];
      centre /= T(m);
      const Polynomial<T> dq = q.derivative(m - 1);
      if (detail::newton_polish(dq, centre) && detail::residual_ok(q, centre, T(1e-12))) {
        for (auto k : members) used[k] = true;
        out.push_back({centre, m});
        merged = true;
      }
    }
    if (!merged) {
      used[i] = true;
      C z = eig[i];
      if (!detail::newton_polish(q, z))
        throw RootFindingFailure("Newton polishing did not converge in 100 iterations");
      out.push_back({z, 1});
    }
  }

  // Singletons polished onto the same multiple root are folded together.
  std::vector<Root<T>> folded;
  for (const auto& r : out) {
    auto it = std::find_if(folded.begin(), folded.end(), [&](const Root<T>& f) {
      return std::abs(f.value - r.value) <= root_separation(f.value);
    });
    if (it == folded.end())
      folded.push_back(r);
    else
      it->multiplicity += r.multiplicity;
  }
  return folded;
}

template <typename T>
class RationalFn {
 public:
  using Scalar = std::complex<T>;
  using Poly = Polynomial<T>;

  RationalFn() : num_(), den_(Poly::constant(Scalar(1))) {}
  RationalFn(Poly num, Poly den) : num_(std::move(num)), den_(std::move(den)) { reduce(); }

  static RationalFn constant(Scalar c) { return RationalFn(Poly::constant(c), Poly::constant(Scalar(1))); }
  static RationalFn polynomial(Poly p) { return RationalFn(std::move(p), Poly::constant(Scalar(1))); }
  /// The identity function η.
  static RationalFn identity() { return polynomial(Poly({Scalar(0), Scalar(1)})); }

  const Poly& num() const { return num_; }
  const Poly& den() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_polynomial() const { return den_.is_constant(); }
  bool is_constant() const { return num_.is_constant() && den_.is_constant(); }

  Extended<T> operator()(Scalar z) const {
    const Scalar d = den_(z);
    const Scalar n = num_(z);
    if (d == Scalar(0)) {
      if (n == Scalar(0)) throw IndeterminateValue("0/0 while evaluating a rational function");
      return Extended<T>::infinity();
    }
    return {n / d, false};
  }

  /// Finite value; infinity maps to a non-finite complex number.
  Scalar value(Scalar z) const {
    const Scalar d = den_(z);
    if (d == Scalar(0)) {
      const T inf = std::numeric_limits<T>::infinity();
      return {inf, inf};
    }
    return num_(z) / d;
  }

  RationalFn derivative() const {
    return RationalFn(num_.derivative() * den_ - num_ * den_.derivative(), den_ * den_);
  }

  std::vector<Root<T>> zeros() const { return num_.is_zero() || num_.is_constant() ? std::vector<Root<T>>{} : find_roots(num_); }
  std::vector<Root<T>> poles() const { return den_.is_constant() ? std::vector<Root<T>>{} : find_roots(den_); }

  /// r(1/w) · w^shift, reduced.
  RationalFn substitute_reciprocal(int shift = 0) const {
    const int dn = num_.degree(), dd = den_.degree();
    Poly n = num_.reversed(dn), d = den_.reversed(dd);
    const int e = dd - dn + shift;
    if (e >= 0)
      n = Poly::monomial(e) * n;
    else
      d = Poly::monomial(-e) * d;
    return RationalFn(std::move(n), std::move(d));
  }

  friend RationalFn operator+(const RationalFn& a, const RationalFn& b) {
    return RationalFn(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RationalFn operator-(const RationalFn& a, const RationalFn& b) {
    return RationalFn(a.num_ * b.den_ - b.num_ * a.den_, a.den_ * b.den_);
  }
  friend RationalFn operator*(const RationalFn& a, const RationalFn& b) {
    return RationalFn(a.num_ * b.num_, a.den_ * b.den_);
  }
  friend RationalFn operator/(const RationalFn& a, const RationalFn& b) {
    if (b.is_zero()) throw InvalidRational("division by the zero rational function");
    return RationalFn(a.num_ * b.den_, a.den_ * b.num_);
  }
  friend RationalFn operator*(Scalar s, const RationalFn& a) { return RationalFn(s * a.num_, a.den_); }
  friend bool operator==(const RationalFn& a, const RationalFn& b) { return a.num_ == b.num_ && a.den_ == b.den_; }

 private:
  void reduce() {
    if (den_.is_zero()) throw InvalidRational("zero denominator");
    if (num_.is_zero()) {
      den_ = Poly::constant(Scalar(1));
      return;
    }
    if (num_.is_constant() || den_.is_constant()) return;
    auto nr = find_roots(num_);
    auto dr = find_roots(den_);
    for (auto& d : dr) {
      for (auto& n : nr) {
        if (n.multiplicity == 0 || d.multiplicity == 0) continue;
        if (std::abs(n.value - d.value) > root_separation(d.value)) continue;
        const int k = std::min(n.multiplicity, d.multiplicity);
        for (int i = 0; i < k; ++i) {
          num_ = num_.deflate(n.value);
          den_ = den_.deflate(d.value);
        }
        n.multiplicity -= k;
        d.multiplicity -= k;
      }
    }
  }

  Poly num_;
  Poly den_;
};

template <typename T>
struct SingularPoints {
  std::vector<Root<T>> zeros;
  std::vector<Root<T>> poles;
};

/// Zeros and poles of r with multiplicity.
template <typename T>
SingularPoints<T> singular_points(const RationalFn<T>& r) {
  return {r.zeros(), r.poles()};
}

using ComplexPoly = Polynomial<double>;
using Rational = RationalFn<double>;
using ExtComplex = Extended<double>;
using cplx = std::complex<double>;

}  // namespace holgeo
