#pragma once

// Diagonal warped-product metrics
//
//   b1(u¹) du¹⊙du¹ + Σ_{k≥2} a_k(u¹) f_k(u^k) du^k⊙du^k
//
// on products of discs, planes and Riemann spheres. Components are 0-based in
// code: component 0 is the base coordinate u¹, component k ≥ 1 is the fibre
// coordinate u^{k+1}. warp(k) and fiber(k) are defined for k = 1..dim()-1.

#include <string>
#include <vector>

#include "holgeo/rational.hpp"
#include "holgeo/types.hpp"

namespace holgeo {

enum class FactorKind { disc, plane, sphere };

std::string to_string(FactorKind kind);
FactorKind factor_kind_from_string(const std::string& name);

/// Nonzero Christoffel symbols of a warped metric at one point.
struct Christoffel {
  cplx g1_11{};             // Γ¹₁₁ = b1'/(2 b1)
  Eigen::VectorXcd g1_kk;   // Γ¹_kk = -a_k' f_k / (2 b1), entry k-1
  Eigen::VectorXcd gk_kk;   // Γᵏ_kk = f_k' / (2 f_k)
  Eigen::VectorXcd gk_1k;   // Γᵏ_1k = Γᵏ_k1 = a_k' / (2 a_k)

  int dim() const { return static_cast<int>(g1_kk.size()) + 1; }

  /// Γ^upper_{i j}, 0-based, zero outside the sparsity pattern.
  cplx operator()(int upper, int i, int j) const;
};

/// A rational function through its zeros and poles: value and logarithmic
/// derivative stay accurate next to multiple roots, where expanded
/// polynomials lose most of their digits.
class FactoredRational {
 public:
  FactoredRational() = default;
  explicit FactoredRational(const Rational& r);

  cplx value(cplx x) const;
  /// r'/r
  cplx log_derivative(cplx x) const;

 private:
  cplx lead_{1.0};
  std::vector<Root<double>> zeros_, poles_;
};

class WarpedMetric {
 public:
  WarpedMetric(std::vector<FactorKind> factors, Rational b1, std::vector<Rational> warp,
               std::vector<Rational> fiber);

  /// b1 = a_k = f_k = 1.
  static WarpedMetric flat(std::vector<FactorKind> factors);

  int dim() const { return static_cast<int>(factors_.size()); }
  FactorKind factor(int i) const { return factors_.at(static_cast<std::size_t>(i)); }
  const std::vector<FactorKind>& factors() const { return factors_; }

  const Rational& b1() const { return b1_; }
  const Rational& warp(int k) const { return warp_.at(static_cast<std::size_t>(k - 1)); }
  const Rational& fiber(int k) const { return fiber_.at(static_cast<std::size_t>(k - 1)); }
  const Rational& b1_prime() const { return b1p_; }
  const Rational& warp_prime(int k) const { return warpp_.at(static_cast<std::size_t>(k - 1)); }
  const Rational& fiber_prime(int k) const { return fiberp_.at(static_cast<std::size_t>(k - 1)); }

  const FactoredRational& b1_factored() const { return b1f_; }
  const FactoredRational& warp_factored(int k) const { return warpf_.at(static_cast<std::size_t>(k - 1)); }
  const FactoredRational& fiber_factored(int k) const { return fiberf_.at(static_cast<std::size_t>(k - 1)); }

  /// The same metric written in the coordinates selected by `chart`.
  /// Only sphere components may use the reciprocal chart.
  WarpedMetric in_chart(ChartMask chart) const;

  /// Diagonal (g_11, ..., g_NN); infinite entries mark the pole locus.
  /// Throws DomainViolation if a disc coordinate has |u| >= 1.
  std::vector<ExtComplex> eval(const Point& u) const;

  /// Every diagonal entry finite and nonzero, checked per coefficient.
  bool is_ordinary(const Point& u) const;

  /// Throws SingularMetricPoint off the ordinary set.
  Christoffel christoffel(const Point& u) const;

  /// Zeros and poles of the coefficients that depend on each component.
  const std::vector<LocusId>& loci() const { return loci_; }

  void check_domain(const Point& u) const;

 private:
  std::vector<FactorKind> factors_;
  Rational b1_;
  std::vector<Rational> warp_;
  std::vector<Rational> fiber_;
  Rational b1p_;
  std::vector<Rational> warpp_;
  std::vector<Rational> fiberp_;
  std::vector<LocusId> loci_;
  FactoredRational b1f_;
  std::vector<FactoredRational> warpf_, fiberf_;
};

}  // namespace holgeo
