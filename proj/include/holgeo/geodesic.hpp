#pragma once

// The geodesic system of a warped metric, its first integrals, and
// integration of geodesics along segments of the complex parameter.

#include <vector>

#include "holgeo/metric.hpp"
#include "holgeo/ode.hpp"

namespace holgeo {

struct GeodesicState {
  cplx z{};
  Point u;
  Point v;  // du/dz
};

struct GeodesicOptions {
  double blowup = 1e8;
  double guard_rel = 1e-6;      // locus guard distance · (1 + |u|)
  double sphere_switch = 10.0;  // change sphere chart beyond this modulus
};

/// The geodesic equations as a first-order system in y = (u, v).
/// Sphere components switch to w = 1/u when |u| exceeds sphere_switch.
class GeodesicSystem final : public OdeSystem {
 public:
  explicit GeodesicSystem(WarpedMetric metric, GeodesicOptions options = {});

  int dim() const override { return 2 * metric_.dim(); }
  int position_dim() const override { return metric_.dim(); }
  Eigen::VectorXcd rhs(cplx z, const Eigen::VectorXcd& y, ChartMask chart) const override;
  std::optional<TerminalStatus> check(cplx z, const Eigen::VectorXcd& y, ChartMask chart) const override;
  std::optional<TerminalStatus> check_step(cplx z, const Eigen::VectorXcd& y0, const Eigen::VectorXcd& y1,
                                           ChartMask chart) const override;
  void rechart(Eigen::VectorXcd& y, ChartMask& chart) const override;
  double blowup_threshold() const override { return options_.blowup; }

  const WarpedMetric& metric() const { return metric_; }
  const WarpedMetric& chart_metric(ChartMask chart) const;
  const GeodesicOptions& options() const { return options_; }

  OdeState to_ode(const GeodesicState& s) const;
  /// Back to the u-chart; components at w = 0 become infinite.
  GeodesicState from_ode(const OdeState& s) const;

 private:
  WarpedMetric metric_;
  GeodesicOptions options_;
  std::vector<int> spheres_;
  std::vector<WarpedMetric> charts_;  // indexed by compressed sphere mask
};

/// ü from the geodesic equations. Throws SingularMetricPoint off the
/// ordinary set.
Point geodesic_rhs(const WarpedMetric& m, const GeodesicState& s);

enum class IntegralCase { A, B };

struct FirstIntegrals {
  IntegralCase kind = IntegralCase::A;
  Eigen::VectorXcd values;  // A_1 .. A_N, 0-based
};

/// Case A (v¹ ≠ 0): A_k = (v^k)² f_k a_k², A_1 = (v¹)² b1 + Σ A_l / a_l.
/// Case B (v¹ = 0): A_1 = u¹, A_k = (v^k)² f_k.
FirstIntegrals first_integrals(const WarpedMetric& m, const GeodesicState& s);

/// The same integrals evaluated with a prescribed case.
FirstIntegrals first_integrals(const WarpedMetric& m, const GeodesicState& s, IntegralCase kind);

/// Straight segment from s.z to z_target.
ContinuationRecord integrate_segment(const WarpedMetric& m, const GeodesicState& s, cplx z_target, double tol,
                                     const GeodesicOptions& options = {});

ContinuationRecord integrate_segment(const GeodesicSystem& system, const GeodesicState& s, cplx z_target,
                                     double tol, bool record_samples = true);

/// max over samples and k of |A_k(sample) − A_k(start)| / (1 + |A_k(start)|).
double conservation_drift(const WarpedMetric& m, const ContinuationRecord& rec);

}  // namespace holgeo
