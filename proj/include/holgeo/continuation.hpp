#pragma once

// Continuation along plane paths, monodromy loops and classification of
// the obstructions a continuation runs into.

#include <string>
#include <vector>

#include "holgeo/geodesic.hpp"

namespace holgeo {

/// Scalar rational ODE u' = P(z, u) / Q(z, u). Coefficient (i, j) of a
/// matrix multiplies z^i u^j.
class SyntheticSystem final : public OdeSystem {
 public:
  SyntheticSystem(Eigen::MatrixXcd num, Eigen::MatrixXcd den);

  int dim() const override { return 1; }
  Eigen::VectorXcd rhs(cplx z, const Eigen::VectorXcd& y, ChartMask chart) const override;

  const Eigen::MatrixXcd& num() const { return num_; }
  const Eigen::MatrixXcd& den() const { return den_; }

 private:
  Eigen::MatrixXcd num_, den_;
};

/// A synthetic system with an initial condition and the closed form it was
/// built from.
struct SyntheticProblem {
  std::string name;
  SyntheticSystem system;
  cplx z0{};
  cplx u0{};
  cplx singular{};         // the interesting point
  std::string closed_form;  // for humans
};

/// identity (u' = 1), sqrt (u' = 1/(2u), u(1) = 1), log (u' = 1/z, u(1) = 0),
/// pole (u' = u², u(0) = 1, u = 1/(1 − z)), pole1..pole3 (u' = k u/(1 − z), u(0) = 1,
/// u = (1 − z)^−k), zlogz (u' = u/z + 1, u(1) = 0, u = z log z).
/// Throws ConfigError for an unknown name.
SyntheticProblem synthetic_problem(const std::string& name);
std::vector<std::string> synthetic_problem_names();

OdeState initial_state(const SyntheticProblem& p);

/// Continues along every leg of `path`, stopping at the first obstruction.
/// A completed closed path reports loop_closed or loop_open depending on
/// whether the state returns to its start within 100·tol·(1 + length).
ContinuationRecord continue_along(const OdeSystem& system, const OdeState& s, const PlanePath& path, double tol,
                                  bool record_samples = true);
ContinuationRecord continue_along(const WarpedMetric& m, const GeodesicState& s, const PlanePath& path,
                                  double tol);

enum class MonodromyKind { closed, open, blocked };

struct MonodromyResult {
  MonodromyKind kind = MonodromyKind::blocked;
  int turns = 0;                            // closing turn, or turns completed
  std::vector<Eigen::VectorXcd> increments;  // y after turn j minus y after turn j − 1
  TerminalStatus status;                    // for blocked
  OdeState last;                            // state after the last completed turn
};

const char* to_string(MonodromyKind kind);

/// Runs full positive turns around `center` starting from s (on the circle)
/// until the state returns to s within 100·tol·(1 + 2πr)·(1 + |s.y|).
MonodromyResult monodromy_probe(const OdeSystem& system, const OdeState& s, cplx center, int max_turns,
                                double tol);

enum class SingularityKind { regular, pole, logarithmic, removable_logarithmic, boundary_blocked, undetermined };

const char* to_string(SingularityKind kind);

struct SingularityEvidence {
  TerminalStatus approach;  // how the straight continuation ended
  std::vector<double> radii;
  std::vector<std::string> loops;  // closed_after(m) / open_after(n) / blocked(status) per radius
  std::vector<double> spreads;     // largest per-turn increment per radius
  std::vector<int> blowing_components;
  double slope = 0.0;
  double residual = 0.0;
  std::string note;
};

struct SingularityVerdict {
  SingularityKind kind = SingularityKind::undetermined;
  int order = 0;  // pole only
  cplx location{};
  SingularityEvidence evidence;
};

struct ClassifyOptions {
  int max_turns = 8;
  double residual_limit = 0.1;
};

/// Continues from s toward z_star and classifies whatever stops it.
SingularityVerdict classify_singularity(const OdeSystem& system, const OdeState& s, cplx z_star, double tol,
                                        const ClassifyOptions& options = {});
SingularityVerdict classify_singularity(const WarpedMetric& m, const GeodesicState& s, cplx z_star, double tol,
                                        const ClassifyOptions& options = {});

}  // namespace holgeo
