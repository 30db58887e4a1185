#pragma once

// Adaptive integration of holomorphic ODE systems y' = F(z, y) along
// piecewise paths (straight segments and circular arcs) in the z-plane.
//
// The state is complex; the path is parametrised by arclength so the step
// control is the same on segments and arcs.

#include <optional>
#include <variant>
#include <vector>

#include "holgeo/types.hpp"

namespace holgeo {

struct Segment {
  cplx to;
};

/// Circle arc around `center`; angles in radians, traversed from
/// angle_from to angle_to (either orientation, any number of turns).
struct Arc {
  cplx center;
  double radius = 0.0;
  double angle_from = 0.0;
  double angle_to = 0.0;
};

using Leg = std::variant<Segment, Arc>;

class PlanePath {
 public:
  explicit PlanePath(cplx start = {}) : start_(start) {}

  /// Throws InvalidPath when the arc does not start at end(), or radius <= 0.
  PlanePath& segment_to(cplx to);
  PlanePath& arc(cplx center, double radius, double angle_from, double angle_to);
  /// Arc around `center` starting at end(), sweeping `sweep` radians.
  PlanePath& arc_sweep(cplx center, double sweep);
  void append(const PlanePath& tail);

  cplx start() const { return start_; }
  cplx end() const;
  const std::vector<Leg>& legs() const { return legs_; }
  double length() const;
  PlanePath reversed() const;

  static cplx leg_end(const Leg& leg);
  static double leg_length(const Leg& leg, cplx leg_start);

 private:
  cplx start_;
  std::vector<Leg> legs_;
};

/// A point to be avoided by a semicircular detour of the given radius.
struct Detour {
  cplx point;
  double radius = 0.0;
  int side = 1;  // +1: pass on the left of the direction of travel
};

/// Straight path from a to b, bypassing every detour disc that meets the
/// segment by a semicircle centred on the segment. Returns nullopt if b lies
/// inside a detour disc or two detours overlap along the segment.
std::optional<PlanePath> detoured_segment(cplx a, cplx b, std::vector<Detour> detours);

enum class StatusKind {
  completed,
  blow_up,
  singular_locus_hit,
  domain_exit,
  step_underflow,
  loop_closed,
  loop_open,
};

const char* to_string(StatusKind kind);

struct TerminalStatus {
  StatusKind kind = StatusKind::completed;
  cplx z{};            // where the obstruction was located
  int component = -1;  // blow_up / domain_exit
  std::optional<LocusId> locus;

  bool ok() const {
    return kind == StatusKind::completed || kind == StatusKind::loop_closed || kind == StatusKind::loop_open;
  }
};

struct OdeState {
  cplx z{};
  Eigen::VectorXcd y;
  ChartMask chart = 0;
};

class OdeSystem {
 public:
  virtual ~OdeSystem() = default;

  virtual int dim() const = 0;
  /// Leading components that are positions (the rest, if any, are their
  /// derivatives in z). Defaults to all.
  virtual int position_dim() const { return dim(); }

  /// dy/dz. May return non-finite entries where the field is singular.
  virtual Eigen::VectorXcd rhs(cplx z, const Eigen::VectorXcd& y, ChartMask chart) const = 0;

  /// Obstruction reached by the state, if any. The default raises blow_up
  /// when a component exceeds blowup_threshold().
  virtual std::optional<TerminalStatus> check(cplx z, const Eigen::VectorXcd& y, ChartMask chart) const;

  /// Obstruction passed over by a step from y0 to y1 that neither endpoint
  /// reveals.
  virtual std::optional<TerminalStatus> check_step(cplx /*z*/, const Eigen::VectorXcd& /*y0*/,
                                                   const Eigen::VectorXcd& /*y1*/, ChartMask /*chart*/) const {
    return std::nullopt;
  }

  /// Coordinate change applied after each accepted step.
  virtual void rechart(Eigen::VectorXcd& /*y*/, ChartMask& /*chart*/) const {}

  virtual double blowup_threshold() const { return 1e8; }
};

struct IntegratorOptions {
  double tol = 1e-10;
  bool record_samples = true;
  double underflow_rel = 1e-13;  // step_underflow below this · (1 + |z|)
  double locate_rel = 1e-10;     // obstruction localisation accuracy · (1 + |z|)
  long max_steps = 5'000'000;
};

struct ContinuationRecord {
  PlanePath path;
  std::vector<OdeState> samples;
  std::vector<std::size_t> leg_ends;  // sample index at the end of each completed leg
  TerminalStatus status;
  long steps = 0;
  long rejected = 0;

  const OdeState& final_state() const { return samples.back(); }
};

/// Throws InvalidTolerance unless tol is in [1e-12, 1e-3].
void validate_tolerance(double tol);

/// Integrates y' = F(z, y) along `path` from `start` (start.z must equal
/// path.start()). Stops at the first obstruction; the last sample is then the
/// last accepted state before it.
ContinuationRecord integrate_path(const OdeSystem& system, const OdeState& start, const PlanePath& path,
                                  const IntegratorOptions& options = {});

}  // namespace holgeo
