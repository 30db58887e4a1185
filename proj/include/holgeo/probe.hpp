#pragma once

// Completeness probe: continue one geodesic toward a grid of parameter
// values on the Riemann sphere and look at what cannot be reached.

#include <optional>
#include <vector>

#include "holgeo/continuation.hpp"

namespace holgeo {

/// Rings of targets around the start parameter, plus the point at infinity
/// approached along rays out to `infinity_radius`.
struct ProbeGrid {
  std::vector<double> rings{0.5, 1, 2, 4, 8, 16};
  int angles = 24;
  int infinity_rays = 8;
  double infinity_radius = 1e3;

  /// Twice the angles and rays; a geometric-mean ring between neighbours.
  ProbeGrid refined() const;
};

struct ProbeTarget {
  cplx zeta{};  // absolute parameter value; unused for infinity
  bool infinite = false;
  int ring = -1;
  int angle = -1;
  bool reached = false;
  int attempts = 0;          // detour retries used
  TerminalStatus obstruction;  // what stopped the last attempt
  std::optional<SingularityVerdict> verdict;
};

enum class ProbeVerdict { looks_complete, looks_incomplete, inconclusive };

const char* to_string(ProbeVerdict v);

struct GridSummary {
  int reached = 0;
  int blocked = 0;
  int boundary_blocked = 0;  // blocked by leaving a disc factor
  bool isolated = true;      // no two blocked targets adjacent in the grid
};

struct ProbeReport {
  ProbeGrid grid;
  std::vector<ProbeTarget> targets;  // grid order, infinity last
  GridSummary summary;
  GridSummary refined;
  ProbeVerdict verdict = ProbeVerdict::inconclusive;
};

struct ProbeOptions {
  int budget = 4;  // detour retries per target
  double tol = 1e-8;
  bool classify = true;
};

ProbeReport probe_completeness(const WarpedMetric& m, const GeodesicState& s, const ProbeGrid& grid = {},
                               const ProbeOptions& options = {});

}  // namespace holgeo
