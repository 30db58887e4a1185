#include "holgeo/probe.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "holgeo/errors.hpp"

namespace holgeo {

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;

struct Known {
  Detour detour;
  bool flipped = false;
};

// Disc to step around after a continuation stopped at rec.status.
Detour detour_for(const GeodesicSystem& sys, const ContinuationRecord& rec) {
  const OdeState& last = rec.final_state();
  const cplx z = rec.status.z;
  const double base = 1e-5 * (1.0 + std::abs(z));
  Detour d{z, base, 1};
  const int n = sys.position_dim();
  if (rec.status.kind == StatusKind::blow_up) {
    const Eigen::VectorXcd f = sys.rhs(last.z, last.y, last.chart);
    Eigen::Index i = 0;
    last.y.cwiseAbs().maxCoeff(&i);
    if (f(i) != cplx(0)) {
      // y ≈ c (z* − z)^−k gives z* − z = k y / y'; take k = 1 and a wide margin.
      const cplx step = last.y(i) / f(i);
      d.point = last.z + step;
      d.radius = std::max(base, 4 * std::abs(step));
    }
  } else if (rec.status.kind == StatusKind::singular_locus_hit && rec.status.locus) {
    const int i = rec.status.locus->component;
    const cplx u = last.y(i), du = last.y(n + i);
    if (du != cplx(0)) {
      const cplx cross = last.z + (rec.status.locus->point - u) / du;
      d.point = cross;
      d.radius = std::max(base, 2 * std::abs(cross - z));
    }
  }
  if (!std::isfinite(d.point.real()) || !std::isfinite(d.point.imag()) || !std::isfinite(d.radius)) {
    d.point = z;
    d.radius = base;
  }
  return d;
}

void remember(std::vector<Known>& known, Detour d) {
  for (auto& k : known) {
    if (std::abs(k.detour.point - d.point) > k.detour.radius + d.radius) continue;
    if (!k.flipped) {
      k.detour.side = -k.detour.side;
      k.flipped = true;
    } else {
      k.detour.radius *= 2;
      k.flipped = false;
    }
    return;
  }
  known.push_back({d, false});
}

std::vector<Detour> detours_of(const std::vector<Known>& known) {
  std::vector<Detour> out;
  for (const auto& k : known) out.push_back(k.detour);
  return out;
}

struct Ray {
  double angle = 0;
  std::vector<std::pair<double, ProbeTarget*>> stops;
};

GridSummary summarize(const std::vector<ProbeTarget*>& finite, int rings, int angles, bool inf_reached,
                      const TerminalStatus& inf_status) {
  GridSummary g;
  auto blocked_at = [&](int r, int a) {
    if (r < 0 || r >= rings) return false;
    a = (a % angles + angles) % angles;
    return !finite[static_cast<std::size_t>(r * angles + a)]->reached;
  };
  for (int r = 0; r < rings; ++r)
    for (int a = 0; a < angles; ++a) {
      const ProbeTarget& t = *finite[static_cast<std::size_t>(r * angles + a)];
      if (t.reached) {
        ++g.reached;
        continue;
      }
      ++g.blocked;
      if (t.obstruction.kind == StatusKind::domain_exit) ++g.boundary_blocked;
      if (blocked_at(r, a - 1) || blocked_at(r, a + 1) || blocked_at(r - 1, a) || blocked_at(r + 1, a))
        g.isolated = false;
    }
  if (inf_reached) {
    ++g.reached;
  } else {
    ++g.blocked;
    if (inf_status.kind == StatusKind::domain_exit) ++g.boundary_blocked;
  }
  return g;
}

}  // namespace

ProbeGrid ProbeGrid::refined() const {
  ProbeGrid g = *this;
  g.rings.clear();
  for (std::size_t i = 0; i < rings.size(); ++i) {
    if (i > 0) g.rings.push_back(std::sqrt(rings[i - 1] * rings[i]));
    g.rings.push_back(rings[i]);
  }
  g.angles = 2 * angles;
  g.infinity_rays = 2 * infinity_rays;
  return g;
}

const char* to_string(ProbeVerdict v) {
  switch (v) {
    case ProbeVerdict::looks_complete: return "looks_complete";
    case ProbeVerdict::looks_incomplete: return "looks_incomplete";
    case ProbeVerdict::inconclusive: return "inconclusive";
  }
  return "inconclusive";
}

ProbeReport probe_completeness(const WarpedMetric& m, const GeodesicState& s, const ProbeGrid& grid,
                               const ProbeOptions& options) {
  validate_tolerance(options.tol);
  if (!m.is_ordinary(s.u)) throw SingularMetricPoint("probe must start at a metrically ordinary point");
  if (grid.rings.empty() || grid.angles < 1 || grid.infinity_rays < 1)
    throw ConfigError("probe grid needs at least one ring, angle and infinity ray");
  for (std::size_t i = 0; i < grid.rings.size(); ++i)
    if (!(grid.rings[i] > 0) || (i > 0 && grid.rings[i] <= grid.rings[i - 1]))
      throw ConfigError("probe rings must be positive and increasing");
  if (!(grid.infinity_radius > grid.rings.back())) throw ConfigError("infinity radius must exceed the outer ring");

  const ProbeGrid fine = grid.refined();
  const int nr = static_cast<int>(fine.rings.size()), na = fine.angles, ni = fine.infinity_rays;
  const GeodesicSystem sys(m);
  const OdeState start = sys.to_ode(s);
  IntegratorOptions opts;
  opts.tol = options.tol;
  opts.record_samples = false;

  std::vector<ProbeTarget> finite(static_cast<std::size_t>(nr * na));
  std::vector<ProbeTarget> infinity(static_cast<std::size_t>(ni));
  for (int r = 0; r < nr; ++r)
    for (int a = 0; a < na; ++a) {
      auto& t = finite[static_cast<std::size_t>(r * na + a)];
      t.ring = r;
      t.angle = a;
      t.zeta = s.z + std::polar(fine.rings[static_cast<std::size_t>(r)], kTwoPi * a / na);
    }
  for (int k = 0; k < ni; ++k) {
    auto& t = infinity[static_cast<std::size_t>(k)];
    t.infinite = true;
    t.angle = k;
    t.zeta = s.z + std::polar(fine.infinity_radius, kTwoPi * k / ni);
  }

  // One chained continuation per angle through every ring.
  std::vector<Ray> rays(static_cast<std::size_t>(na));
  for (int a = 0; a < na; ++a) {
    rays[static_cast<std::size_t>(a)].angle = kTwoPi * a / na;
    for (int r = 0; r < nr; ++r)
      rays[static_cast<std::size_t>(a)].stops.emplace_back(fine.rings[static_cast<std::size_t>(r)],
                                                           &finite[static_cast<std::size_t>(r * na + a)]);
  }
  for (int k = 0; k < ni; ++k) {
    ProbeTarget* t = &infinity[static_cast<std::size_t>(k)];
    if ((k * na) % ni == 0) {
      rays[static_cast<std::size_t>(k * na / ni)].stops.emplace_back(fine.infinity_radius, t);
    } else {
      Ray ray;
      ray.angle = kTwoPi * k / ni;
      ray.stops.emplace_back(fine.infinity_radius, t);
      rays.push_back(std::move(ray));
    }
  }

  std::vector<Known> known;
  for (const auto& ray : rays) {
    PlanePath path(s.z);
    for (const auto& [radius, target] : ray.stops) path.segment_to(s.z + std::polar(radius, ray.angle));
    const auto rec = integrate_path(sys, start, path, opts);
    const std::size_t done = rec.leg_ends.size();
    for (std::size_t i = 0; i < ray.stops.size(); ++i) {
      if (i < done) {
        ray.stops[i].second->reached = true;
      } else {
        ray.stops[i].second->obstruction = rec.status;
      }
    }
    if (rec.status.kind != StatusKind::completed && rec.status.kind != StatusKind::domain_exit)
      remember(known, detour_for(sys, rec));
  }

  auto retry = [&](ProbeTarget& t) {
    if (t.reached || t.obstruction.kind == StatusKind::domain_exit) return;
    while (t.attempts < options.budget) {
      ++t.attempts;
      const auto path = detoured_segment(s.z, t.zeta, detours_of(known));
      if (!path) return;
      const auto rec = integrate_path(sys, start, *path, opts);
      if (rec.status.kind == StatusKind::completed) {
        t.reached = true;
        return;
      }
      t.obstruction = rec.status;
      if (rec.status.kind == StatusKind::domain_exit) return;
      remember(known, detour_for(sys, rec));
    }
  };

  for (auto& t : finite) retry(t);
  // Infinity: base rays first, then the refined ones, until one gets through.
  auto any_reached = [&](int stride) {
    for (int k = 0; k < ni; k += stride)
      if (infinity[static_cast<std::size_t>(k)].reached) return true;
    return false;
  };
  for (int k = 0; k < ni && !any_reached(2); k += 2) retry(infinity[static_cast<std::size_t>(k)]);
  for (int k = 1; k < ni && !any_reached(1); k += 2) retry(infinity[static_cast<std::size_t>(k)]);

  ProbeReport report;
  report.grid = grid;
  const int br = static_cast<int>(grid.rings.size()), ba = grid.angles;
  std::vector<ProbeTarget*> base_view, fine_view;
  for (int r = 0; r < br; ++r)
    for (int a = 0; a < ba; ++a) base_view.push_back(&finite[static_cast<std::size_t>(2 * r * na + 2 * a)]);
  for (auto& t : finite) fine_view.push_back(&t);

  ProbeTarget inf_base = infinity[0];
  for (int k = 0; k < ni; k += 2)
    if (infinity[static_cast<std::size_t>(k)].reached) inf_base = infinity[static_cast<std::size_t>(k)];
  inf_base.angle = -1;
  inf_base.zeta = {};
  const bool inf_fine = any_reached(1);

  report.summary = summarize(base_view, br, ba, inf_base.reached, inf_base.obstruction);
  report.refined = summarize(fine_view, nr, na, inf_fine, inf_base.obstruction);

  for (const ProbeTarget* t : base_view) {
    ProbeTarget copy = *t;
    copy.ring /= 2;
    copy.angle /= 2;
    report.targets.push_back(copy);
  }
  report.targets.push_back(inf_base);

  if (options.classify) {
    std::vector<std::pair<cplx, SingularityVerdict>> cache;
    for (auto& t : report.targets) {
      if (t.reached) continue;
      if (t.obstruction.kind == StatusKind::domain_exit) {
        SingularityVerdict v;
        v.kind = SingularityKind::boundary_blocked;
        v.location = t.obstruction.z;
        v.evidence.approach = t.obstruction;
        t.verdict = v;
        continue;
      }
      const cplx z = t.obstruction.z;
      const auto hit = std::find_if(cache.begin(), cache.end(), [&](const auto& entry) {
        return std::abs(entry.first - z) <= 1e-6 * (1.0 + std::abs(z));
      });
      if (hit != cache.end()) {
        t.verdict = hit->second;
        continue;
      }
      t.verdict = classify_singularity(sys, start, z, options.tol);
      cache.emplace_back(z, *t.verdict);
    }
  }

  if (report.refined.boundary_blocked > report.summary.boundary_blocked) {
    report.verdict = ProbeVerdict::looks_incomplete;
  } else if (report.refined.blocked <= report.summary.blocked && report.summary.isolated && report.refined.isolated) {
    report.verdict = ProbeVerdict::looks_complete;
  } else {
    report.verdict = ProbeVerdict::inconclusive;
  }
  return report;
}

}  // namespace holgeo
