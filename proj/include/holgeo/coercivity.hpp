#pragma once

// Coercivity of a warped metric: do the primitives of 1/α and of √f_k
// continue until their images miss at most finitely many values?
// Exact for the quadratic family, sampled otherwise.

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "holgeo/metric.hpp"

namespace holgeo {

enum class PrimitiveKind { log_form, sqrt_form, linear_form };

const char* to_string(PrimitiveKind kind);

/// A primitive Φ of 1/√(aη² + bη + c) on principal branches.
struct PrimitiveForm {
  PrimitiveKind kind = PrimitiveKind::linear_form;
  cplx a{}, b{}, c{};

  cplx delta() const { return b * b - 4.0 * a * c; }
  cplx evaluate(cplx eta) const;
  /// The square root of aη² + bη + c on the branch Φ is a primitive for.
  cplx integrand_root(cplx eta) const;
};

/// Throws AllZero for (0, 0, 0) and DegenerateTriple for a ≠ 0, Δ = 0.
PrimitiveForm classify_quadratic_primitive(cplx a, cplx b, cplx c);

enum class ComponentKind { coercive_closed_form, coercive_sampled, not_coercive, undetermined };

const char* to_string(ComponentKind kind);

struct ComponentVerdict {
  int component = 0;
  ComponentKind kind = ComponentKind::undetermined;
  std::optional<PrimitiveForm> form;  // closed form only
  std::string witness;                // not_coercive only
  double small_extent = 0.0;          // sampled: max |Φ − Φ(base)| at the short level
  double large_extent = 0.0;          // and at the long level
  std::string note;
};

enum class OverallVerdict { coercive, not_coercive, undetermined };

const char* to_string(OverallVerdict v);

struct CoercivityVerdict {
  std::vector<ComponentVerdict> components;
  OverallVerdict overall = OverallVerdict::undetermined;
  std::uint64_t seed = 0;
  int tuples = 0;
  Point base;
};

struct SampleOptions {
  int rays = 64;
  double ray_length = 1e3;
  double tol = 1e-8;
  int loop_turns = 16;
  int branch = 0;  // +1 or -1 samples that branch alone
};

/// Continues both branches of ∫ √R dη from `base` along rays, loops around
/// the zeros and poles of R, a loop enclosing all of them (plane and
/// sphere), and approaches to the poles, at a short and a long level.
/// The image extent growing by ≥ 2 between levels gives coercive_sampled;
/// ≤ 1.05 gives not_coercive.
ComponentVerdict coercivity_sample(const Rational& integrand_square, FactorKind factor, cplx base,
                                   const SampleOptions& options = {});
/// Picks the base point itself.
ComponentVerdict coercivity_sample(const Rational& integrand_square, FactorKind factor,
                                   const SampleOptions& options = {});

/// Closed-form decision for b1 ≡ 1, f_k ≡ 1 and warps 1/q_k with q_k a
/// polynomial of degree ≤ 2, all factors planes. Throws PatternMismatch.
CoercivityVerdict coercivity_check_family(const WarpedMetric& m);

/// Ordinary points from a fixed search grid, first `count` found.
std::vector<Point> ordinary_base_points(const WarpedMetric& m, int count);

/// Samples `tuples` tuples (A_1 .. A_N) and decides every component.
/// Throws NoOrdinaryBasePoint when no base is given and none is found.
CoercivityVerdict coercivity_check(const WarpedMetric& m, int tuples, std::uint64_t seed,
                                   const std::optional<Point>& base = std::nullopt,
                                   const SampleOptions& options = {});

}  // namespace holgeo
