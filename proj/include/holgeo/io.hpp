#pragma once

// JSON, CSV and SVG encodings of inputs and results. Complex numbers are
// [re, im]; polynomials are lists of them in ascending powers.

#include <string>

#include "json.hpp"

#include "holgeo/coercivity.hpp"
#include "holgeo/continuation.hpp"
#include "holgeo/probe.hpp"

namespace holgeo {

using json = nlohmann::ordered_json;

json to_json(cplx z);
/// Accepts [re, im] or a bare number. Throws ConfigError.
cplx complex_from_json(const json& j);

json to_json(const ComplexPoly& p);
ComplexPoly poly_from_json(const json& j);
json to_json(const Rational& r);
/// {"num": poly, "den": poly}; "den" defaults to 1.
Rational rational_from_json(const json& j);

/// {"factors": [...], "b1": r, "a": [r, ...], "f": [r, ...]}
json to_json(const WarpedMetric& m);
WarpedMetric metric_from_json(const json& j);

/// Reads and parses a JSON file. Throws ConfigError.
json load_json_file(const std::string& path);

Point point_from_json(const json& j);

/// A list of waypoints after `start`, or
/// {"legs": [{"to": z} | {"arc": {"center": c, "sweep": radians}}, ...]}.
PlanePath path_from_json(const json& j, cplx start);

json to_json(const TerminalStatus& s);
json to_json(const ContinuationRecord& rec, const GeodesicSystem& sys);
json to_json(const ContinuationRecord& rec);  // scalar-state records
std::string record_csv(const ContinuationRecord& rec, const GeodesicSystem& sys);
std::string record_csv(const ContinuationRecord& rec);

json to_json(const SingularityVerdict& v);
json to_json(const ProbeReport& r);
std::string probe_csv(const ProbeReport& r);
std::string probe_svg(const ProbeReport& r);
json to_json(const CoercivityVerdict& v);

}  // namespace holgeo
