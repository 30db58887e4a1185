#pragma once

#include <complex>
#include <cstdint>
#include <string>

#include <Eigen/Dense>

namespace holgeo {

using cplx = std::complex<double>;
using Point = Eigen::VectorXcd;

/// Bit i set: component i is expressed in the reciprocal chart w = 1/u.
using ChartMask = std::uint32_t;

inline bool in_reciprocal_chart(ChartMask chart, int i) { return (chart >> i) & 1u; }

/// A zero or pole of one metric coefficient, seen from one coordinate.
struct LocusId {
  int component = 0;
  cplx point{};
  bool pole = false;
  std::string coefficient;  // "b1", "a2", "f3", ...
};

}  // namespace holgeo
