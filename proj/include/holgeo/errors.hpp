#pragma once

#include <stdexcept>
#include <string>

namespace holgeo {

/// Base of every error thrown by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// rational
class IndeterminateValue : public Error { using Error::Error; };
class RootFindingFailure : public Error { using Error::Error; };
class InvalidRational : public Error { using Error::Error; };

// metric
class DomainViolation : public Error { using Error::Error; };
class SingularMetricPoint : public Error { using Error::Error; };
class InvalidMetric : public Error { using Error::Error; };

// geodesic / continuation
class InvalidTolerance : public Error { using Error::Error; };
class InvalidPath : public Error { using Error::Error; };

// coercivity
class DegenerateTriple : public Error { using Error::Error; };
class AllZero : public Error { using Error::Error; };
class PatternMismatch : public Error { using Error::Error; };
class NoOrdinaryBasePoint : public Error { using Error::Error; };

// io
class ConfigError : public Error { using Error::Error; };

}  // namespace holgeo
