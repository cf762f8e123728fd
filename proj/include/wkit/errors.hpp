#pragma once

#include <stdexcept>
#include <string>

namespace wkit {

/// Base class for all library errors.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid argument value (negative tolerance, alpha outside (0,1], ...).
class ArgumentError : public Error {
 public:
  using Error::Error;
};

/// Bad experiment / operation configuration (t-grid too short, ...).
class ConfigError : public Error {
 public:
  using Error::Error;
};

/// Requested base point is not a sample point of the jet.
class MissingPointError : public Error {
 public:
  using Error::Error;
};

/// Requested derivative order exceeds the jet order.
class OrderError : public Error {
 public:
  using Error::Error;
};

/// Evaluation outside the region where the operator is defined.
class DomainError : public Error {
 public:
  using Error::Error;
};

/// Finite-difference stencil left the membership oracle.
class StencilError : public Error {
 public:
  using Error::Error;
};

/// Geometric precondition failed (non-SPD tensor, empty input, ...).
class GeometryError : public Error {
 public:
  using Error::Error;
};

/// Resource guard exceeded (cube budget, sample-count guard).
class SizeError : public Error {
 public:
  using Error::Error;
};

/// Chart bookkeeping mismatch in the atlas pipeline.
class IndexingError : public Error {
 public:
  using Error::Error;
};

/// Missing partition-of-unity data on an overlap sample.
class CoverageError : public Error {
 public:
  using Error::Error;
};

/// Overlap compatibility violated beyond tolerance while gluing.
class GlueError : public Error {
 public:
  using Error::Error;
};

/// A point left the domain of a canonical chart on the mapping space.
class ChartDomainError : public Error {
 public:
  using Error::Error;
};

/// Extension refused because the jet failed the Whitney criterion.
class WhitneyCheckError : public Error {
 public:
  using Error::Error;
};

}  // namespace wkit
