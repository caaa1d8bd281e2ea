#pragma once

#include <stdexcept>
#include <string>

namespace hkreg {

/// Violated input contract (dimension mismatch, empty list, bad parameter).
class ContractViolation : public std::invalid_argument {
 public:
  explicit ContractViolation(const std::string& what) : std::invalid_argument(what) {}
};

/// Mathematical precondition of a theorem check not met (maps to exit 65 in the CLI).
class PreconditionError : public std::invalid_argument {
 public:
  explicit PreconditionError(const std::string& what) : std::invalid_argument(what) {}
};

/// Numerical failure: factorization breakdown after jitter escalation,
/// quadratic form negative beyond PSD tolerance, divergent objective.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

/// Requested moment lies outside the noise family's finite range.
class InfiniteMomentError : public std::runtime_error {
 public:
  explicit InfiniteMomentError(const std::string& what) : std::runtime_error(what) {}
};

/// Inner quadrature produced a non-finite value or failed to converge.
class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what) : std::runtime_error(what) {}
};

/// Iterative optimizer failed (line-search breakdown, iteration stall).
class OptimizationError : public std::runtime_error {
 public:
  explicit OptimizationError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace hkreg
