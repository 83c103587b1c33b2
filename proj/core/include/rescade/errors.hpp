#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace rescade {

// Every failure the library raises on purpose carries a stable category
// string. The CLI prints it as "error: <category>: <message>" and maps it to
// a distinct exit code, so scripts can branch on the category without parsing
// prose.
class Error : public std::runtime_error {
 public:
  Error(std::string category, const std::string& message)
      : std::runtime_error(message), category_(std::move(category)) {}

  const std::string& category() const noexcept { return category_; }

 private:
  std::string category_;
};

// Bad caller input: dimension mismatches, out-of-range coordinates, unknown
// names, malformed flag combinations.
class InvalidArgumentError : public Error {
 public:
  explicit InvalidArgumentError(const std::string& m)
      : Error("invalid_argument", m) {}
};

// A requested lattice or table would exceed the configured memory budget.
class ResourceExhaustedError : public Error {
 public:
  explicit ResourceExhaustedError(const std::string& m)
      : Error("resource_exhausted", m) {}
};

// A target function produced NaN/Inf on the evaluation grid.
class InvalidOracleError : public Error {
 public:
  explicit InvalidOracleError(const std::string& m)
      : Error("invalid_oracle", m) {}
};

// Optimization failed outright (e.g. every restart diverged).
class TrainingFaultError : public Error {
 public:
  explicit TrainingFaultError(const std::string& m)
      : Error("training_fault", m) {}
};

// An invertibility certificate could not be produced or did not hold.
class CertificationError : public Error {
 public:
  explicit CertificationError(const std::string& m)
      : Error("certification_failure", m) {}
};

// The requested bit width exceeds what the index/embedding types can carry.
class UnsupportedPrecisionError : public Error {
 public:
  explicit UnsupportedPrecisionError(const std::string& m)
      : Error("unsupported_precision", m) {}
};

// A residual normalizer is (numerically) zero, so the next residual stage is
// undefined. Not a bug: the previous stage fit exactly.
class ExactFitError : public Error {
 public:
  explicit ExactFitError(const std::string& m)
      : Error("exact_fit_degeneracy", m) {}
};

// File/stream problems, including parse failures of our own formats.
class IoError : public Error {
 public:
  explicit IoError(const std::string& m) : Error("io_error", m) {}
};

}  // namespace rescade
