#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace splineglue {

enum class ErrorKind {
  InvalidInput,
  OutOfDomain,
  NotPositiveDefinite,
  DegeneratePlane,
  EmptySampling,
  NonSymmetric,
  CollarTooShallow,
  DimensionMismatch,
  BandTooWide,
  BudgetInfeasible,
  DisconnectedGraph,
};

std::string_view to_string(ErrorKind kind);

/// Numerical or contract error raised by the library. The message carries a
/// witness (point, entry, value) whenever one is available.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what);

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] void fail(ErrorKind kind, const std::string& what);

}  // namespace splineglue
