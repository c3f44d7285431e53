#include "splineglue/errors.hpp"

namespace splineglue {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidInput: return "InvalidInput";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::DegeneratePlane: return "DegeneratePlane";
    case ErrorKind::EmptySampling: return "EmptySampling";
    case ErrorKind::NonSymmetric: return "NonSymmetric";
    case ErrorKind::CollarTooShallow: return "CollarTooShallow";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::BandTooWide: return "BandTooWide";
    case ErrorKind::BudgetInfeasible: return "BudgetInfeasible";
    case ErrorKind::DisconnectedGraph: return "DisconnectedGraph";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& what)
    : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

void fail(ErrorKind kind, const std::string& what) { throw Error(kind, what); }

}  // namespace splineglue
