#include "brsim/errors.hpp"

namespace brsim {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonPositiveDefinite: return "NonPositiveDefinite";
    case ErrorKind::EmptyMarkSpace: return "EmptyMarkSpace";
    case ErrorKind::InvalidLattice: return "InvalidLattice";
    case ErrorKind::InvalidWindow: return "InvalidWindow";
    case ErrorKind::RejectionBudgetExceeded: return "RejectionBudgetExceeded";
    case ErrorKind::ZeroAcceptance: return "ZeroAcceptance";
    case ErrorKind::DomainError: return "DomainError";
    case ErrorKind::AsymmetricShifts: return "AsymmetricShifts";
    case ErrorKind::EmptySample: return "EmptySample";
    case ErrorKind::BlockMismatch: return "BlockMismatch";
    case ErrorKind::UnknownGridPoint: return "UnknownGridPoint";
    case ErrorKind::ConfigError: return "ConfigError";
    case ErrorKind::IoError: return "IoError";
  }
  return "Unknown";
}

Error::Error(ErrorKind kind, const std::string& detail)
    : std::runtime_error(std::string(to_string(kind)) + ": " + detail),
      kind_(kind),
      detail_(detail) {}

}  // namespace brsim
