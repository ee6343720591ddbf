#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace brsim {

enum class ErrorKind {
  NonPositiveDefinite,
  EmptyMarkSpace,
  InvalidLattice,
  InvalidWindow,
  RejectionBudgetExceeded,
  ZeroAcceptance,
  DomainError,
  AsymmetricShifts,
  EmptySample,
  BlockMismatch,
  UnknownGridPoint,
  ConfigError,
  IoError,
};

std::string_view to_string(ErrorKind kind);

/// Library error. `what()` reads "<Kind>: <detail>".
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& detail);

  ErrorKind kind() const noexcept { return kind_; }
  const std::string& detail() const noexcept { return detail_; }

 private:
  ErrorKind kind_;
  std::string detail_;
};

}  // namespace brsim
