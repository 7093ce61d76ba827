#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace otlab {

enum class ErrorCode {
  DimensionMismatch,
  NegativeMass,
  MassNotOne,
  MetricViolation,
  InfiniteCostInBoundedMode,
  UnboundedCost,
  NegativeCost,
  UnboundedTransform,
  InfeasibleFiniteCost,
  InfeasibleInput,
  InfeasibleArguments,
  InfeasiblePotentials,
  SupportTooLarge,
  MissingMetric,
  BudgetExceeded,
  NoFeasibleTreeDual,
  UnknownFixture,
  InvalidArgument,
  ParseError,
};

std::string_view to_string(ErrorCode code);

/// Every failure raised by the library carries one of the codes above so
/// callers (notably the CLI) can map them to exit statuses without parsing
/// messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace otlab
