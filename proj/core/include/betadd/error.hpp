#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace betadd {

enum class ErrorKind {
  NonSquareFreeRadicand,
  NegativeRadicand,
  IncompatibleRadicands,
  DivisionByZero,
  NotAllowable,
  OutOfDomain,
  EmptyTail,
  WrongCase,
  NotFull,
  DepthExceeded,
  InvalidPoint,
  BoundaryPoint,
  OrbitBudgetExceeded,
  NotEventuallyPeriodic,
  ZeroIntegral,
  ExactBackendRequired,
  Unsupported,
  Parse,
};

std::string_view to_string(ErrorKind kind);

/// Every failure raised by the library carries a machine-readable kind.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& what) {
  throw Error(kind, what);
}

}  // namespace betadd
