#include "betadd/error.hpp"

namespace betadd {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NonSquareFreeRadicand: return "NonSquareFreeRadicand";
    case ErrorKind::NegativeRadicand: return "NegativeRadicand";
    case ErrorKind::IncompatibleRadicands: return "IncompatibleRadicands";
    case ErrorKind::DivisionByZero: return "DivisionByZero";
    case ErrorKind::NotAllowable: return "NotAllowable";
    case ErrorKind::OutOfDomain: return "OutOfDomain";
    case ErrorKind::EmptyTail: return "EmptyTail";
    case ErrorKind::WrongCase: return "WrongCase";
    case ErrorKind::NotFull: return "NotFull";
    case ErrorKind::DepthExceeded: return "DepthExceeded";
    case ErrorKind::InvalidPoint: return "InvalidPoint";
    case ErrorKind::BoundaryPoint: return "BoundaryPoint";
    case ErrorKind::OrbitBudgetExceeded: return "OrbitBudgetExceeded";
    case ErrorKind::NotEventuallyPeriodic: return "NotEventuallyPeriodic";
    case ErrorKind::ZeroIntegral: return "ZeroIntegral";
    case ErrorKind::ExactBackendRequired: return "ExactBackendRequired";
    case ErrorKind::Unsupported: return "Unsupported";
    case ErrorKind::Parse: return "Parse";
  }
  return "Unknown";
}

}  // namespace betadd
