#pragma once

#include <stdexcept>
#include <string>

namespace stokes_branch {

enum class ErrorKind {
  InvalidArgument,
  NearCritical,
  NearResonance,
  NoRoot,
  NoBracket,
  NoTwoRoots,
  NoInteriorMinimum,
  DegenerateLeadingCoefficient,
  NumericalFailure,
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::InvalidArgument: return "InvalidArgument";
    case ErrorKind::NearCritical: return "NearCritical";
    case ErrorKind::NearResonance: return "NearResonance";
    case ErrorKind::NoRoot: return "NoRoot";
    case ErrorKind::NoBracket: return "NoBracket";
    case ErrorKind::NoTwoRoots: return "NoTwoRoots";
    case ErrorKind::NoInteriorMinimum: return "NoInteriorMinimum";
    case ErrorKind::DegenerateLeadingCoefficient: return "DegenerateLeadingCoefficient";
    case ErrorKind::NumericalFailure: return "NumericalFailure";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable failure category.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace stokes_branch
