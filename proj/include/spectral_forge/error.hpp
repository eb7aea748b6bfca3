#pragma once

#include <cstdio>
#include <stdexcept>
#include <string>
#include <string_view>

namespace spectral_forge {

enum class ErrorKind {
  NotHermitian,
  NotNormal,
  NoConvergence,
  NotPositiveDefinite,
  NonFiniteValue,
  NotCommuting,
  DimensionMismatch,
  IllConditioned,
  BadSpec,
  FileError,
  ParseError,
};

constexpr std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::NotHermitian: return "NotHermitian";
    case ErrorKind::NotNormal: return "NotNormal";
    case ErrorKind::NoConvergence: return "NoConvergence";
    case ErrorKind::NotPositiveDefinite: return "NotPositiveDefinite";
    case ErrorKind::NonFiniteValue: return "NonFiniteValue";
    case ErrorKind::NotCommuting: return "NotCommuting";
    case ErrorKind::DimensionMismatch: return "DimensionMismatch";
    case ErrorKind::IllConditioned: return "IllConditioned";
    case ErrorKind::BadSpec: return "BadSpec";
    case ErrorKind::FileError: return "FileError";
    case ErrorKind::ParseError: return "ParseError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the kinds above.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

  /// True for failures of the mathematics (as opposed to usage or I/O).
  bool is_numerical() const noexcept {
    switch (kind_) {
      case ErrorKind::BadSpec:
      case ErrorKind::FileError:
      case ErrorKind::ParseError:
      case ErrorKind::DimensionMismatch:
        return false;
      default:
        return true;
    }
  }

 private:
  ErrorKind kind_;
};

/// Short scientific rendering of a number for diagnostics.
inline std::string format_number(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

}  // namespace spectral_forge
