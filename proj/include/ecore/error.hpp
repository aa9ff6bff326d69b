#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecore {

enum class ErrorCode {
  NonMonotone,
  NonPositive,
  BadModulus,
  UnbalancedX,
  BadParameter,
  DuplicatePoints,
  NotAPermutation,
  BadResidue,
  OnLattice,
  EmptySample,
  Io,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::NonMonotone: return "NonMonotone";
    case ErrorCode::NonPositive: return "NonPositive";
    case ErrorCode::BadModulus: return "BadModulus";
    case ErrorCode::UnbalancedX: return "UnbalancedX";
    case ErrorCode::BadParameter: return "BadParameter";
    case ErrorCode::DuplicatePoints: return "DuplicatePoints";
    case ErrorCode::NotAPermutation: return "NotAPermutation";
    case ErrorCode::BadResidue: return "BadResidue";
    case ErrorCode::OnLattice: return "OnLattice";
    case ErrorCode::EmptySample: return "EmptySample";
    case ErrorCode::Io: return "Io";
  }
  return "Unknown";
}

/// Every failure raised by the library carries one of the codes above.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

inline void require_modulus(long long e) {
  if (e < 2) throw Error(ErrorCode::BadModulus, "e must be >= 2, got " + std::to_string(e));
}

}  // namespace ecore
