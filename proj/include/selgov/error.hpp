#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace selgov {

enum class ErrorCode {
  kInvalidArgument,
  kInfeasibleConstraintSet,
  kEmptyPool,
  kNonExposedAgent,
  kIndexOutOfRange,
  kAllCandidatesBlocked,
  kEmptySurfacedSet,
  kUndefinedGsi,
  kOutOfOrderRecord,
  kParseError,
};

std::string_view error_code_name(ErrorCode code);

// Every failure raised by the library carries a code naming the violated
// invariant, so callers (and the Python layer) can branch on it.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace selgov
