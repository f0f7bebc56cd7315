#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace whitney {

/// Failure categories raised by the engine. The CLI maps them onto exit codes.
enum class ErrorCode {
  kArityMismatch,
  kSingularPoint,
  kUnsupportedNode,
  kNotExact,
  kPiecewiseGap,
  kBaseMismatch,
  kShapeMismatch,
  kNotAGraphCell,
  kConsistencyViolation,
  kUnknownStratum,
  kConvergenceFailure,
  kMeshDisconnected,
  kOnZ,
  kUnsupportedDescriptor,
  kSlackTooLarge,
  kSupportLeak,
  kFlatnessDeclarationMissing,
  kDerivativeUnavailable,
  kStratificationInvalid,
  kSequenceLeavesCone,
  kDegenerateScales,
  kStencilOutOfDomain,
  kParse,
};

std::string_view to_string(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& what) { throw Error(code, what); }

}  // namespace whitney
