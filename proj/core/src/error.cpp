#include "whitney/error.hpp"

namespace whitney {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kArityMismatch: return "ArityMismatch";
    case ErrorCode::kSingularPoint: return "SingularPoint";
    case ErrorCode::kUnsupportedNode: return "UnsupportedNode";
    case ErrorCode::kNotExact: return "NotExact";
    case ErrorCode::kPiecewiseGap: return "PiecewiseGap";
    case ErrorCode::kBaseMismatch: return "BaseMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kNotAGraphCell: return "NotAGraphCell";
    case ErrorCode::kConsistencyViolation: return "ConsistencyViolation";
    case ErrorCode::kUnknownStratum: return "UnknownStratum";
    case ErrorCode::kConvergenceFailure: return "ConvergenceFailure";
    case ErrorCode::kMeshDisconnected: return "MeshDisconnected";
    case ErrorCode::kOnZ: return "OnZ";
    case ErrorCode::kUnsupportedDescriptor: return "UnsupportedDescriptor";
    case ErrorCode::kSlackTooLarge: return "SlackTooLarge";
    case ErrorCode::kSupportLeak: return "SupportLeak";
    case ErrorCode::kFlatnessDeclarationMissing: return "FlatnessDeclarationMissing";
    case ErrorCode::kDerivativeUnavailable: return "DerivativeUnavailable";
    case ErrorCode::kStratificationInvalid: return "StratificationInvalid";
    case ErrorCode::kSequenceLeavesCone: return "SequenceLeavesCone";
    case ErrorCode::kDegenerateScales: return "DegenerateScales";
    case ErrorCode::kStencilOutOfDomain: return "StencilOutOfDomain";
    case ErrorCode::kParse: return "ParseError";
  }
  return "Unknown";
}

}  // namespace whitney
