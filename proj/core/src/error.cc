#include "ecpipe/error.h"

namespace ecpipe {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNoNeighbor: return "NoNeighbor";
    case ErrorCode::kMissingPrice: return "MissingPrice";
    case ErrorCode::kInvalidTau: return "InvalidTau";
    case ErrorCode::kInvalidK: return "InvalidK";
    case ErrorCode::kFileUnreadable: return "FileUnreadable";
    case ErrorCode::kSchemaViolation: return "SchemaViolation";
    case ErrorCode::kUnknownSector: return "UnknownSector";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kDuplicateCategory: return "DuplicateCategory";
    case ErrorCode::kEmptyDocument: return "EmptyDocument";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kEmptyGraph: return "EmptyGraph";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kEmptyVocab: return "EmptyVocab";
    case ErrorCode::kDegenerateLabels: return "DegenerateLabels";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kSeparation: return "Separation";
    case ErrorCode::kNonConvergence: return "NonConvergence";
    case ErrorCode::kInsufficientData: return "InsufficientData";
    case ErrorCode::kInvalidConfig: return "InvalidConfig";
  }
  return "Unknown";
}

bool is_validation_error(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidTau:
    case ErrorCode::kInvalidK:
    case ErrorCode::kSchemaViolation:
    case ErrorCode::kUnknownSector:
    case ErrorCode::kParseError:
    case ErrorCode::kDuplicateCategory:
    case ErrorCode::kDimensionMismatch:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kInvalidConfig:
      return true;
    default:
      return false;
  }
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

}  // namespace ecpipe
