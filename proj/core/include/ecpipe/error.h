#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ecpipe {

// Every failure the library reports carries one of these codes. The CLI maps
// them onto exit codes through is_validation_error().
enum class ErrorCode {
  kNoNeighbor,
  kMissingPrice,
  kInvalidTau,
  kInvalidK,
  kFileUnreadable,
  kSchemaViolation,
  kUnknownSector,
  kParseError,
  kDuplicateCategory,
  kEmptyDocument,
  kDimensionMismatch,
  kShapeMismatch,
  kEmptyGraph,
  kNonFiniteLoss,
  kEmptyVocab,
  kDegenerateLabels,
  kEmptyInput,
  kRankDeficient,
  kSeparation,
  kNonConvergence,
  kInsufficientData,
  kInvalidConfig,
};

std::string_view to_string(ErrorCode code);

// True for errors caused by malformed user input (bad config, bad schema,
// bad parameters) as opposed to data that is well-formed but unusable.
bool is_validation_error(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace ecpipe
