#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace roadgraph {

enum class ErrorCode {
  kNotFound,
  kParseError,
  kSchemaError,
  kConfigError,
  kIoError,
  kLabelMissing,
  kInvalidFoldCount,
  kDegenerateClasses,
  kInvalidArgument,
  kDegenerateCalibration,
  kOutOfCalibratedRegion,
  kUnknownActorClass,
  kShapeError,
  kRankError,
  kLabelError,
  kMissingGradient,
  kRelationIndexError,
  kDegenerateProjection,
  kEmptyClip,
  kEmptyDataset,
  kUndefinedAUC,
  kVocabularyMismatch,
  kInternal,
};

std::string_view to_string(ErrorCode code);

// Every failure raised by the library carries one of the codes above so
// callers (and the CLI exit-code mapping) can dispatch without parsing text.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void raise(ErrorCode code, const std::string& message);

}  // namespace roadgraph
