#include "roadgraph/error.hpp"

namespace roadgraph {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kNotFound: return "NotFound";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kSchemaError: return "SchemaError";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kLabelMissing: return "LabelMissing";
    case ErrorCode::kInvalidFoldCount: return "InvalidFoldCount";
    case ErrorCode::kDegenerateClasses: return "DegenerateClasses";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegenerateCalibration: return "DegenerateCalibration";
    case ErrorCode::kOutOfCalibratedRegion: return "OutOfCalibratedRegion";
    case ErrorCode::kUnknownActorClass: return "UnknownActorClass";
    case ErrorCode::kShapeError: return "ShapeError";
    case ErrorCode::kRankError: return "RankError";
    case ErrorCode::kLabelError: return "LabelError";
    case ErrorCode::kMissingGradient: return "MissingGradient";
    case ErrorCode::kRelationIndexError: return "RelationIndexError";
    case ErrorCode::kDegenerateProjection: return "DegenerateProjection";
    case ErrorCode::kEmptyClip: return "EmptyClip";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kUndefinedAUC: return "UndefinedAUC";
    case ErrorCode::kVocabularyMismatch: return "VocabularyMismatch";
    case ErrorCode::kInternal: return "Internal";
  }
  return "Unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message),
      code_(code) {}

void raise(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace roadgraph
