#include "landmark2vec/error.hpp"

namespace landmark2vec {

std::string_view to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kInvalidN: return "InvalidN";
    case ErrorCode::kDimensionMismatch: return "DimensionMismatch";
    case ErrorCode::kInvalidMeasurement: return "InvalidMeasurement";
    case ErrorCode::kEmptyDataset: return "EmptyDataset";
    case ErrorCode::kTooFewPairs: return "TooFewPairs";
    case ErrorCode::kInvalidDimension: return "InvalidDimension";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kTooFewEpochs: return "TooFewEpochs";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::kMissingGroundTruth: return "MissingGroundTruth";
    case ErrorCode::kZeroWeightLandmark: return "ZeroWeightLandmark";
    case ErrorCode::kZeroWeightMeasurement: return "ZeroWeightMeasurement";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kParse: return "ParseError";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kConfig: return "ConfigError";
  }
  return "Unknown";
}

}  // namespace landmark2vec
