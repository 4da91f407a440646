#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace landmark2vec {

enum class ErrorCode {
  kInvalidN,
  kDimensionMismatch,
  kInvalidMeasurement,
  kEmptyDataset,
  kTooFewPairs,
  kInvalidDimension,
  kIndexOutOfRange,
  kTooFewEpochs,
  kInvalidArgument,
  kDegenerateConfiguration,
  kMissingGroundTruth,
  kZeroWeightLandmark,
  kZeroWeightMeasurement,
  kNonFiniteLoss,
  kParse,
  kIo,
  kConfig,
};

std::string_view to_string(ErrorCode code) noexcept;

// Single exception type for the library; callers dispatch on code().
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code), message_(message) {}

  ErrorCode code() const noexcept { return code_; }
  // what() without the code prefix, for rethrowing with added context.
  const std::string& message() const noexcept { return message_; }

 private:
  ErrorCode code_;
  std::string message_;
};

}  // namespace landmark2vec
