#pragma once

#include <stdexcept>
#include <string>

namespace oldn {

enum class ErrorCode {
  kShapeMismatch,
  kDivisibility,
  kInvalidArgument,
  kNonScalarLoss,
  kDanglingNode,
  kMissingGradient,
  kEmptyInput,
  kBadMagic,
  kBadVersion,
  kTruncated,
  kInvalidCodeTable,
  kCorruptPayload,
  kTrailingData,
  kMalformedHeader,
  kUnsupportedFormat,
  kSizeMismatch,
  kIo,
  kConfig,
  kNoOverlap,
  kTooFewPoints,
};

const char* to_string(ErrorCode code) noexcept;

// Every failure raised by the library carries a machine-checkable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace oldn
