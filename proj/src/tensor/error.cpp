#include "oldn/error.hpp"

namespace oldn {

const char* to_string(ErrorCode code) noexcept {
  switch (code) {
    case ErrorCode::kShapeMismatch: return "shape mismatch";
    case ErrorCode::kDivisibility: return "divisibility violation";
    case ErrorCode::kInvalidArgument: return "invalid argument";
    case ErrorCode::kNonScalarLoss: return "non-scalar loss";
    case ErrorCode::kDanglingNode: return "dangling node";
    case ErrorCode::kMissingGradient: return "missing gradient";
    case ErrorCode::kEmptyInput: return "empty input";
    case ErrorCode::kBadMagic: return "bad magic";
    case ErrorCode::kBadVersion: return "unsupported version";
    case ErrorCode::kTruncated: return "truncated stream";
    case ErrorCode::kInvalidCodeTable: return "invalid code-length table";
    case ErrorCode::kCorruptPayload: return "corrupt payload";
    case ErrorCode::kTrailingData: return "trailing data";
    case ErrorCode::kMalformedHeader: return "malformed header";
    case ErrorCode::kUnsupportedFormat: return "unsupported format";
    case ErrorCode::kSizeMismatch: return "size mismatch";
    case ErrorCode::kIo: return "i/o error";
    case ErrorCode::kConfig: return "configuration error";
    case ErrorCode::kNoOverlap: return "no overlap";
    case ErrorCode::kTooFewPoints: return "too few points";
  }
  return "unknown error";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(std::string(to_string(code)) + ": " + message), code_(code) {}

}  // namespace oldn
