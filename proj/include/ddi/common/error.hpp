// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace ddi {

enum class ErrorCode {
  kInvalidSmiles,
  kLengthMismatch,
  kRenderFailure,
  kShapeMismatch,
  kIndexOutOfRange,
  kAllMasked,
  kDomainError,
  kEmptyInput,
  kParseError,
  kUnknownDrugReference,
  kClassTooSmall,
  kEmptyPartition,
  kConfigError,
  kDataError,
  kNonFiniteLoss,
  kVocabularyMismatch,
  kModalityMismatch,
  kTooFewSamples,
  kIoError,
};

std::string_view errorCodeName(ErrorCode code);

//! Exception type used throughout the library. The code is stable and is what
//! the CLI reports in its machine-readable error output.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message) : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }
  std::string_view codeName() const noexcept { return errorCodeName(code_); }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void fail(ErrorCode code, const std::string& message) { throw Error(code, message); }

inline void require(bool condition, ErrorCode code, const std::string& message) {
  if (!condition) {
    throw Error(code, message);
  }
}

}  // namespace ddi
