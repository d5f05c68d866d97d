// SPDX-License-Identifier: Apache-2.0
#include "ddi/common/error.hpp"

namespace ddi {

std::string_view errorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidSmiles: return "InvalidSmiles";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kRenderFailure: return "RenderFailure";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kIndexOutOfRange: return "IndexOutOfRange";
    case ErrorCode::kAllMasked: return "AllMasked";
    case ErrorCode::kDomainError: return "DomainError";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kParseError: return "ParseError";
    case ErrorCode::kUnknownDrugReference: return "UnknownDrugReference";
    case ErrorCode::kClassTooSmall: return "ClassTooSmall";
    case ErrorCode::kEmptyPartition: return "EmptyPartition";
    case ErrorCode::kConfigError: return "ConfigError";
    case ErrorCode::kDataError: return "DataError";
    case ErrorCode::kNonFiniteLoss: return "NonFiniteLoss";
    case ErrorCode::kVocabularyMismatch: return "VocabularyMismatch";
    case ErrorCode::kModalityMismatch: return "ModalityMismatch";
    case ErrorCode::kTooFewSamples: return "TooFewSamples";
    case ErrorCode::kIoError: return "IoError";
  }
  return "Unknown";
}

}  // namespace ddi
