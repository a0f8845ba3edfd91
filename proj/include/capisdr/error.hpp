// Copyright 2026 The capisdr Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace capisdr {

enum class ErrorCode {
  kInvalidArgument,
  kLengthMismatch,
  kSampleRateMismatch,
  kSilentReference,
  kSizeLimit,
  kEmptyReference,
  kDuplicateLabels,
  kCountMismatch,
  kLabelMultisetMismatch,
  kUnsupportedFormat,
  kCorruptFile,
  kChannelOutOfRange,
  kIoError,
  kManifestError,
};

inline std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kSampleRateMismatch: return "SampleRateMismatch";
    case ErrorCode::kSilentReference: return "SilentReference";
    case ErrorCode::kSizeLimit: return "SizeLimit";
    case ErrorCode::kEmptyReference: return "EmptyReference";
    case ErrorCode::kDuplicateLabels: return "DuplicateLabels";
    case ErrorCode::kCountMismatch: return "CountMismatch";
    case ErrorCode::kLabelMultisetMismatch: return "LabelMultisetMismatch";
    case ErrorCode::kUnsupportedFormat: return "UnsupportedFormat";
    case ErrorCode::kCorruptFile: return "CorruptFile";
    case ErrorCode::kChannelOutOfRange: return "ChannelOutOfRange";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kManifestError: return "ManifestError";
  }
  return "Unknown";
}

// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace capisdr
