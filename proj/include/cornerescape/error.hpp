// Copyright 2026 The cornerescape Authors
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

#ifndef CORNERESCAPE_ERROR_HPP
#define CORNERESCAPE_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace cornerescape {

enum class ErrorCode {
  kInvalidArgument,
  kMalformedConfig,
  kNotOnL,
  kShiftBlocked,
  kClipFailed,
  kFrameConflict,
  kCaseGap,
  kUnsupportedFamily,
  kBudgetExhausted,
};

inline std::string_view to_string(ErrorCode c) {
  switch (c) {
    case ErrorCode::kInvalidArgument: return "INVALID_ARGUMENT";
    case ErrorCode::kMalformedConfig: return "MALFORMED_CONFIG";
    case ErrorCode::kNotOnL: return "NOT_ON_L";
    case ErrorCode::kShiftBlocked: return "SHIFT_BLOCKED";
    case ErrorCode::kClipFailed: return "CLIP_FAILED";
    case ErrorCode::kFrameConflict: return "FRAME_CONFLICT";
    case ErrorCode::kCaseGap: return "CASE_GAP";
    case ErrorCode::kUnsupportedFamily: return "UNSUPPORTED_FAMILY";
    case ErrorCode::kBudgetExhausted: return "BUDGET_EXHAUSTED";
  }
  return "UNKNOWN";
}

/// The one exception type thrown by the library. The code is stable and
/// machine-readable; the message is for humans.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what),
        code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace cornerescape

#endif  // CORNERESCAPE_ERROR_HPP
