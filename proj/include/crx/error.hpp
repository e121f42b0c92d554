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

#ifndef CRX_ERROR_HPP
#define CRX_ERROR_HPP

#include <stdexcept>
#include <string>
#include <string_view>

namespace crx {

enum class ErrorCode {
  EmptyCohort,
  EmptyInput,
  EmptyMatrix,
  ZeroExpected,
  FormatError,
  VersionError,
  IntegrityError,
  StaleProposal,
  NotFound,
  EmptyHistory,
  BadQuery,
  ConfigError,
  IoError,
};

constexpr std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::EmptyCohort: return "EmptyCohort";
    case ErrorCode::EmptyInput: return "EmptyInput";
    case ErrorCode::EmptyMatrix: return "EmptyMatrix";
    case ErrorCode::ZeroExpected: return "ZeroExpected";
    case ErrorCode::FormatError: return "FormatError";
    case ErrorCode::VersionError: return "VersionError";
    case ErrorCode::IntegrityError: return "IntegrityError";
    case ErrorCode::StaleProposal: return "StaleProposal";
    case ErrorCode::NotFound: return "NotFound";
    case ErrorCode::EmptyHistory: return "EmptyHistory";
    case ErrorCode::BadQuery: return "BadQuery";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
  }
  return "Unknown";
}

/// Every failure raised by the library carries a machine-readable code.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace crx

#endif  // CRX_ERROR_HPP
