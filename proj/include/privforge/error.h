// Copyright 2026 The PrivForge Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#ifndef PRIVFORGE_ERROR_H_
#define PRIVFORGE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace privforge {

enum class ErrorCode {
  kInvalidArgument,
  kIo,
  kParseError,
  kMissingField,
  kSpecialTokenInOutput,
  kEmptyCorpus,
  kTokenOutOfRange,
  kEmptySnippet,
  kNonFiniteGradient,
  kEmptyBatch,
  kSigmaZero,
  kUnreachable,
  kPiiCollision,
  kEmptyText,
  kConfig,
  kCheckpoint,
  kStage,
};

std::string_view ErrorCodeName(ErrorCode code);

// All recoverable failures in the library are reported as Error. Interpreter
// faults are not errors: they come back as ExecResult data.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace privforge

#endif  // PRIVFORGE_ERROR_H_
