// error.hpp
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

namespace ctcfuse {

enum class ErrorCode {
  // emission / alphabet files
  BadMagic,
  DimensionMismatch,
  NonFiniteValue,
  TruncatedFile,
  NormalizationViolation,
  IoFailure,
  InvalidAlphabet,
  // text normalization
  InvalidPattern,
  // segmentation
  DuplicateId,
  InvalidUtterance,
  // language model
  OrderOutOfRange,
  DegenerateCounts,
  MalformedArpa,
  OrderTooHigh,
  // decoding
  EmptyBeam,
  InstanceTooLarge,
  // evaluation
  EmptyReference,
  EmptyList,
  IdMismatch,
  // dataset statistics
  EmptyDataset,
};

// Process exit codes used by the CLI. Every ErrorCode maps to exactly one.
enum class ExitStatus : int {
  Ok = 0,
  Usage = 1,
  Data = 2,
  Internal = 3,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string &what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const { return code_; }

  ExitStatus exit_status() const {
    switch (code_) {
      case ErrorCode::EmptyBeam:
      case ErrorCode::InstanceTooLarge:
        return ExitStatus::Internal;
      default:
        return ExitStatus::Data;
    }
  }

 private:
  ErrorCode code_;
};

const char *error_code_name(ErrorCode code);

}  // namespace ctcfuse
