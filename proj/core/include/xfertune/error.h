/*
 * Copyright 2026 The xfertune Authors.
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *     https://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#ifndef XFERTUNE_ERROR_H_
#define XFERTUNE_ERROR_H_

#include <stdexcept>
#include <string>
#include <string_view>

namespace xfertune {

enum class ErrorCode {
  kMissingColumn,
  kNonNumericField,
  kDuplicateEntryNo,
  kEmptyTable,
  kEmptyInput,
  kNonPositiveValue,
  kTooFewValues,
  kInvalidArgument,
  kDegenerateCut,
  kMalformedModel,
  kSchemaVersionMismatch,
  kEmptyLogs,
  kNoFeasiblePoint,
  kEmptyModel,
  kDivisionByZeroThroughput,
  kSessionFailure,
  kModelMiss,
  kIo,
};

std::string_view ErrorCodeName(ErrorCode code);

// All library failures are reported through this type; `code()` carries the
// contract-level error kind so callers can branch without parsing messages.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

}  // namespace xfertune

#endif  // XFERTUNE_ERROR_H_
