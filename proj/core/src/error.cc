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

#include "xfertune/error.h"

namespace xfertune {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kMissingColumn: return "MissingColumn";
    case ErrorCode::kNonNumericField: return "NonNumericField";
    case ErrorCode::kDuplicateEntryNo: return "DuplicateEntryNo";
    case ErrorCode::kEmptyTable: return "EmptyTable";
    case ErrorCode::kEmptyInput: return "EmptyInput";
    case ErrorCode::kNonPositiveValue: return "NonPositiveValue";
    case ErrorCode::kTooFewValues: return "TooFewValues";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kDegenerateCut: return "DegenerateCut";
    case ErrorCode::kMalformedModel: return "MalformedModel";
    case ErrorCode::kSchemaVersionMismatch: return "SchemaVersionMismatch";
    case ErrorCode::kEmptyLogs: return "EmptyLogs";
    case ErrorCode::kNoFeasiblePoint: return "NoFeasiblePoint";
    case ErrorCode::kEmptyModel: return "EmptyModel";
    case ErrorCode::kDivisionByZeroThroughput: return "DivisionByZeroThroughput";
    case ErrorCode::kSessionFailure: return "SessionFailure";
    case ErrorCode::kModelMiss: return "ModelMiss";
    case ErrorCode::kIo: return "Io";
  }
  return "Unknown";
}

}  // namespace xfertune
