// Copyright 2026 The Evalscope Authors
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

#include "evalscope/error.h"

namespace evalscope {

const char* error_code_name(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "invalid_argument";
    case ErrorCode::kSyntax: return "syntax_error";
    case ErrorCode::kSchema: return "schema_error";
    case ErrorCode::kUnsupported: return "unsupported";
    case ErrorCode::kNotFound: return "not_found";
    case ErrorCode::kAlreadyExists: return "already_exists";
    case ErrorCode::kChecksumMismatch: return "checksum_mismatch";
    case ErrorCode::kNetwork: return "network_error";
    case ErrorCode::kNoBackend: return "no_backend";
    case ErrorCode::kShapeMismatch: return "shape_mismatch";
    case ErrorCode::kFailedPrecondition: return "failed_precondition";
    case ErrorCode::kMalformedSpan: return "malformed_span";
    case ErrorCode::kIo: return "io_error";
    case ErrorCode::kTimeout: return "timeout";
    case ErrorCode::kInternal: return "internal";
  }
  return "unknown";
}

Error::Error(ErrorCode code, const std::string& message)
    : std::runtime_error(message), code_(code) {}

SyntaxError::SyntaxError(int line, int column, const std::string& message)
    : Error(ErrorCode::kSyntax, "line " + std::to_string(line) + ", column " +
                                    std::to_string(column) + ": " + message),
      line_(line),
      column_(column) {}

SchemaError::SchemaError(std::string path, const std::string& message,
                         ErrorCode code)
    : Error(code, (path.empty() ? std::string("<root>") : path) + ": " + message),
      path_(std::move(path)) {}

}  // namespace evalscope
