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

#pragma once

#include <stdexcept>
#include <string>

namespace evalscope {

enum class ErrorCode {
  kInvalidArgument,
  kSyntax,
  kSchema,
  kUnsupported,
  kNotFound,
  kAlreadyExists,
  kChecksumMismatch,
  kNetwork,
  kNoBackend,
  kShapeMismatch,
  kFailedPrecondition,
  kMalformedSpan,
  kIo,
  kTimeout,
  kInternal,
};

const char* error_code_name(ErrorCode code);

/// Base exception for every failure raised by the library.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message);

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

/// Malformed document text. Line and column are 1-based.
class SyntaxError : public Error {
 public:
  SyntaxError(int line, int column, const std::string& message);

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

/// A well-formed document that does not match the expected schema.
class SchemaError : public Error {
 public:
  SchemaError(std::string path, const std::string& message,
              ErrorCode code = ErrorCode::kSchema);

  const std::string& path() const { return path_; }

 private:
  std::string path_;
};

}  // namespace evalscope
