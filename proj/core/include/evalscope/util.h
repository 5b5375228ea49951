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

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

namespace evalscope {

std::string sha256_hex(std::span<const uint8_t> bytes);
std::string sha256_hex(std::string_view text);
/// Streams the file; throws Error(kIo) when it cannot be read.
std::string sha256_file(const std::filesystem::path& path);

std::string base64_encode(std::span<const uint8_t> bytes);
/// Throws Error(kInvalidArgument) on malformed input.
std::vector<uint8_t> base64_decode(std::string_view text);

std::vector<uint8_t> read_file_bytes(const std::filesystem::path& path);
std::string read_file_text(const std::filesystem::path& path);
/// Writes to a sibling temporary and renames it into place.
void write_file_atomic(const std::filesystem::path& path, std::string_view contents);

/// Compact JSON with sorted keys (nlohmann objects are already ordered),
/// used wherever output must be byte-stable.
std::string canonical_json(const nlohmann::json& j);

/// Rounds to 6 decimal places for stable JSON output.
double round6(double v);

/// Milliseconds since the Unix epoch.
int64_t unix_millis();
/// RFC 3339 UTC timestamp with millisecond precision.
std::string format_utc(int64_t unix_ms);

/// Random 128-bit identifier as 32 hex characters.
std::string random_id();

}  // namespace evalscope
