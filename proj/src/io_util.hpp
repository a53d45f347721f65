/*
 * Copyright 2026 The Ladder Authors.
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

#ifndef LADDER_SRC_IO_UTIL_HPP_
#define LADDER_SRC_IO_UTIL_HPP_

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "json.hpp"

namespace ladder::internal {

std::string ReadTextFile(const std::filesystem::path& path);
std::vector<std::uint8_t> ReadBinaryFile(const std::filesystem::path& path);

// Writes to "<path>.tmp" then renames over `path`.
void WriteFileAtomic(const std::filesystem::path& path, std::string_view contents);
void WriteFileAtomic(const std::filesystem::path& path, std::span<const std::uint8_t> contents);

// Pretty JSON with sorted keys and a trailing newline.
std::string DumpJson(const nlohmann::json& value);
void WriteJsonAtomic(const std::filesystem::path& path, const nlohmann::json& value);
nlohmann::json ReadJsonFile(const std::filesystem::path& path);

// One JSON value per non-blank line.
std::vector<nlohmann::json> ReadJsonLines(const std::filesystem::path& path);
std::string DumpJsonLines(const std::vector<nlohmann::json>& rows);

std::string Sha256Hex(std::string_view data);

// Resolves `ref` against `base_dir` unless it is absolute.
std::filesystem::path ResolvePath(const std::filesystem::path& base_dir, const std::string& ref);

}  // namespace ladder::internal

#endif  // LADDER_SRC_IO_UTIL_HPP_
