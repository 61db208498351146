/*
 * Copyright 2026 The Blendemo Authors.
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

#pragma once

#include <filesystem>
#include <string>
#include <string_view>

#include "blendemo/nn.hpp"

namespace blendemo {

inline constexpr int kModelFormatVersion = 1;

// Model file layout:
//
//   BLENDEMO-MODEL <version>\n
//   meta <n>\n  <n bytes of JSON>\n
//   weights <count>\n  <count little-endian float64 values>
//   sha256 <64 hex digits>\n
//
// The digest covers every byte before the `sha256` line. Tensors are written
// in Parameters::tensors() order, column-major.
std::string serialize_model(const Model& model);

// Throws Error with kind kVersion, kTruncated, kChecksum or kParse.
Model deserialize_model(std::string_view bytes);

void save_model(const Model& model, const std::filesystem::path& path);
Model load_model(const std::filesystem::path& path);

// Lower-case hex SHA-256.
std::string sha256_hex(std::string_view data);

// UTC timestamp for provenance; honours SOURCE_DATE_EPOCH when set.
std::string provenance_timestamp();

}  // namespace blendemo
