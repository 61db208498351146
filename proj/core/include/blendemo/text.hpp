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

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

// Small text helpers shared by the file formats.
namespace blendemo::text {

std::vector<std::string_view> split(std::string_view line, char sep);
std::string_view trim(std::string_view s);

// Shortest decimal form that parses back to the same double.
std::string format_double(double value);
// Fixed-point with `digits` decimals.
std::string format_fixed(double value, int digits);

std::optional<double> parse_double(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);

}  // namespace blendemo::text
