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

#include <array>
#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace blendemo {

inline constexpr std::size_t kNumBlendshapes = 52;

// Canonical blendshape order, as emitted by the MediaPipe face landmarker.
inline constexpr std::array<std::string_view, kNumBlendshapes>
    kCanonicalBlendshapeNames = {
        "_neutral",          "browDownLeft",       "browDownRight",
        "browInnerUp",       "browOuterUpLeft",    "browOuterUpRight",
        "cheekPuff",         "cheekSquintLeft",    "cheekSquintRight",
        "eyeBlinkLeft",      "eyeBlinkRight",      "eyeLookDownLeft",
        "eyeLookDownRight",  "eyeLookInLeft",      "eyeLookInRight",
        "eyeLookOutLeft",    "eyeLookOutRight",    "eyeLookUpLeft",
        "eyeLookUpRight",    "eyeSquintLeft",      "eyeSquintRight",
        "eyeWideLeft",       "eyeWideRight",       "jawForward",
        "jawLeft",           "jawOpen",            "jawRight",
        "mouthClose",        "mouthDimpleLeft",    "mouthDimpleRight",
        "mouthFrownLeft",    "mouthFrownRight",    "mouthFunnel",
        "mouthLeft",         "mouthLowerDownLeft", "mouthLowerDownRight",
        "mouthPressLeft",    "mouthPressRight",    "mouthPucker",
        "mouthRight",        "mouthRollLower",     "mouthRollUpper",
        "mouthShrugLower",   "mouthShrugUpper",    "mouthSmileLeft",
        "mouthSmileRight",   "mouthStretchLeft",   "mouthStretchRight",
        "mouthUpperUpLeft",  "mouthUpperUpRight",  "noseSneerLeft",
        "noseSneerRight",
};

std::vector<std::string> canonical_blendshape_names();

// Returns the position of `name` in `names`, if present.
std::optional<std::size_t> find_name(std::span<const std::string> names,
                                     std::string_view name);

// Three-class target used by the classifier. Codes are fixed.
enum class ClassLabel : int { kHappy = 0, kUnknown = 1, kSad = 2 };

inline constexpr int kNumClasses = 3;

// The seven FER2013 expression classes.
enum class SourceLabel : int {
  kAngry = 0,
  kDisgust = 1,
  kAfraid = 2,
  kHappy = 3,
  kSad = 4,
  kSurprise = 5,
  kNeutral = 6,
};

inline constexpr std::array<SourceLabel, 7> kAllSourceLabels = {
    SourceLabel::kAngry, SourceLabel::kDisgust,  SourceLabel::kAfraid,
    SourceLabel::kHappy, SourceLabel::kSad,      SourceLabel::kSurprise,
    SourceLabel::kNeutral,
};

inline constexpr int code(ClassLabel label) { return static_cast<int>(label); }

std::string_view class_name(ClassLabel label);
std::string_view source_name(SourceLabel label);

// Both throw Error(kInvalidLabel) on unknown input.
ClassLabel class_label_from_code(int code);
SourceLabel source_label_from_name(std::string_view name);

// happy -> Happy, sad -> Sad, everything else -> Unknown.
ClassLabel remap_label(SourceLabel src);

}  // namespace blendemo
