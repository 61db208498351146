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

#include "blendemo/blendshapes.hpp"

#include <algorithm>

#include "blendemo/error.hpp"

namespace blendemo {

std::vector<std::string> canonical_blendshape_names() {
  return {kCanonicalBlendshapeNames.begin(), kCanonicalBlendshapeNames.end()};
}

std::optional<std::size_t> find_name(std::span<const std::string> names,
                                     std::string_view name) {
  auto it = std::find(names.begin(), names.end(), name);
  if (it == names.end()) return std::nullopt;
  return static_cast<std::size_t>(it - names.begin());
}

std::string_view class_name(ClassLabel label) {
  switch (label) {
    case ClassLabel::kHappy: return "happy";
    case ClassLabel::kUnknown: return "unknown";
    case ClassLabel::kSad: return "sad";
  }
  return "?";
}

std::string_view source_name(SourceLabel label) {
  switch (label) {
    case SourceLabel::kAngry: return "angry";
    case SourceLabel::kDisgust: return "disgust";
    case SourceLabel::kAfraid: return "afraid";
    case SourceLabel::kHappy: return "happy";
    case SourceLabel::kSad: return "sad";
    case SourceLabel::kSurprise: return "surprise";
    case SourceLabel::kNeutral: return "neutral";
  }
  return "?";
}

ClassLabel class_label_from_code(int code) {
  if (code < 0 || code >= kNumClasses) {
    throw Error(ErrorKind::kInvalidLabel,
                "class code " + std::to_string(code) + " is not in {0,1,2}");
  }
  return static_cast<ClassLabel>(code);
}

SourceLabel source_label_from_name(std::string_view name) {
  for (SourceLabel label : kAllSourceLabels) {
    if (source_name(label) == name) return label;
  }
  throw Error(ErrorKind::kInvalidLabel,
              "unknown source label '" + std::string(name) + "'");
}

ClassLabel remap_label(SourceLabel src) {
  switch (src) {
    case SourceLabel::kHappy: return ClassLabel::kHappy;
    case SourceLabel::kSad: return ClassLabel::kSad;
    default: return ClassLabel::kUnknown;
  }
}

}  // namespace blendemo
