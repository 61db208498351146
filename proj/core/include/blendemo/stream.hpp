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
#include <span>
#include <string>
#include <string_view>

#include "blendemo/dataset.hpp"
#include "blendemo/nn.hpp"

namespace blendemo {

struct Prediction {
  ClassLabel label = ClassLabel::kHappy;
  Vector probabilities;
};

// Stateless: zero initial state, one-frame sequence, argmax with ties going
// to the lowest class code. The frame must follow the model's blendshape
// order; `frame_names`, when given, is checked against it.
Prediction predict(const Model& model, const BlendshapeFrame& frame);
Prediction predict(const Model& model, const BlendshapeFrame& frame,
                   std::span<const std::string> frame_names);

struct StreamOptions {
  bool stateful = false;
  // EMA coefficient in [0, 1); weight of the previous smoothed vector.
  std::optional<double> smoothing;
  // Hysteresis: a new label must beat the current one by at least this
  // probability margin. 0 gives plain argmax.
  double tie_threshold = 0.0;
};

struct StreamStep {
  std::uint64_t frame = 0;  // 1-based
  ClassLabel label = ClassLabel::kHappy;
  Vector probabilities;
  Vector raw_probabilities;
};

// Single-consumer session over an immutable model. The model must outlive
// the session.
class StreamSession {
 public:
  // Throws Error(kConfig) for smoothing outside [0,1) or negative threshold.
  StreamSession(const Model& model, StreamOptions options = {});

  StreamStep step(const BlendshapeFrame& frame);
  void reset();

  std::uint64_t frames_seen() const { return frames_seen_; }
  const StreamOptions& options() const { return options_; }
  const HiddenState& hidden() const { return hidden_; }
  const std::optional<Vector>& smoothed() const { return smoothed_; }

 private:
  const Model* model_;
  StreamOptions options_;
  HiddenState hidden_;
  std::optional<Vector> smoothed_;
  std::optional<ClassLabel> last_label_;
  std::uint64_t frames_seen_ = 0;
};

// One stream input line: either comma-separated scores in `names` order or a
// JSON object mapping every name to its score. Blank lines and lines that
// start with '#' yield std::nullopt. Throws Error(kParse).
std::optional<BlendshapeFrame> parse_frame_line(
    std::string_view line, std::span<const std::string> names,
    std::size_t line_number = 0);

// "<frame>,<class name>,<class code>,<p0>,<p1>,<p2>" with 6 decimals.
std::string format_stream_line(const StreamStep& step, const Model& model);

}  // namespace blendemo
