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

#include "blendemo/stream.hpp"

#include <algorithm>

#include "blendemo/error.hpp"
#include "blendemo/featsel.hpp"
#include "blendemo/text.hpp"
#include "blendemo/trainer.hpp"
#include "json.hpp"

namespace blendemo {
namespace {

Vector masked_vector(const Model& model, const BlendshapeFrame& frame) {
  auto masked = apply_mask(frame, model.mask);
  return Eigen::Map<const Vector>(masked.data(),
                                  static_cast<Eigen::Index>(masked.size()));
}

[[noreturn]] void line_error(std::size_t line_number, const std::string& what) {
  std::string where =
      line_number ? "line " + std::to_string(line_number) + ": " : "";
  throw Error(ErrorKind::kParse, where + what);
}

}  // namespace

Prediction predict(const Model& model, const BlendshapeFrame& frame) {
  Vector x = masked_vector(model, frame);
  auto fwd = forward(model, std::span<const Vector>(&x, 1));
  return {argmax_label(fwd.probabilities), fwd.probabilities};
}

Prediction predict(const Model& model, const BlendshapeFrame& frame,
                   std::span<const std::string> frame_names) {
  if (!std::ranges::equal(frame_names, model.mask.source_names())) {
    throw Error(ErrorKind::kMaskMismatch,
                "frame blendshape names do not match the model's name list");
  }
  return predict(model, frame);
}

StreamSession::StreamSession(const Model& model, StreamOptions options)
    : model_(&model), options_(options), hidden_(zero_state(model.params)) {
  if (options_.smoothing &&
      !(*options_.smoothing >= 0.0 && *options_.smoothing < 1.0)) {
    throw Error(ErrorKind::kConfig, "smoothing coefficient must lie in [0,1)");
  }
  if (!(options_.tie_threshold >= 0.0)) {
    throw Error(ErrorKind::kConfig, "tie threshold must be non-negative");
  }
}

StreamStep StreamSession::step(const BlendshapeFrame& frame) {
  Vector x = masked_vector(*model_, frame);
  const HiddenState* start = options_.stateful ? &hidden_ : nullptr;
  auto fwd = forward(*model_, std::span<const Vector>(&x, 1), start);
  if (options_.stateful) hidden_ = std::move(fwd.state);

  StreamStep out;
  out.frame = ++frames_seen_;
  out.raw_probabilities = fwd.probabilities;
  if (options_.smoothing && smoothed_) {
    const double beta = *options_.smoothing;
    Vector mixed = beta * *smoothed_ + (1.0 - beta) * fwd.probabilities;
    smoothed_ = mixed / mixed.sum();
  } else {
    smoothed_ = fwd.probabilities;
  }
  out.probabilities = *smoothed_;

  ClassLabel label = argmax_label(out.probabilities);
  if (last_label_ && label != *last_label_) {
    double margin = out.probabilities[code(label)] -
                    out.probabilities[code(*last_label_)];
    if (margin < options_.tie_threshold) label = *last_label_;
  }
  last_label_ = label;
  out.label = label;
  return out;
}

void StreamSession::reset() {
  hidden_ = zero_state(model_->params);
  smoothed_.reset();
  last_label_.reset();
  frames_seen_ = 0;
}

std::optional<BlendshapeFrame> parse_frame_line(
    std::string_view line, std::span<const std::string> names,
    std::size_t line_number) {
  auto body = text::trim(line);
  if (body.empty() || body.front() == '#') return std::nullopt;

  BlendshapeFrame frame;
  frame.scores.assign(names.size(), 0.0);
  if (body.front() == '{') {
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(body);
    } catch (const nlohmann::json::exception& e) {
      line_error(line_number, std::string("invalid JSON: ") + e.what());
    }
    if (!j.is_object()) line_error(line_number, "expected a JSON object");
    std::vector<bool> filled(names.size(), false);
    for (const auto& [key, value] : j.items()) {
      auto pos = find_name(names, key);
      if (!pos) line_error(line_number, "unknown blendshape '" + key + "'");
      if (!value.is_number()) {
        line_error(line_number, "score for '" + key + "' is not a number");
      }
      frame.scores[*pos] = value.get<double>();
      filled[*pos] = true;
    }
    for (std::size_t j2 = 0; j2 < names.size(); ++j2) {
      if (!filled[j2]) {
        line_error(line_number, "missing blendshape '" + names[j2] + "'");
      }
    }
  } else {
    auto cells = text::split(body, ',');
    if (cells.size() != names.size()) {
      line_error(line_number, "expected " + std::to_string(names.size()) +
                                  " scores, found " +
                                  std::to_string(cells.size()));
    }
    for (std::size_t k = 0; k < cells.size(); ++k) {
      auto v = text::parse_double(cells[k]);
      if (!v) line_error(line_number, "'" + names[k] + "' is not a number");
      frame.scores[k] = *v;
    }
  }
  for (std::size_t k = 0; k < names.size(); ++k) {
    double v = frame.scores[k];
    if (!(v >= 0.0 && v <= 1.0)) {
      line_error(line_number, "score for '" + names[k] + "' outside [0,1]");
    }
  }
  return frame;
}

std::string format_stream_line(const StreamStep& step, const Model& model) {
  std::string out = std::to_string(step.frame);
  out += ',';
  out += model.class_names[static_cast<std::size_t>(code(step.label))];
  out += ',';
  out += std::to_string(code(step.label));
  for (Eigen::Index k = 0; k < step.probabilities.size(); ++k) {
    out += ',';
    out += text::format_fixed(step.probabilities[k], 6);
  }
  return out;
}

}  // namespace blendemo
