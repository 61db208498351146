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
#include <cstdint>
#include <ostream>
#include <span>

#include "blendemo/blendshapes.hpp"

namespace blendemo {

// Rows are ground truth, columns are predictions.
struct ConfusionMatrix {
  std::array<std::array<std::uint64_t, kNumClasses>, kNumClasses> cells{};

  std::uint64_t total() const;
  std::uint64_t trace() const;
  std::uint64_t row_sum(int truth) const;
  std::uint64_t column_sum(int predicted) const;

  bool operator==(const ConfusionMatrix&) const = default;
};

struct Metrics {
  double loss = 0.0;
  double cce = 0.0;
  double accuracy = 0.0;
  double macro_f1 = 0.0;
  ConfusionMatrix confusion;

  bool operator==(const Metrics&) const = default;
};

// Throws Error(kShape) on length mismatch or empty input.
ConfusionMatrix confusion(std::span<const ClassLabel> preds,
                          std::span<const ClassLabel> truths);

// trace / total. Throws Error(kEmptyDataset) on an empty matrix.
double categorical_accuracy(const ConfusionMatrix& cm);

// Unweighted mean of per-class F1; a class with P + R = 0 contributes 0.
double macro_f1(const ConfusionMatrix& cm);

// Plain-text report: loss, cce, accuracy, macro_f1 and the labelled matrix.
void write_metrics_report(std::ostream& out, const Metrics& m,
                          bool has_loss = true);

}  // namespace blendemo
