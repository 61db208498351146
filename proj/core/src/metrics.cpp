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

#include "blendemo/metrics.hpp"

#include <iomanip>
#include <string>

#include "blendemo/error.hpp"
#include "blendemo/text.hpp"

namespace blendemo {

std::uint64_t ConfusionMatrix::total() const {
  std::uint64_t sum = 0;
  for (const auto& row : cells) {
    for (auto v : row) sum += v;
  }
  return sum;
}

std::uint64_t ConfusionMatrix::trace() const {
  std::uint64_t sum = 0;
  for (int k = 0; k < kNumClasses; ++k) sum += cells[k][k];
  return sum;
}

std::uint64_t ConfusionMatrix::row_sum(int truth) const {
  std::uint64_t sum = 0;
  for (auto v : cells[truth]) sum += v;
  return sum;
}

std::uint64_t ConfusionMatrix::column_sum(int predicted) const {
  std::uint64_t sum = 0;
  for (const auto& row : cells) sum += row[predicted];
  return sum;
}

ConfusionMatrix confusion(std::span<const ClassLabel> preds,
                          std::span<const ClassLabel> truths) {
  if (preds.size() != truths.size()) {
    throw Error(ErrorKind::kShape,
                "confusion: " + std::to_string(preds.size()) +
                    " predictions vs " + std::to_string(truths.size()) +
                    " ground-truth labels");
  }
  if (preds.empty()) {
    throw Error(ErrorKind::kEmptyDataset, "confusion: no samples");
  }
  ConfusionMatrix cm;
  for (std::size_t i = 0; i < preds.size(); ++i) {
    ++cm.cells[code(truths[i])][code(preds[i])];
  }
  return cm;
}

double categorical_accuracy(const ConfusionMatrix& cm) {
  auto total = cm.total();
  if (total == 0) {
    throw Error(ErrorKind::kEmptyDataset, "accuracy of an empty matrix");
  }
  return static_cast<double>(cm.trace()) / static_cast<double>(total);
}

double macro_f1(const ConfusionMatrix& cm) {
  if (cm.total() == 0) {
    throw Error(ErrorKind::kEmptyDataset, "F1 of an empty matrix");
  }
  double sum = 0.0;
  for (int k = 0; k < kNumClasses; ++k) {
    double tp = static_cast<double>(cm.cells[k][k]);
    auto predicted = cm.column_sum(k);
    auto actual = cm.row_sum(k);
    double precision = predicted ? tp / static_cast<double>(predicted) : 0.0;
    double recall = actual ? tp / static_cast<double>(actual) : 0.0;
    if (precision + recall > 0.0) {
      sum += 2.0 * precision * recall / (precision + recall);
    }
  }
  return sum / kNumClasses;
}

void write_metrics_report(std::ostream& out, const Metrics& m,
                          bool has_loss) {
  if (has_loss) {
    out << "loss: " << text::format_fixed(m.loss, 6) << '\n';
    out << "cce: " << text::format_fixed(m.cce, 6) << '\n';
  }
  out << "accuracy: " << text::format_fixed(m.accuracy, 6) << '\n';
  out << "macro_f1: " << text::format_fixed(m.macro_f1, 6) << '\n';
  out << "samples: " << m.confusion.total() << '\n';
  out << "confusion (rows=truth, cols=predicted):\n";
  out << "  " << std::setw(8) << "";
  for (int p = 0; p < kNumClasses; ++p) {
    out << ' ' << std::setw(8) << class_name(static_cast<ClassLabel>(p));
  }
  out << '\n';
  for (int t = 0; t < kNumClasses; ++t) {
    out << "  " << std::setw(8) << class_name(static_cast<ClassLabel>(t));
    for (int p = 0; p < kNumClasses; ++p) {
      out << ' ' << std::setw(8) << m.confusion.cells[t][p];
    }
    out << '\n';
  }
}

}  // namespace blendemo
