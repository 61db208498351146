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
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "blendemo/blendshapes.hpp"

namespace blendemo {

// One face observation. Scores are in [0, 1], one per blendshape name.
struct BlendshapeFrame {
  std::vector<double> scores;
  std::optional<std::uint64_t> index;

  bool operator==(const BlendshapeFrame&) const = default;
};

struct LabeledSample {
  BlendshapeFrame frame;
  ClassLabel label3 = ClassLabel::kUnknown;
  std::optional<SourceLabel> label7;

  bool operator==(const LabeledSample&) const = default;
};

enum class Split { kTrain, kValidation, kTest };

std::string_view split_name(Split split);
// "train.csv", "val.csv", "test.csv".
std::string_view split_file_name(Split split);

struct BlendshapeDataset {
  std::vector<LabeledSample> samples;
  Split split = Split::kTrain;
  std::vector<std::string> blendshape_names = canonical_blendshape_names();

  std::size_t size() const { return samples.size(); }
  bool empty() const { return samples.empty(); }

  bool operator==(const BlendshapeDataset&) const = default;
};

// Checks every dataset invariant (score count and range, distinct names,
// unique indices, label7/label3 consistency). Throws Error on violation.
void validate(const BlendshapeDataset& ds);

// Throws Error(kInvalidLabel) when label >= num_classes.
std::vector<double> one_hot(ClassLabel label, int num_classes = kNumClasses);

// Per-class quota for subsample_per_class. std::nullopt means "all".
using ClassQuota = std::map<SourceLabel, std::optional<std::size_t>>;

// Table-2 style quota: happy/sad 4000, disgust all, the rest 1500.
ClassQuota default_training_quota();

// Draws min(quota, available) samples of each source class uniformly at
// random. Classes missing from the quota are dropped. Selected samples keep
// their original relative order.
BlendshapeDataset subsample_per_class(const BlendshapeDataset& ds,
                                      const ClassQuota& quota,
                                      std::uint64_t seed);

// Blendshape CSV: header `index,label7,label3,<52 names>`.
BlendshapeDataset read_dataset_csv(std::istream& in, Split split,
                                   std::string_view source_name = "<stream>");
void write_dataset_csv(std::ostream& out, const BlendshapeDataset& ds);

// When `split` is omitted it is inferred from the file stem.
BlendshapeDataset load_dataset(const std::filesystem::path& path,
                               std::optional<Split> split = std::nullopt);
void save_dataset(const BlendshapeDataset& ds,
                  const std::filesystem::path& path);

// Loads <dir>/<split_file_name(split)>.
BlendshapeDataset load_split(const std::filesystem::path& dir, Split split);

}  // namespace blendemo
