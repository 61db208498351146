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

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "blendemo/dataset.hpp"

namespace blendemo {

inline constexpr double kDefaultActivationThreshold = 0.4;
inline constexpr std::size_t kDefaultMinActiveCount = 100;

struct ActivationCounts {
  std::vector<std::size_t> counts;
  double threshold = kDefaultActivationThreshold;
  std::size_t dataset_size = 0;
  std::vector<std::string> source_names;
};

// Ordered subset of blendshape indices fed to the model.
class FeatureMask {
 public:
  FeatureMask() = default;
  // Throws Error(kShape) unless indices are strictly increasing and in range.
  FeatureMask(std::vector<std::size_t> kept_indices,
              std::vector<std::string> source_names);

  static FeatureMask identity(std::vector<std::string> source_names);

  const std::vector<std::size_t>& kept_indices() const { return kept_; }
  const std::vector<std::string>& source_names() const { return names_; }
  std::size_t size() const { return kept_.size(); }
  bool empty() const { return kept_.empty(); }
  std::vector<std::string> kept_names() const;

  bool operator==(const FeatureMask&) const = default;

 private:
  std::vector<std::size_t> kept_;
  std::vector<std::string> names_;
};

// counts[j] = number of frames whose score j is strictly above `threshold`.
ActivationCounts count_activations(const BlendshapeDataset& ds,
                                   double threshold);

// Keeps j when counts[j] > min_count (strict).
FeatureMask select_features(const ActivationCounts& ac, std::size_t min_count);

// Gathers the kept scores. Throws Error(kMaskMismatch) if `frame_names`
// differs from the mask's source list, Error(kShape) on a wrong score count.
std::vector<double> apply_mask(const BlendshapeFrame& frame,
                               const FeatureMask& mask,
                               std::span<const std::string> frame_names);
std::vector<double> apply_mask(const BlendshapeFrame& frame,
                               const FeatureMask& mask);

// Text export: kept blendshape names, one per line.
void write_mask_file(const FeatureMask& mask,
                     const std::filesystem::path& path);
FeatureMask read_mask_file(const std::filesystem::path& path,
                           std::vector<std::string> source_names);

}  // namespace blendemo
