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

#include "blendemo/featsel.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "blendemo/error.hpp"
#include "blendemo/text.hpp"

namespace blendemo {

FeatureMask::FeatureMask(std::vector<std::size_t> kept_indices,
                         std::vector<std::string> source_names)
    : kept_(std::move(kept_indices)), names_(std::move(source_names)) {
  for (std::size_t k = 0; k < kept_.size(); ++k) {
    if (kept_[k] >= names_.size()) {
      throw Error(ErrorKind::kShape, "mask index " + std::to_string(kept_[k]) +
                                         " out of range");
    }
    if (k > 0 && kept_[k] <= kept_[k - 1]) {
      throw Error(ErrorKind::kShape,
                  "mask indices must be strictly increasing");
    }
  }
}

FeatureMask FeatureMask::identity(std::vector<std::string> source_names) {
  std::vector<std::size_t> all(source_names.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return FeatureMask(std::move(all), std::move(source_names));
}

std::vector<std::string> FeatureMask::kept_names() const {
  std::vector<std::string> out;
  out.reserve(kept_.size());
  for (std::size_t j : kept_) out.push_back(names_[j]);
  return out;
}

ActivationCounts count_activations(const BlendshapeDataset& ds,
                                   double threshold) {
  if (!(threshold > 0.0 && threshold < 1.0)) {
    throw Error(ErrorKind::kConfig, "activation threshold must lie in (0,1)");
  }
  if (ds.empty()) {
    throw Error(ErrorKind::kEmptyDataset,
                "cannot count activations on an empty dataset");
  }
  ActivationCounts ac;
  ac.threshold = threshold;
  ac.dataset_size = ds.size();
  ac.source_names = ds.blendshape_names;
  ac.counts.assign(ds.blendshape_names.size(), 0);
  for (const auto& s : ds.samples) {
    if (s.frame.scores.size() != ac.counts.size()) {
      throw Error(ErrorKind::kShape, "frame score count differs from names");
    }
    for (std::size_t j = 0; j < ac.counts.size(); ++j) {
      if (s.frame.scores[j] > threshold) ++ac.counts[j];
    }
  }
  return ac;
}

FeatureMask select_features(const ActivationCounts& ac,
                            std::size_t min_count) {
  std::vector<std::size_t> kept;
  for (std::size_t j = 0; j < ac.counts.size(); ++j) {
    if (ac.counts[j] > min_count) kept.push_back(j);
  }
  auto names = ac.source_names;
  if (names.size() != ac.counts.size()) {
    // Counts built by hand (e.g. toy inputs) may come without names.
    names.clear();
    for (std::size_t j = 0; j < ac.counts.size(); ++j) {
      names.push_back("b" + std::to_string(j));
    }
  }
  return FeatureMask(std::move(kept), std::move(names));
}

std::vector<double> apply_mask(const BlendshapeFrame& frame,
                               const FeatureMask& mask,
                               std::span<const std::string> frame_names) {
  if (!std::ranges::equal(frame_names, mask.source_names())) {
    throw Error(ErrorKind::kMaskMismatch,
                "frame blendshape names do not match the mask's name list");
  }
  return apply_mask(frame, mask);
}

std::vector<double> apply_mask(const BlendshapeFrame& frame,
                               const FeatureMask& mask) {
  if (frame.scores.size() != mask.source_names().size()) {
    throw Error(ErrorKind::kShape,
                "frame has " + std::to_string(frame.scores.size()) +
                    " scores, mask expects " +
                    std::to_string(mask.source_names().size()));
  }
  std::vector<double> out;
  out.reserve(mask.size());
  for (std::size_t j : mask.kept_indices()) out.push_back(frame.scores[j]);
  return out;
}

void write_mask_file(const FeatureMask& mask,
                     const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  for (const auto& name : mask.kept_names()) out << name << '\n';
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

FeatureMask read_mask_file(const std::filesystem::path& path,
                           std::vector<std::string> source_names) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::vector<std::size_t> kept;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    auto name = text::trim(line);
    if (name.empty() || name.front() == '#') continue;
    auto pos = find_name(source_names, name);
    if (!pos) {
      throw Error(ErrorKind::kParse, path.string() + ": row " +
                                         std::to_string(row) +
                                         ": unknown blendshape '" +
                                         std::string(name) + "'");
    }
    kept.push_back(*pos);
  }
  std::sort(kept.begin(), kept.end());
  if (std::adjacent_find(kept.begin(), kept.end()) != kept.end()) {
    throw Error(ErrorKind::kParse, path.string() + ": duplicate blendshape");
  }
  return FeatureMask(std::move(kept), std::move(source_names));
}

}  // namespace blendemo
