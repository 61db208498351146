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
#include <string_view>
#include <vector>

#include "blendemo/trainer.hpp"

namespace blendemo {

// A real-valued search dimension: either a list of choices or a continuous
// [min, max] range (optionally log-uniform).
struct RealDimension {
  std::vector<double> choices;
  struct Range {
    double min = 0.0;
    double max = 0.0;
    bool log = false;
  };
  std::optional<Range> range;

  bool is_discrete() const { return !range; }
};

// Unset dimensions take their value from the base configuration.
struct SearchSpace {
  std::vector<std::vector<int>> layer_units;
  std::optional<RealDimension> learning_rate;
  std::optional<RealDimension> weight_decay;
  std::vector<int> batch_size;
  std::vector<LossKind> loss;
};

// JSON object with optional keys layer_units, learning_rate, weight_decay,
// batch_size, loss. Real dimensions are either a list or
// {"min": a, "max": b, "log": bool}. Throws Error(kConfig).
SearchSpace parse_search_space(std::string_view json_text);

struct Candidate {
  std::vector<int> layer_units;
  TrainConfig config;
};

struct TrialResult {
  int trial = 0;
  Candidate candidate;
  double final_val_loss = 0.0;
  Metrics final_validation;
  int epochs_run = 0;
};

struct SearchResult {
  Candidate best;
  // Sorted by final validation loss (non-finite last), then trial number.
  std::vector<TrialResult> leaderboard;
};

// Draws `trials` candidates uniformly from the space. A fully discrete space
// is sampled without replacement, so it yields at most its cardinality.
std::vector<Candidate> sample_candidates(const SearchSpace& space,
                                         const Candidate& base, int trials,
                                         std::uint64_t seed);

// Trains each candidate for `budget_epochs` and ranks by final validation
// loss. Throws Error(kConfig) on an empty space or non-positive counts.
SearchResult random_search(const SearchSpace& space, const Candidate& base,
                           int trials, int budget_epochs,
                           const BlendshapeDataset& train_ds,
                           const BlendshapeDataset& val_ds,
                           const FeatureMask& mask, std::uint64_t seed);

}  // namespace blendemo
