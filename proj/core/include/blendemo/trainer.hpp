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
#include <optional>
#include <string>
#include <vector>

#include "blendemo/adamw.hpp"
#include "blendemo/dataset.hpp"
#include "blendemo/metrics.hpp"
#include "blendemo/nn.hpp"

namespace blendemo {

struct TrainConfig {
  AdamWConfig optimizer;
  double global_clipnorm = 1.0;
  int batch_size = 128;
  int max_epochs = 5000;
  LossSpec loss;
  int early_stop_patience = 50;
  int checkpoint_min_interval = 100;
  std::uint64_t seed = 0;
  // Worker threads for per-sample gradients. Results do not depend on it:
  // the batch reduction always runs in sample order.
  int threads = 1;
};

// Throws Error(kConfig) when a field is out of range.
void validate(const TrainConfig& cfg);

// Canonical `key=value` listing of every field that affects training.
std::string describe(const TrainConfig& cfg);
std::string config_digest(const TrainConfig& cfg);

struct EpochRecord {
  int epoch = 0;
  double train_loss = 0.0;
  Metrics validation;
};

struct CheckpointRecord {
  int epoch = 0;
  std::filesystem::path path;
  Metrics validation;
};

struct TrainHistory {
  std::vector<EpochRecord> epochs;
  std::vector<CheckpointRecord> checkpoints;
  int best_epoch = 0;
  double best_val_loss = 0.0;
  std::uint64_t optimizer_steps = 0;
  bool early_stopped = false;
  // Set when an output directory was given.
  std::optional<std::filesystem::path> best_model_path;
  std::optional<std::filesystem::path> last_model_path;
};

// Applies the model's mask to every sample (checking name lists).
std::vector<Vector> masked_features(const Model& model,
                                    const BlendshapeDataset& ds);

// Argmax prediction per sample plus mean loss (under `loss`) and mean CCE.
Metrics evaluate(const Model& model, const BlendshapeDataset& ds,
                 const LossSpec& loss = {});

// Metrics from precomputed predictions; loss fields are left at 0.
Metrics evaluate_predictions(std::span<const ClassLabel> preds,
                             const BlendshapeDataset& ds);

// Lowest class code wins ties.
ClassLabel argmax_label(const Vector& probabilities);

// Trains `model` in place. Each sample is a length-1 sequence from a zero
// state. When `out_dir` is set, writes ckpt_epoch{N}.model, best.model,
// last.model, history.csv and checkpoints.csv there.
TrainHistory train(Model& model, const BlendshapeDataset& train_ds,
                   const BlendshapeDataset& val_ds, const TrainConfig& cfg,
                   const std::optional<std::filesystem::path>& out_dir = {});

void write_history_csv(const TrainHistory& history, std::ostream& out);

}  // namespace blendemo
