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
#include <map>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "blendemo/featsel.hpp"
#include "blendemo/losses.hpp"

namespace blendemo {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;
using Sequence = std::vector<Vector>;

// Gate blocks are stacked row-wise in the order input, forget, cell, output;
// each block has `units` rows.
struct LstmLayerParams {
  Matrix input_weights;      // 4*units x input_dim
  Matrix recurrent_weights;  // 4*units x units
  Vector bias;               // 4*units

  Eigen::Index units() const { return recurrent_weights.cols(); }
  Eigen::Index input_dim() const { return input_weights.cols(); }
};

struct DenseParams {
  Matrix weights;  // classes x units
  Vector bias;     // classes
};

// One contiguous parameter tensor. Biases are excluded from weight decay.
struct ParamTensor {
  std::span<double> values;
  bool is_bias = false;
};

struct Parameters {
  std::vector<LstmLayerParams> layers;
  DenseParams head;

  std::vector<int> layer_units() const;
  Eigen::Index input_dim() const;
  std::size_t parameter_count() const;

  // Fixed order: per layer input, recurrent, bias; then head weights, bias.
  std::vector<ParamTensor> tensors();
  std::vector<std::span<const double>> tensors() const;

  // Same shapes, all zeros.
  Parameters zeros_like() const;
  bool same_shape(const Parameters& other) const;

  bool operator==(const Parameters& other) const;
};

using Gradients = Parameters;

// dst += weight * src, tensor by tensor.
void add_scaled(Gradients& dst, const Gradients& src, double weight);
double global_norm(const Gradients& g);

inline constexpr std::array<int, 4> kDefaultLayerUnits = {64, 64, 32, 16};

struct Model {
  Parameters params;
  FeatureMask mask;
  std::array<std::string, kNumClasses> class_names = {"happy", "unknown",
                                                      "sad"};
  // Free-form provenance (config digest, creation time, ...).
  std::map<std::string, std::string> metadata;

  std::vector<int> layer_units() const { return params.layer_units(); }
};

// Glorot-uniform input weights (per gate block), orthogonal recurrent
// weights, zero biases except forget gate = 1. Deterministic in `seed`.
// Throws Error(kInvalidArchitecture) on empty or non-positive widths.
Parameters init_parameters(std::span<const int> layer_units, int input_dim,
                           std::uint64_t seed, int num_classes = kNumClasses);
Model init_model(std::span<const int> layer_units, FeatureMask mask,
                 std::uint64_t seed);

double glorot_bound(int fan_in, int fan_out);

struct CellStep {
  Vector input_gate;
  Vector forget_gate;
  Vector candidate;
  Vector output_gate;
  Vector c;
  Vector tanh_c;
  Vector h;
};

CellStep lstm_cell_forward(const Vector& x, const Vector& h_prev,
                           const Vector& c_prev, const LstmLayerParams& p);

struct HiddenState {
  std::vector<Vector> h;
  std::vector<Vector> c;
};

HiddenState zero_state(const Parameters& params);

struct CellRecord {
  Vector x;
  Vector h_prev;
  Vector c_prev;
  CellStep step;
};

struct ForwardCache {
  std::vector<int> layer_units;
  Eigen::Index input_dim = 0;
  // records[layer][t]
  std::vector<std::vector<CellRecord>> records;
  Vector logits;
  Vector probabilities;
};

struct ForwardResult {
  Vector probabilities;
  ForwardCache cache;
  HiddenState state;
};

Vector softmax(const Vector& logits);

// Runs the stack over `seq` from `state` (zero when null) and applies the
// softmax head to the top layer's last output.
ForwardResult forward(const Parameters& params, std::span<const Vector> seq,
                      const HiddenState* state = nullptr);
ForwardResult forward(const Model& model, std::span<const Vector> seq,
                      const HiddenState* state = nullptr);

// Exact gradient of the selected loss at the cached point (BPTT).
Gradients backward(const Parameters& params, const ForwardCache& cache,
                   std::span<const double> target, const LossSpec& loss);

}  // namespace blendemo
