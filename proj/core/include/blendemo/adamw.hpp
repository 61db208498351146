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

#include "blendemo/nn.hpp"

namespace blendemo {

struct AdamWConfig {
  double learning_rate = 1.09e-06;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;
  double weight_decay = 0.004;
  bool amsgrad = true;
};

// Moments mirror the parameter tensors one to one.
struct AdamWState {
  Parameters m;
  Parameters v;
  Parameters v_hat_max;
  std::uint64_t step = 0;

  static AdamWState for_params(const Parameters& params);
};

// Rescales every entry by max_norm / N when the joint L2 norm N exceeds
// max_norm; otherwise returns the input unchanged.
Gradients global_clipnorm(const Gradients& grads, double max_norm);

// One decoupled-weight-decay Adam update. Decay is applied to weights only.
// Throws Error(kConsistency) when shapes differ.
void adamw_step(Parameters& params, const Gradients& grads, AdamWState& state,
                const AdamWConfig& cfg);

}  // namespace blendemo
