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

#include "blendemo/adamw.hpp"

#include <algorithm>
#include <cmath>

#include "blendemo/error.hpp"

namespace blendemo {

AdamWState AdamWState::for_params(const Parameters& params) {
  return {params.zeros_like(), params.zeros_like(), params.zeros_like(), 0};
}

Gradients global_clipnorm(const Gradients& grads, double max_norm) {
  if (!(max_norm > 0.0)) {
    throw Error(ErrorKind::kConfig, "clip norm must be positive");
  }
  Gradients out = grads;
  double norm = global_norm(grads);
  if (norm <= max_norm) return out;
  double scale = max_norm / norm;
  for (auto t : out.tensors()) {
    for (double& v : t.values) v *= scale;
  }
  return out;
}

void adamw_step(Parameters& params, const Gradients& grads, AdamWState& state,
                const AdamWConfig& cfg) {
  if (!params.same_shape(grads) || !params.same_shape(state.m) ||
      !params.same_shape(state.v) || !params.same_shape(state.v_hat_max)) {
    throw Error(ErrorKind::kConsistency,
                "optimizer state, gradients and parameters differ in shape");
  }
  state.step += 1;
  const double t = static_cast<double>(state.step);
  const double m_correction = 1.0 - std::pow(cfg.beta1, t);
  const double v_correction = 1.0 - std::pow(cfg.beta2, t);

  auto p = params.tensors();
  auto g = grads.tensors();
  auto m = state.m.tensors();
  auto v = state.v.tensors();
  auto vmax = state.v_hat_max.tensors();
  for (std::size_t k = 0; k < p.size(); ++k) {
    const double decay = p[k].is_bias ? 0.0 : cfg.weight_decay;
    for (std::size_t i = 0; i < p[k].values.size(); ++i) {
      const double gi = g[k][i];
      double& mi = m[k].values[i];
      double& vi = v[k].values[i];
      mi = cfg.beta1 * mi + (1.0 - cfg.beta1) * gi;
      vi = cfg.beta2 * vi + (1.0 - cfg.beta2) * gi * gi;
      const double m_hat = mi / m_correction;
      double v_hat = vi / v_correction;
      if (cfg.amsgrad) {
        double& peak = vmax[k].values[i];
        peak = std::max(peak, v_hat);
        v_hat = peak;
      }
      double& pi = p[k].values[i];
      pi = pi - cfg.learning_rate * m_hat / (std::sqrt(v_hat) + cfg.epsilon) -
           cfg.learning_rate * decay * pi;
    }
  }
}

}  // namespace blendemo
