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

#include "test_support.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <unistd.h>
#include <utility>

namespace blendemo::testing {

namespace fs = std::filesystem;

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = fs::temp_directory_path() /
          (tag + "-" + std::to_string(::getpid()) + "-" +
           std::to_string(counter++));
  fs::remove_all(path_);
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

SourceLabel source_for(ClassLabel label, std::size_t salt) {
  static constexpr SourceLabel kUnknowns[] = {
      SourceLabel::kAngry, SourceLabel::kDisgust, SourceLabel::kAfraid,
      SourceLabel::kSurprise, SourceLabel::kNeutral};
  switch (label) {
    case ClassLabel::kHappy: return SourceLabel::kHappy;
    case ClassLabel::kSad: return SourceLabel::kSad;
    case ClassLabel::kUnknown: return kUnknowns[salt % 5];
  }
  return SourceLabel::kNeutral;
}

BlendshapeDataset separable_dataset(std::size_t per_class, std::uint64_t seed,
                                    Split split, std::size_t group) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> high(0.6, 1.0);
  std::uniform_real_distribution<double> low(0.0, 0.3);
  BlendshapeDataset ds;
  ds.split = split;
  std::uint64_t index = 0;
  for (std::size_t i = 0; i < per_class; ++i) {
    for (int k = 0; k < kNumClasses; ++k) {
      LabeledSample s;
      s.label3 = static_cast<ClassLabel>(k);
      s.label7 = source_for(s.label3, i);
      s.frame.index = index++;
      s.frame.scores.resize(kNumBlendshapes);
      for (std::size_t j = 0; j < kNumBlendshapes; ++j) {
        bool active = j >= k * group && j < (k + 1) * group;
        s.frame.scores[j] = active ? high(rng) : low(rng);
      }
      ds.samples.push_back(std::move(s));
    }
  }
  return ds;
}

BlendshapeDataset random_dataset(std::size_t n, std::uint64_t seed,
                                 Split split) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> rate(kNumBlendshapes);
  for (auto& r : rate) r = u(rng);
  BlendshapeDataset ds;
  ds.split = split;
  for (std::size_t i = 0; i < n; ++i) {
    LabeledSample s;
    s.label3 = static_cast<ClassLabel>(i % kNumClasses);
    s.label7 = source_for(s.label3, i);
    s.frame.index = i;
    s.frame.scores.resize(kNumBlendshapes);
    for (std::size_t j = 0; j < kNumBlendshapes; ++j) {
      s.frame.scores[j] = u(rng) < rate[j] ? 0.4 + 0.6 * u(rng) : 0.4 * u(rng);
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

Parameters random_parameters(const std::vector<int>& units, int input_dim,
                             std::uint64_t seed, double scale) {
  Parameters p = init_parameters(units, input_dim, seed);
  std::mt19937_64 rng(seed ^ 0x9E3779B97F4A7C15ULL);
  std::uniform_real_distribution<double> u(-scale, scale);
  for (auto t : p.tensors()) {
    for (double& v : t.values) v = u(rng);
  }
  return p;
}

Sequence random_sequence(std::size_t length, int dim, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  Sequence seq;
  for (std::size_t t = 0; t < length; ++t) {
    Vector x(dim);
    for (int i = 0; i < dim; ++i) x[i] = u(rng);
    seq.push_back(x);
  }
  return seq;
}

std::vector<double> random_distribution(std::size_t n, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.01, 1.0);
  std::vector<double> p(n);
  double sum = 0.0;
  for (auto& v : p) sum += (v = u(rng));
  for (auto& v : p) v /= sum;
  return p;
}

GradientCheck check_gradients(const Parameters& params, const Sequence& seq,
                              const std::vector<double>& target,
                              const LossSpec& loss, double step,
                              double floor) {
  auto loss_at = [&](const Parameters& p) {
    auto fwd = forward(p, seq);
    std::vector<double> probs(fwd.probabilities.data(),
                              fwd.probabilities.data() + fwd.probabilities.size());
    return loss_value(loss, target, probs);
  };
  auto fwd = forward(params, seq);
  Gradients analytic = backward(params, fwd.cache, target, loss);

  GradientCheck result;
  Parameters probe = params;
  auto probe_tensors = probe.tensors();
  auto grad_tensors = std::as_const(analytic).tensors();
  for (std::size_t k = 0; k < probe_tensors.size(); ++k) {
    auto values = probe_tensors[k].values;
    for (std::size_t i = 0; i < values.size(); ++i) {
      const double saved = values[i];
      values[i] = saved + step;
      const double up = loss_at(probe);
      values[i] = saved - step;
      const double down = loss_at(probe);
      values[i] = saved;
      const double numeric = (up - down) / (2.0 * step);
      const double a = grad_tensors[k][i];
      const double denom =
          std::max({std::abs(a), std::abs(numeric), floor});
      const double rel = std::abs(a - numeric) / denom;
      if (rel > result.max_relative_error) {
        result.max_relative_error = rel;
        result.worst_analytic = a;
        result.worst_numeric = numeric;
      }
      ++result.entries;
    }
  }
  return result;
}

}  // namespace blendemo::testing
