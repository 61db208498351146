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

#include <span>
#include <string_view>
#include <vector>

namespace blendemo {

// Floor applied to probabilities before taking logs.
inline constexpr double kProbabilityFloor = 1e-12;

struct FocalConfig {
  double alpha = 0.25;
  double gamma = 2.0;
};

enum class LossKind { kMse, kCce, kFocal };

struct LossSpec {
  LossKind kind = LossKind::kCce;
  FocalConfig focal;
};

std::string_view loss_name(LossKind kind);
// Accepts "mse", "cce", "focal". Throws Error(kConfig) otherwise.
LossKind loss_kind_from_name(std::string_view name);

// Mean squared error over all entries.
double mse(std::span<const double> y, std::span<const double> yhat);

// -log of the (floored) probability assigned to the true class.
// Throws Error(kInvalidTarget) unless y is one-hot.
double cce(std::span<const double> y, std::span<const double> yhat);

// alpha * (1 - p_true)^gamma * cce(y, yhat), non-negative.
double focal(std::span<const double> y, std::span<const double> yhat,
             const FocalConfig& cfg);

double loss_value(const LossSpec& spec, std::span<const double> y,
                  std::span<const double> yhat);

// d loss / d yhat.
std::vector<double> loss_gradient(const LossSpec& spec,
                                  std::span<const double> y,
                                  std::span<const double> yhat);

}  // namespace blendemo
