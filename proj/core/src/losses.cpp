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

#include "blendemo/losses.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "blendemo/error.hpp"

namespace blendemo {
namespace {

void check_lengths(std::span<const double> y, std::span<const double> yhat) {
  if (y.size() != yhat.size() || y.empty()) {
    throw Error(ErrorKind::kShape,
                "loss inputs have lengths " + std::to_string(y.size()) +
                    " and " + std::to_string(yhat.size()));
  }
}

// Index of the 1 in a one-hot target.
std::size_t true_class(std::span<const double> y) {
  std::size_t hot = 0;
  std::size_t ones = 0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    if (y[i] == 1.0) {
      hot = i;
      ++ones;
    } else if (y[i] != 0.0) {
      ones = 0;
      break;
    }
  }
  if (ones != 1) {
    throw Error(ErrorKind::kInvalidTarget, "target is not a one-hot vector");
  }
  return hot;
}

double floored(double p) { return std::clamp(p, kProbabilityFloor, 1.0); }

}  // namespace

std::string_view loss_name(LossKind kind) {
  switch (kind) {
    case LossKind::kMse: return "mse";
    case LossKind::kCce: return "cce";
    case LossKind::kFocal: return "focal";
  }
  return "?";
}

LossKind loss_kind_from_name(std::string_view name) {
  if (name == "mse") return LossKind::kMse;
  if (name == "cce") return LossKind::kCce;
  if (name == "focal") return LossKind::kFocal;
  throw Error(ErrorKind::kConfig, "unknown loss '" + std::string(name) +
                                      "' (expected mse, cce or focal)");
}

double mse(std::span<const double> y, std::span<const double> yhat) {
  check_lengths(y, yhat);
  double sum = 0.0;
  for (std::size_t i = 0; i < y.size(); ++i) {
    double d = y[i] - yhat[i];
    sum += d * d;
  }
  return sum / static_cast<double>(y.size());
}

double cce(std::span<const double> y, std::span<const double> yhat) {
  check_lengths(y, yhat);
  return -std::log(floored(yhat[true_class(y)]));
}

double focal(std::span<const double> y, std::span<const double> yhat,
             const FocalConfig& cfg) {
  check_lengths(y, yhat);
  double p = floored(yhat[true_class(y)]);
  return cfg.alpha * std::pow(1.0 - p, cfg.gamma) * -std::log(p);
}

double loss_value(const LossSpec& spec, std::span<const double> y,
                  std::span<const double> yhat) {
  switch (spec.kind) {
    case LossKind::kMse: return mse(y, yhat);
    case LossKind::kCce: return cce(y, yhat);
    case LossKind::kFocal: return focal(y, yhat, spec.focal);
  }
  return 0.0;
}

std::vector<double> loss_gradient(const LossSpec& spec,
                                  std::span<const double> y,
                                  std::span<const double> yhat) {
  check_lengths(y, yhat);
  std::vector<double> grad(y.size(), 0.0);
  if (spec.kind == LossKind::kMse) {
    double scale = 2.0 / static_cast<double>(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) {
      grad[i] = scale * (yhat[i] - y[i]);
    }
    return grad;
  }

  std::size_t t = true_class(y);
  double p = yhat[t];
  // Below the floor the loss is constant in p.
  if (p <= kProbabilityFloor || p > 1.0) return grad;

  if (spec.kind == LossKind::kCce) {
    grad[t] = -1.0 / p;
    return grad;
  }

  const auto& [alpha, gamma] = spec.focal;
  double one_minus = 1.0 - p;
  double log_term = -std::log(p);
  double modulating = std::pow(one_minus, gamma);
  double d_modulating = 0.0;
  if (gamma != 0.0 && one_minus > 0.0) {
    d_modulating = -gamma * std::pow(one_minus, gamma - 1.0);
  }
  grad[t] = alpha * (d_modulating * log_term - modulating / p);
  return grad;
}

}  // namespace blendemo
