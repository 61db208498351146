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

#include "blendemo/random_search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "blendemo/error.hpp"
#include "json.hpp"

namespace blendemo {
namespace {

using nlohmann::json;

[[noreturn]] void config_error(const std::string& what) {
  throw Error(ErrorKind::kConfig, "search space: " + what);
}

RealDimension parse_real(const json& j, const std::string& key) {
  RealDimension dim;
  if (j.is_array()) {
    if (j.empty()) config_error("'" + key + "' has no choices");
    for (const auto& v : j) {
      if (!v.is_number()) config_error("'" + key + "' choices must be numbers");
      dim.choices.push_back(v.get<double>());
    }
    return dim;
  }
  if (j.is_object()) {
    RealDimension::Range r;
    for (const auto& [k, v] : j.items()) {
      if (k == "min") r.min = v.get<double>();
      else if (k == "max") r.max = v.get<double>();
      else if (k == "log") r.log = v.get<bool>();
      else config_error("unknown key '" + k + "' in '" + key + "'");
    }
    if (!j.contains("min") || !j.contains("max") || !(r.min <= r.max)) {
      config_error("'" + key + "' range needs min <= max");
    }
    if (r.log && !(r.min > 0.0)) {
      config_error("'" + key + "' log range needs min > 0");
    }
    dim.range = r;
    return dim;
  }
  config_error("'" + key + "' must be a list or a {min,max} object");
}

template <typename T>
std::vector<T> parse_list(const json& j, const std::string& key) {
  if (!j.is_array() || j.empty()) {
    config_error("'" + key + "' must be a non-empty list");
  }
  return j.get<std::vector<T>>();
}

std::size_t dimension_size(const std::optional<RealDimension>& d) {
  return d ? d->choices.size() : 1;
}

template <typename T>
std::size_t dimension_size(const std::vector<T>& d) {
  return d.empty() ? 1 : d.size();
}

bool has_dimensions(const SearchSpace& s) {
  return !s.layer_units.empty() || s.learning_rate || s.weight_decay ||
         !s.batch_size.empty() || !s.loss.empty();
}

bool is_finite_space(const SearchSpace& s) {
  return (!s.learning_rate || s.learning_rate->is_discrete()) &&
         (!s.weight_decay || s.weight_decay->is_discrete());
}

std::size_t pick(std::size_t n, std::mt19937_64& rng) {
  return std::uniform_int_distribution<std::size_t>(0, n - 1)(rng);
}

double draw_real(const RealDimension& d, std::mt19937_64& rng) {
  if (d.is_discrete()) return d.choices[pick(d.choices.size(), rng)];
  const auto& r = *d.range;
  if (r.log) {
    std::uniform_real_distribution<double> u(std::log(r.min), std::log(r.max));
    return std::clamp(std::exp(u(rng)), r.min, r.max);
  }
  return std::uniform_real_distribution<double>(r.min, r.max)(rng);
}

// Grid coordinates of a discrete candidate, used to reject duplicates.
using GridPoint = std::array<std::size_t, 5>;

Candidate at_grid_point(const SearchSpace& s, const Candidate& base,
                        const GridPoint& p) {
  Candidate c = base;
  if (!s.layer_units.empty()) c.layer_units = s.layer_units[p[0]];
  if (s.learning_rate) c.config.optimizer.learning_rate = s.learning_rate->choices[p[1]];
  if (s.weight_decay) c.config.optimizer.weight_decay = s.weight_decay->choices[p[2]];
  if (!s.batch_size.empty()) c.config.batch_size = s.batch_size[p[3]];
  if (!s.loss.empty()) c.config.loss.kind = s.loss[p[4]];
  return c;
}

}  // namespace

SearchSpace parse_search_space(std::string_view json_text) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::exception& e) {
    config_error(std::string("not valid JSON: ") + e.what());
  }
  if (!j.is_object()) config_error("top level must be an object");
  SearchSpace s;
  try {
    for (const auto& [key, value] : j.items()) {
      if (key == "layer_units") {
        s.layer_units = parse_list<std::vector<int>>(value, key);
      } else if (key == "learning_rate") {
        s.learning_rate = parse_real(value, key);
      } else if (key == "weight_decay") {
        s.weight_decay = parse_real(value, key);
      } else if (key == "batch_size") {
        s.batch_size = parse_list<int>(value, key);
      } else if (key == "loss") {
        for (const auto& name : parse_list<std::string>(value, key)) {
          s.loss.push_back(loss_kind_from_name(name));
        }
      } else {
        config_error("unknown key '" + key + "'");
      }
    }
  } catch (const json::exception& e) {
    config_error(e.what());
  }
  if (!has_dimensions(s)) config_error("no dimensions defined");
  return s;
}

std::vector<Candidate> sample_candidates(const SearchSpace& space,
                                         const Candidate& base, int trials,
                                         std::uint64_t seed) {
  if (trials < 1) config_error("trials must be at least 1");
  if (!has_dimensions(space)) config_error("no dimensions defined");
  std::mt19937_64 rng(seed);
  std::vector<Candidate> out;

  if (!is_finite_space(space)) {
    for (int t = 0; t < trials; ++t) {
      Candidate c = base;
      if (!space.layer_units.empty()) {
        c.layer_units = space.layer_units[pick(space.layer_units.size(), rng)];
      }
      if (space.learning_rate) {
        c.config.optimizer.learning_rate = draw_real(*space.learning_rate, rng);
      }
      if (space.weight_decay) {
        c.config.optimizer.weight_decay = draw_real(*space.weight_decay, rng);
      }
      if (!space.batch_size.empty()) {
        c.config.batch_size = space.batch_size[pick(space.batch_size.size(), rng)];
      }
      if (!space.loss.empty()) {
        c.config.loss.kind = space.loss[pick(space.loss.size(), rng)];
      }
      out.push_back(std::move(c));
    }
    return out;
  }

  const GridPoint sizes = {dimension_size(space.layer_units),
                           dimension_size(space.learning_rate),
                           dimension_size(space.weight_decay),
                           dimension_size(space.batch_size),
                           dimension_size(space.loss)};
  double cardinality = 1.0;
  for (auto n : sizes) cardinality *= static_cast<double>(n);
  const auto wanted = static_cast<std::size_t>(
      std::min(cardinality, static_cast<double>(trials)));

  std::set<GridPoint> seen;
  while (out.size() < wanted) {
    GridPoint p{};
    for (std::size_t d = 0; d < p.size(); ++d) p[d] = pick(sizes[d], rng);
    if (seen.insert(p).second) out.push_back(at_grid_point(space, base, p));
  }
  return out;
}

SearchResult random_search(const SearchSpace& space, const Candidate& base,
                           int trials, int budget_epochs,
                           const BlendshapeDataset& train_ds,
                           const BlendshapeDataset& val_ds,
                           const FeatureMask& mask, std::uint64_t seed) {
  if (budget_epochs < 1) config_error("budget must be at least 1 epoch");
  auto candidates = sample_candidates(space, base, trials, seed);

  SearchResult result;
  for (std::size_t t = 0; t < candidates.size(); ++t) {
    auto& cand = candidates[t];
    cand.config.max_epochs = budget_epochs;
    Model model = init_model(cand.layer_units, mask, cand.config.seed);
    TrainHistory h = train(model, train_ds, val_ds, cand.config);
    TrialResult r;
    r.trial = static_cast<int>(t);
    r.candidate = cand;
    r.final_validation = h.epochs.back().validation;
    r.final_val_loss = r.final_validation.loss;
    r.epochs_run = h.epochs.back().epoch;
    result.leaderboard.push_back(std::move(r));
  }

  auto rank_key = [](const TrialResult& r) {
    return std::isfinite(r.final_val_loss)
               ? r.final_val_loss
               : std::numeric_limits<double>::infinity();
  };
  std::stable_sort(result.leaderboard.begin(), result.leaderboard.end(),
                   [&](const TrialResult& a, const TrialResult& b) {
                     return rank_key(a) < rank_key(b);
                   });
  result.best = result.leaderboard.front().candidate;
  return result;
}

}  // namespace blendemo
