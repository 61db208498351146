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

#include "blendemo/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <random>
#include <sstream>
#include <thread>

#include "blendemo/error.hpp"
#include "blendemo/model_io.hpp"
#include "blendemo/text.hpp"

namespace blendemo {
namespace {

struct SampleGradient {
  Gradients grad;
  double loss = 0.0;
};

SampleGradient sample_gradient(const Parameters& params, const Vector& x,
                               const std::vector<double>& target,
                               const LossSpec& loss) {
  auto fwd = forward(params, std::span<const Vector>(&x, 1));
  std::span<const double> probs(fwd.probabilities.data(),
                                static_cast<std::size_t>(fwd.probabilities.size()));
  SampleGradient out;
  out.loss = loss_value(loss, target, probs);
  out.grad = backward(params, fwd.cache, target, loss);
  return out;
}

// Mean gradient over `batch`, reduced in batch order whatever the thread
// count, so the result is bit-identical for any `threads`.
Gradients batch_gradient(const Parameters& params,
                         std::span<const std::size_t> batch,
                         const std::vector<Vector>& features,
                         const std::vector<std::vector<double>>& targets,
                         const LossSpec& loss, int threads,
                         double& loss_sum) {
  Gradients total = params.zeros_like();
  const double weight = 1.0 / static_cast<double>(batch.size());
  if (threads <= 1 || batch.size() < 2) {
    for (std::size_t i : batch) {
      auto r = sample_gradient(params, features[i], targets[i], loss);
      loss_sum += r.loss;
      add_scaled(total, r.grad, weight);
    }
    return total;
  }

  std::vector<SampleGradient> results(batch.size());
  const std::size_t workers =
      std::min<std::size_t>(static_cast<std::size_t>(threads), batch.size());
  {
    std::vector<std::jthread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::size_t k = w; k < batch.size(); k += workers) {
          std::size_t i = batch[k];
          results[k] = sample_gradient(params, features[i], targets[i], loss);
        }
      });
    }
  }
  for (const auto& r : results) {
    loss_sum += r.loss;
    add_scaled(total, r.grad, weight);
  }
  return total;
}

void write_checkpoints_csv(const TrainHistory& h, std::ostream& out) {
  out << "epoch,path,val_loss,val_cce,val_acc,val_f1\n";
  for (const auto& c : h.checkpoints) {
    out << c.epoch << ',' << c.path.filename().string() << ','
        << text::format_double(c.validation.loss) << ','
        << text::format_double(c.validation.cce) << ','
        << text::format_double(c.validation.accuracy) << ','
        << text::format_double(c.validation.macro_f1) << '\n';
  }
}

void write_text_file(const std::filesystem::path& path,
                     const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

}  // namespace

void validate(const TrainConfig& cfg) {
  const auto& o = cfg.optimizer;
  auto fail = [](const std::string& what) {
    throw Error(ErrorKind::kConfig, "invalid training config: " + what);
  };
  if (!(o.learning_rate >= 0.0) || !std::isfinite(o.learning_rate)) {
    fail("learning_rate must be finite and non-negative");
  }
  if (!(o.beta1 >= 0.0 && o.beta1 < 1.0)) fail("beta1 must lie in [0,1)");
  if (!(o.beta2 >= 0.0 && o.beta2 < 1.0)) fail("beta2 must lie in [0,1)");
  if (!(o.epsilon > 0.0)) fail("epsilon must be positive");
  if (!(o.weight_decay >= 0.0)) fail("weight_decay must be non-negative");
  if (!(cfg.global_clipnorm > 0.0)) fail("global_clipnorm must be positive");
  if (cfg.batch_size < 1) fail("batch_size must be at least 1");
  if (cfg.max_epochs < 1) fail("max_epochs must be at least 1");
  if (cfg.early_stop_patience < 1) fail("early_stop_patience must be >= 1");
  if (cfg.checkpoint_min_interval < 1) {
    fail("checkpoint_min_interval must be >= 1");
  }
  if (cfg.threads < 1) fail("threads must be at least 1");
  if (!(cfg.loss.focal.alpha >= 0.0) || !(cfg.loss.focal.gamma >= 0.0)) {
    fail("focal alpha and gamma must be non-negative");
  }
}

std::string describe(const TrainConfig& cfg) {
  const auto& o = cfg.optimizer;
  std::ostringstream s;
  s << "learning_rate=" << text::format_double(o.learning_rate) << '\n'
    << "beta1=" << text::format_double(o.beta1) << '\n'
    << "beta2=" << text::format_double(o.beta2) << '\n'
    << "epsilon=" << text::format_double(o.epsilon) << '\n'
    << "weight_decay=" << text::format_double(o.weight_decay) << '\n'
    << "amsgrad=" << (o.amsgrad ? "true" : "false") << '\n'
    << "global_clipnorm=" << text::format_double(cfg.global_clipnorm) << '\n'
    << "batch_size=" << cfg.batch_size << '\n'
    << "max_epochs=" << cfg.max_epochs << '\n'
    << "loss=" << loss_name(cfg.loss.kind) << '\n'
    << "focal_alpha=" << text::format_double(cfg.loss.focal.alpha) << '\n'
    << "focal_gamma=" << text::format_double(cfg.loss.focal.gamma) << '\n'
    << "early_stop_patience=" << cfg.early_stop_patience << '\n'
    << "checkpoint_min_interval=" << cfg.checkpoint_min_interval << '\n'
    << "seed=" << cfg.seed << '\n';
  return s.str();
}

std::string config_digest(const TrainConfig& cfg) {
  return sha256_hex(describe(cfg));
}

std::vector<Vector> masked_features(const Model& model,
                                    const BlendshapeDataset& ds) {
  std::vector<Vector> out;
  out.reserve(ds.size());
  for (const auto& s : ds.samples) {
    auto masked = apply_mask(s.frame, model.mask, ds.blendshape_names);
    out.emplace_back(Eigen::Map<const Vector>(
        masked.data(), static_cast<Eigen::Index>(masked.size())));
  }
  return out;
}

ClassLabel argmax_label(const Vector& probabilities) {
  Eigen::Index best = 0;
  for (Eigen::Index k = 1; k < probabilities.size(); ++k) {
    if (probabilities[k] > probabilities[best]) best = k;
  }
  return class_label_from_code(static_cast<int>(best));
}

Metrics evaluate(const Model& model, const BlendshapeDataset& ds,
                 const LossSpec& loss) {
  if (ds.empty()) {
    throw Error(ErrorKind::kEmptyDataset, "cannot evaluate an empty dataset");
  }
  auto features = masked_features(model, ds);
  std::vector<ClassLabel> preds;
  std::vector<ClassLabel> truths;
  preds.reserve(ds.size());
  truths.reserve(ds.size());
  double loss_sum = 0.0;
  double cce_sum = 0.0;
  for (std::size_t i = 0; i < features.size(); ++i) {
    auto fwd = forward(model, std::span<const Vector>(&features[i], 1));
    auto target = one_hot(ds.samples[i].label3);
    std::span<const double> probs(
        fwd.probabilities.data(),
        static_cast<std::size_t>(fwd.probabilities.size()));
    loss_sum += loss_value(loss, target, probs);
    cce_sum += cce(target, probs);
    preds.push_back(argmax_label(fwd.probabilities));
    truths.push_back(ds.samples[i].label3);
  }
  Metrics m;
  const double n = static_cast<double>(ds.size());
  m.loss = loss_sum / n;
  m.cce = cce_sum / n;
  m.confusion = confusion(preds, truths);
  m.accuracy = categorical_accuracy(m.confusion);
  m.macro_f1 = macro_f1(m.confusion);
  return m;
}

Metrics evaluate_predictions(std::span<const ClassLabel> preds,
                             const BlendshapeDataset& ds) {
  std::vector<ClassLabel> truths;
  truths.reserve(ds.size());
  for (const auto& s : ds.samples) truths.push_back(s.label3);
  Metrics m;
  m.confusion = confusion(preds, truths);
  m.accuracy = categorical_accuracy(m.confusion);
  m.macro_f1 = macro_f1(m.confusion);
  return m;
}

TrainHistory train(Model& model, const BlendshapeDataset& train_ds,
                   const BlendshapeDataset& val_ds, const TrainConfig& cfg,
                   const std::optional<std::filesystem::path>& out_dir) {
  validate(cfg);
  if (model.params.input_dim() !=
      static_cast<Eigen::Index>(model.mask.size())) {
    throw Error(ErrorKind::kConfig,
                "model input width differs from its feature mask");
  }
  if (train_ds.empty()) {
    throw Error(ErrorKind::kEmptyDataset, "training set is empty");
  }
  if (val_ds.empty()) {
    throw Error(ErrorKind::kEmptyDataset, "validation set is empty");
  }
  if (out_dir) {
    std::error_code ec;
    std::filesystem::create_directories(*out_dir, ec);
    if (ec || !std::filesystem::is_directory(*out_dir)) {
      throw Error(ErrorKind::kIo, "cannot create output directory '" +
                                      out_dir->string() + "'");
    }
  }

  const auto features = masked_features(model, train_ds);
  std::vector<std::vector<double>> targets;
  targets.reserve(train_ds.size());
  for (const auto& s : train_ds.samples) targets.push_back(one_hot(s.label3));

  model.metadata["config_digest"] = config_digest(cfg);
  model.metadata["created"] = provenance_timestamp();
  model.metadata["loss"] = std::string(loss_name(cfg.loss.kind));

  std::mt19937_64 shuffle_rng(cfg.seed);
  AdamWState opt_state = AdamWState::for_params(model.params);
  std::vector<std::size_t> order(train_ds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t batch_size = static_cast<std::size_t>(cfg.batch_size);

  TrainHistory history;
  double best = std::numeric_limits<double>::infinity();
  int last_checkpoint = 0;
  int epochs_without_improvement = 0;

  auto save_as = [&](const std::filesystem::path& path, int epoch) {
    Model snapshot = model;
    snapshot.metadata["epoch"] = std::to_string(epoch);
    save_model(snapshot, path);
  };

  for (int epoch = 1; epoch <= cfg.max_epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), shuffle_rng);
    double loss_sum = 0.0;
    for (std::size_t start = 0; start < order.size(); start += batch_size) {
      std::size_t end = std::min(order.size(), start + batch_size);
      std::span<const std::size_t> batch(order.data() + start, end - start);
      Gradients grad = batch_gradient(model.params, batch, features, targets,
                                      cfg.loss, cfg.threads, loss_sum);
      adamw_step(model.params, global_clipnorm(grad, cfg.global_clipnorm),
                 opt_state, cfg.optimizer);
    }

    EpochRecord record;
    record.epoch = epoch;
    record.train_loss = loss_sum / static_cast<double>(order.size());
    record.validation = evaluate(model, val_ds, cfg.loss);
    history.epochs.push_back(record);

    if (record.validation.loss < best) {
      best = record.validation.loss;
      history.best_epoch = epoch;
      history.best_val_loss = best;
      epochs_without_improvement = 0;
      if (out_dir) {
        history.best_model_path = *out_dir / "best.model";
        save_as(*history.best_model_path, epoch);
        if (last_checkpoint == 0 ||
            epoch - last_checkpoint >= cfg.checkpoint_min_interval) {
          auto path = *out_dir / ("ckpt_epoch" + std::to_string(epoch) + ".model");
          save_as(path, epoch);
          history.checkpoints.push_back({epoch, path, record.validation});
          last_checkpoint = epoch;
        }
      }
    } else if (++epochs_without_improvement >= cfg.early_stop_patience) {
      history.early_stopped = true;
      break;
    }
  }
  history.optimizer_steps = opt_state.step;

  if (out_dir) {
    history.last_model_path = *out_dir / "last.model";
    save_as(*history.last_model_path, history.epochs.back().epoch);
    std::ostringstream hist;
    write_history_csv(history, hist);
    write_text_file(*out_dir / "history.csv", hist.str());
    std::ostringstream ckpts;
    write_checkpoints_csv(history, ckpts);
    write_text_file(*out_dir / "checkpoints.csv", ckpts.str());
  }
  return history;
}

void write_history_csv(const TrainHistory& history, std::ostream& out) {
  out << "epoch,train_loss,val_loss,val_acc,val_f1\n";
  for (const auto& e : history.epochs) {
    out << e.epoch << ',' << text::format_double(e.train_loss) << ','
        << text::format_double(e.validation.loss) << ','
        << text::format_double(e.validation.accuracy) << ','
        << text::format_double(e.validation.macro_f1) << '\n';
  }
}

}  // namespace blendemo
