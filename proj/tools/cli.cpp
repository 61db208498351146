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

#include "cli.hpp"

#include <algorithm>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>

#include "CLI11.hpp"
#include "blendemo/dataset.hpp"
#include "blendemo/error.hpp"
#include "blendemo/featsel.hpp"
#include "blendemo/model_io.hpp"
#include "blendemo/random_search.hpp"
#include "blendemo/stream.hpp"
#include "blendemo/text.hpp"
#include "blendemo/trainer.hpp"
#include "json.hpp"

namespace blendemo::cli {
namespace {

namespace fs = std::filesystem;
using nlohmann::json;

// Everything a training run needs beyond TrainConfig.
struct RunConfig {
  TrainConfig train;
  std::vector<int> layer_units{kDefaultLayerUnits.begin(),
                               kDefaultLayerUnits.end()};
  double threshold = kDefaultActivationThreshold;
  std::size_t min_count = kDefaultMinActiveCount;
  bool subsample = false;
};

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

void write_file(const fs::path& path, const std::string& contents) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  out << contents;
  if (!out) throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
}

json run_config_json(const RunConfig& rc) {
  const auto& t = rc.train;
  return {
      {"learning_rate", t.optimizer.learning_rate},
      {"beta1", t.optimizer.beta1},
      {"beta2", t.optimizer.beta2},
      {"epsilon", t.optimizer.epsilon},
      {"weight_decay", t.optimizer.weight_decay},
      {"amsgrad", t.optimizer.amsgrad},
      {"global_clipnorm", t.global_clipnorm},
      {"batch_size", t.batch_size},
      {"max_epochs", t.max_epochs},
      {"loss", std::string(loss_name(t.loss.kind))},
      {"focal_alpha", t.loss.focal.alpha},
      {"focal_gamma", t.loss.focal.gamma},
      {"early_stop_patience", t.early_stop_patience},
      {"checkpoint_min_interval", t.checkpoint_min_interval},
      {"seed", t.seed},
      {"threads", t.threads},
      {"layer_units", rc.layer_units},
      {"threshold", rc.threshold},
      {"min_count", rc.min_count},
      {"subsample", rc.subsample},
  };
}

RunConfig parse_run_config(const fs::path& path) {
  RunConfig rc;
  json j;
  try {
    j = json::parse(read_file(path));
  } catch (const json::exception& e) {
    throw Error(ErrorKind::kConfig,
                path.string() + ": not valid JSON: " + e.what());
  }
  if (!j.is_object()) {
    throw Error(ErrorKind::kConfig, path.string() + ": expected a JSON object");
  }
  auto& t = rc.train;
  for (const auto& [key, v] : j.items()) {
    try {
      if (key == "learning_rate") t.optimizer.learning_rate = v.get<double>();
      else if (key == "beta1") t.optimizer.beta1 = v.get<double>();
      else if (key == "beta2") t.optimizer.beta2 = v.get<double>();
      else if (key == "epsilon") t.optimizer.epsilon = v.get<double>();
      else if (key == "weight_decay") t.optimizer.weight_decay = v.get<double>();
      else if (key == "amsgrad") t.optimizer.amsgrad = v.get<bool>();
      else if (key == "global_clipnorm") t.global_clipnorm = v.get<double>();
      else if (key == "batch_size") t.batch_size = v.get<int>();
      else if (key == "max_epochs") t.max_epochs = v.get<int>();
      else if (key == "loss") t.loss.kind = loss_kind_from_name(v.get<std::string>());
      else if (key == "focal_alpha") t.loss.focal.alpha = v.get<double>();
      else if (key == "focal_gamma") t.loss.focal.gamma = v.get<double>();
      else if (key == "early_stop_patience") t.early_stop_patience = v.get<int>();
      else if (key == "checkpoint_min_interval") t.checkpoint_min_interval = v.get<int>();
      else if (key == "seed") t.seed = v.get<std::uint64_t>();
      else if (key == "threads") t.threads = v.get<int>();
      else if (key == "layer_units") rc.layer_units = v.get<std::vector<int>>();
      else if (key == "threshold") rc.threshold = v.get<double>();
      else if (key == "min_count") rc.min_count = v.get<std::size_t>();
      else if (key == "subsample") rc.subsample = v.get<bool>();
      else {
        throw Error(ErrorKind::kConfig,
                    path.string() + ": unknown key '" + key + "'");
      }
    } catch (const json::exception& e) {
      throw Error(ErrorKind::kConfig, path.string() + ": key '" + key +
                                          "' has the wrong type: " + e.what());
    }
  }
  return rc;
}

std::vector<int> parse_layer_list(const std::string& spec) {
  std::vector<int> units;
  for (auto part : text::split(spec, ',')) {
    auto v = text::parse_int(part);
    if (!v || *v <= 0) {
      throw Error(ErrorKind::kConfig,
                  "--layers: '" + std::string(text::trim(part)) +
                      "' is not a positive integer");
    }
    units.push_back(static_cast<int>(*v));
  }
  return units;
}

Split parse_split(const std::string& name) {
  if (name == "train") return Split::kTrain;
  if (name == "val" || name == "validation") return Split::kValidation;
  if (name == "test") return Split::kTest;
  throw Error(ErrorKind::kConfig, "--split: unknown split '" + name + "'");
}

std::vector<ClassLabel> read_predictions(const fs::path& path) {
  std::istringstream in(read_file(path));
  std::vector<ClassLabel> preds;
  std::string line;
  std::size_t row = 0;
  while (std::getline(in, line)) {
    ++row;
    auto body = text::trim(line);
    if (body.empty() || body.front() == '#') continue;
    auto v = text::parse_int(body);
    if (!v || *v < 0 || *v >= kNumClasses) {
      throw Error(ErrorKind::kParse, path.string() + ": row " +
                                         std::to_string(row) + ": '" +
                                         std::string(body) +
                                         "' is not a class code 0, 1 or 2");
    }
    preds.push_back(static_cast<ClassLabel>(*v));
  }
  return preds;
}

FeatureMask mask_for_training(const RunConfig& rc, const BlendshapeDataset& train_ds,
                              const std::optional<fs::path>& mask_file) {
  if (mask_file) return read_mask_file(*mask_file, train_ds.blendshape_names);
  auto mask = select_features(count_activations(train_ds, rc.threshold),
                              rc.min_count);
  if (mask.empty()) {
    throw Error(ErrorKind::kConfig,
                "feature selection kept no blendshapes (threshold " +
                    text::format_double(rc.threshold) + ", min count " +
                    std::to_string(rc.min_count) + ")");
  }
  return mask;
}

BlendshapeDataset load_training_split(const fs::path& dir, const RunConfig& rc) {
  auto ds = load_split(dir, Split::kTrain);
  if (rc.subsample) {
    ds = subsample_per_class(ds, default_training_quota(), rc.train.seed);
  }
  return ds;
}

void print_leaderboard(std::ostream& out, const SearchResult& r) {
  out << "rank,trial,layer_units,learning_rate,weight_decay,batch_size,loss,"
         "val_loss,val_acc,val_f1\n";
  for (std::size_t k = 0; k < r.leaderboard.size(); ++k) {
    const auto& t = r.leaderboard[k];
    std::string units;
    for (int u : t.candidate.layer_units) {
      if (!units.empty()) units += '-';
      units += std::to_string(u);
    }
    const auto& c = t.candidate.config;
    out << k + 1 << ',' << t.trial << ',' << units << ','
        << text::format_double(c.optimizer.learning_rate) << ','
        << text::format_double(c.optimizer.weight_decay) << ','
        << c.batch_size << ',' << loss_name(c.loss.kind) << ','
        << text::format_fixed(t.final_val_loss, 6) << ','
        << text::format_fixed(t.final_validation.accuracy, 6) << ','
        << text::format_fixed(t.final_validation.macro_f1, 6) << '\n';
  }
}

}  // namespace

int run(const std::vector<std::string>& args, std::istream& in,
        std::ostream& out, std::ostream& err) {
  CLI::App app{"Blendshape emotion classifier (happy / unknown / sad)",
               "blendemo"};
  app.set_version_flag("--version",
                       std::string("blendemo ") + kToolVersion +
                           " (model format " +
                           std::to_string(kModelFormatVersion) + ")");

  // select-features
  auto* sel = app.add_subcommand("select-features",
                                 "Prune rarely-active blendshapes");
  fs::path sel_data;
  fs::path sel_out;
  double sel_threshold = kDefaultActivationThreshold;
  std::size_t sel_min_count = kDefaultMinActiveCount;
  sel->add_option("--data", sel_data, "Dataset directory")->required();
  sel->add_option("--threshold", sel_threshold, "Activation threshold")
      ->capture_default_str();
  sel->add_option("--min-count", sel_min_count, "Minimum active count")
      ->capture_default_str();
  sel->add_option("--out", sel_out, "Mask file to write")->required();

  // train
  auto* tr = app.add_subcommand("train", "Train a model");
  fs::path tr_data;
  fs::path tr_out;
  std::optional<fs::path> tr_config;
  std::optional<fs::path> tr_mask;
  std::optional<double> tr_lr;
  std::optional<double> tr_wd;
  std::optional<int> tr_epochs;
  std::optional<int> tr_batch;
  std::optional<int> tr_patience;
  std::optional<int> tr_interval;
  std::optional<std::string> tr_loss;
  std::optional<std::uint64_t> tr_seed;
  std::optional<std::string> tr_layers;
  std::optional<int> tr_threads;
  std::optional<double> tr_threshold;
  std::optional<std::size_t> tr_min_count;
  bool tr_subsample = false;
  tr->add_option("--data", tr_data, "Dataset directory")->required();
  tr->add_option("--config", tr_config, "JSON training config");
  tr->add_option("--out", tr_out, "Output directory")->required();
  tr->add_option("--mask", tr_mask, "Use this mask instead of selecting one");
  tr->add_option("--lr", tr_lr, "Learning rate");
  tr->add_option("--weight-decay", tr_wd, "Decoupled weight decay");
  tr->add_option("--epochs", tr_epochs, "Maximum epochs");
  tr->add_option("--batch-size", tr_batch, "Batch size");
  tr->add_option("--patience", tr_patience, "Early-stopping patience");
  tr->add_option("--checkpoint-interval", tr_interval,
                 "Minimum epochs between checkpoints");
  tr->add_option("--loss", tr_loss, "mse, cce or focal");
  tr->add_option("--seed", tr_seed, "Random seed");
  tr->add_option("--layers", tr_layers, "LSTM widths, e.g. 64,64,32,16");
  tr->add_option("--threads", tr_threads, "Gradient worker threads");
  tr->add_option("--threshold", tr_threshold, "Feature-selection threshold");
  tr->add_option("--min-count", tr_min_count, "Feature-selection min count");
  tr->add_flag("--subsample", tr_subsample,
               "Apply the per-class training quota before training");

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "Compute test metrics");
  std::optional<fs::path> ev_model;
  std::optional<fs::path> ev_preds;
  fs::path ev_data;
  std::string ev_split = "test";
  auto* ev_model_opt = ev->add_option("--model", ev_model, "Model file");
  auto* ev_preds_opt = ev->add_option("--predictions", ev_preds,
                                      "Predicted class codes, one per line");
  ev_model_opt->excludes(ev_preds_opt);
  ev->add_option("--data", ev_data, "Dataset directory")->required();
  ev->add_option("--split", ev_split, "train, val or test")
      ->capture_default_str();

  // predict
  auto* pr = app.add_subcommand("predict", "Classify frames independently");
  fs::path pr_model;
  fs::path pr_input;
  pr->add_option("--model", pr_model, "Model file")->required();
  pr->add_option("--input", pr_input, "Frame file (stream format)")->required();

  // stream
  auto* st = app.add_subcommand("stream", "Classify frames read from stdin");
  fs::path st_model;
  bool st_stateful = false;
  std::optional<double> st_smooth;
  double st_tie = 0.0;
  st->add_option("--model", st_model, "Model file")->required();
  st->add_flag("--stateful", st_stateful, "Carry LSTM state across frames");
  st->add_option("--smooth", st_smooth, "EMA coefficient in [0,1)");
  st->add_option("--tie-threshold", st_tie, "Label hysteresis margin")
      ->capture_default_str();

  // tune
  auto* tu = app.add_subcommand("tune", "Random hyperparameter search");
  fs::path tu_space;
  fs::path tu_data;
  int tu_trials = 0;
  int tu_budget = 0;
  std::optional<fs::path> tu_config;
  std::optional<fs::path> tu_out;
  std::optional<std::uint64_t> tu_seed;
  tu->add_option("--space", tu_space, "JSON search space")->required();
  tu->add_option("--trials", tu_trials, "Number of trials")->required();
  tu->add_option("--budget", tu_budget, "Epochs per trial")->required();
  tu->add_option("--data", tu_data, "Dataset directory")->required();
  tu->add_option("--config", tu_config, "Base JSON training config");
  tu->add_option("--seed", tu_seed, "Search seed");
  tu->add_option("--out", tu_out, "Write the best config as JSON");

  // inspect
  auto* ins = app.add_subcommand("inspect", "Print model metadata");
  fs::path ins_model;
  ins->add_option("--model", ins_model, "Model file")->required();

  app.require_subcommand(0, 1);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << app.version() << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  if (app.get_subcommands().empty()) {
    err << app.help();
    return kExitUsage;
  }

  try {
    if (sel->parsed()) {
      auto ds = load_split(sel_data, Split::kTrain);
      auto counts = count_activations(ds, sel_threshold);
      auto mask = select_features(counts, sel_min_count);
      write_mask_file(mask, sel_out);
      out << "kept " << mask.size() << " of " << counts.counts.size()
          << " blendshapes (threshold " << text::format_double(sel_threshold)
          << ", min count " << sel_min_count << ", " << counts.dataset_size
          << " frames)\n";
      return kExitOk;
    }

    if (tr->parsed()) {
      RunConfig rc = tr_config ? parse_run_config(*tr_config) : RunConfig{};
      auto& t = rc.train;
      if (tr_lr) t.optimizer.learning_rate = *tr_lr;
      if (tr_wd) t.optimizer.weight_decay = *tr_wd;
      if (tr_epochs) t.max_epochs = *tr_epochs;
      if (tr_batch) t.batch_size = *tr_batch;
      if (tr_patience) t.early_stop_patience = *tr_patience;
      if (tr_interval) t.checkpoint_min_interval = *tr_interval;
      if (tr_loss) t.loss.kind = loss_kind_from_name(*tr_loss);
      if (tr_seed) t.seed = *tr_seed;
      if (tr_threads) t.threads = *tr_threads;
      if (tr_layers) rc.layer_units = parse_layer_list(*tr_layers);
      if (tr_threshold) rc.threshold = *tr_threshold;
      if (tr_min_count) rc.min_count = *tr_min_count;
      if (tr_subsample) rc.subsample = true;
      validate(t);

      auto train_ds = load_training_split(tr_data, rc);
      auto val_ds = load_split(tr_data, Split::kValidation);
      auto mask = mask_for_training(rc, train_ds, tr_mask);
      Model model = init_model(rc.layer_units, mask, t.seed);
      auto history = train(model, train_ds, val_ds, t, tr_out);
      write_file(tr_out / "config.json", run_config_json(rc).dump(2) + "\n");
      write_mask_file(model.mask, tr_out / "mask.txt");
      const auto& last = history.epochs.back();
      out << "epochs: " << last.epoch
          << (history.early_stopped ? " (early stop)" : "") << '\n'
          << "optimizer steps: " << history.optimizer_steps << '\n'
          << "best epoch: " << history.best_epoch << '\n'
          << "best val_loss: " << text::format_fixed(history.best_val_loss, 6)
          << '\n'
          << "checkpoints: " << history.checkpoints.size() << '\n'
          << "model: " << history.last_model_path->string() << '\n';
      return kExitOk;
    }

    if (ev->parsed()) {
      if (!ev_model && !ev_preds) {
        err << "error: evaluate needs --model or --predictions\n";
        return kExitUsage;
      }
      auto ds = load_split(ev_data, parse_split(ev_split));
      if (ev_preds) {
        auto preds = read_predictions(*ev_preds);
        if (preds.size() != ds.size()) {
          throw Error(ErrorKind::kShape,
                      ev_preds->string() + ": " + std::to_string(preds.size()) +
                          " predictions for " + std::to_string(ds.size()) +
                          " samples");
        }
        write_metrics_report(out, evaluate_predictions(preds, ds), false);
      } else {
        auto model = load_model(*ev_model);
        write_metrics_report(out, evaluate(model, ds));
      }
      return kExitOk;
    }

    if (pr->parsed() || st->parsed()) {
      auto model = load_model(pr->parsed() ? pr_model : st_model);
      StreamOptions opts;
      std::ifstream file_in;
      std::istream* source = &in;
      if (pr->parsed()) {
        file_in.open(pr_input, std::ios::binary);
        if (!file_in) {
          throw Error(ErrorKind::kIo, "cannot open '" + pr_input.string() + "'");
        }
        source = &file_in;
      } else {
        opts.stateful = st_stateful;
        opts.smoothing = st_smooth;
        opts.tie_threshold = st_tie;
      }
      StreamSession session(model, opts);
      const auto& names = model.mask.source_names();
      std::string line;
      std::size_t line_number = 0;
      while (std::getline(*source, line)) {
        ++line_number;
        auto frame = parse_frame_line(line, names, line_number);
        if (!frame) continue;
        out << format_stream_line(session.step(*frame), model) << '\n';
        out.flush();
      }
      return kExitOk;
    }

    if (tu->parsed()) {
      RunConfig rc = tu_config ? parse_run_config(*tu_config) : RunConfig{};
      if (tu_seed) rc.train.seed = *tu_seed;
      validate(rc.train);
      auto space = parse_search_space(read_file(tu_space));
      auto train_ds = load_training_split(tu_data, rc);
      auto val_ds = load_split(tu_data, Split::kValidation);
      auto mask = mask_for_training(rc, train_ds, std::nullopt);
      Candidate base{rc.layer_units, rc.train};
      auto result = random_search(space, base, tu_trials, tu_budget, train_ds,
                                  val_ds, mask, rc.train.seed);
      print_leaderboard(out, result);
      if (tu_out) {
        RunConfig best = rc;
        best.train = result.best.config;
        best.train.max_epochs = rc.train.max_epochs;
        best.layer_units = result.best.layer_units;
        write_file(*tu_out, run_config_json(best).dump(2) + "\n");
      }
      return kExitOk;
    }

    if (ins->parsed()) {
      auto model = load_model(ins_model);
      out << "format_version: " << kModelFormatVersion << '\n';
      out << "layer_units:";
      for (int u : model.layer_units()) out << ' ' << u;
      out << "\ninput_dim: " << model.params.input_dim() << '\n';
      out << "parameters: " << model.params.parameter_count() << '\n';
      out << "classes:";
      for (std::size_t k = 0; k < model.class_names.size(); ++k) {
        out << ' ' << k << ':' << model.class_names[k];
      }
      out << "\nmask (" << model.mask.size() << " of "
          << model.mask.source_names().size() << "):\n";
      for (const auto& name : model.mask.kept_names()) {
        out << "  " << name << '\n';
      }
      out << "metadata:\n";
      for (const auto& [key, value] : model.metadata) {
        out << "  " << key << ": " << value << '\n';
      }
      return kExitOk;
    }
  } catch (const Error& e) {
    err << "error: " << to_string(e.kind()) << ": " << e.what() << '\n';
    return e.kind() == ErrorKind::kIo ? kExitIo : kExitData;
  }
  err << app.help();
  return kExitUsage;
}

}  // namespace blendemo::cli
