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

#include "blendemo/dataset.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <random>
#include <set>
#include <sstream>
#include <unordered_set>

#include "blendemo/error.hpp"
#include "blendemo/text.hpp"

namespace blendemo {
namespace {

constexpr std::size_t kFixedColumns = 3;  // index, label7, label3

[[noreturn]] void parse_fail(std::string_view source, std::size_t row,
                             std::string_view column, const std::string& what) {
  std::ostringstream msg;
  msg << source << ": row " << row;
  if (!column.empty()) msg << ", column '" << column << "'";
  msg << ": " << what;
  throw Error(ErrorKind::kParse, msg.str());
}

}  // namespace

std::string_view split_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train";
    case Split::kValidation: return "validation";
    case Split::kTest: return "test";
  }
  return "?";
}

std::string_view split_file_name(Split split) {
  switch (split) {
    case Split::kTrain: return "train.csv";
    case Split::kValidation: return "val.csv";
    case Split::kTest: return "test.csv";
  }
  return "?";
}

void validate(const BlendshapeDataset& ds) {
  const auto& names = ds.blendshape_names;
  if (names.size() != kNumBlendshapes) {
    throw Error(ErrorKind::kShape, "dataset has " +
                                       std::to_string(names.size()) +
                                       " blendshape names, expected 52");
  }
  std::set<std::string> distinct(names.begin(), names.end());
  if (distinct.size() != names.size()) {
    throw Error(ErrorKind::kShape, "blendshape names are not distinct");
  }
  std::unordered_set<std::uint64_t> seen;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const auto& s = ds.samples[i];
    if (s.frame.scores.size() != names.size()) {
      throw Error(ErrorKind::kShape,
                  "sample " + std::to_string(i) + " has " +
                      std::to_string(s.frame.scores.size()) + " scores");
    }
    for (std::size_t j = 0; j < s.frame.scores.size(); ++j) {
      double v = s.frame.scores[j];
      if (!(v >= 0.0 && v <= 1.0)) {
        throw Error(ErrorKind::kShape, "sample " + std::to_string(i) +
                                           " score '" + names[j] +
                                           "' outside [0,1]");
      }
    }
    if (s.frame.index && !seen.insert(*s.frame.index).second) {
      throw Error(ErrorKind::kConsistency,
                  "duplicate index " + std::to_string(*s.frame.index));
    }
    if (s.label7 && remap_label(*s.label7) != s.label3) {
      throw Error(ErrorKind::kInvalidLabel,
                  "sample " + std::to_string(i) + ": label7 '" +
                      std::string(source_name(*s.label7)) +
                      "' does not map to label3 " +
                      std::to_string(code(s.label3)));
    }
  }
}

std::vector<double> one_hot(ClassLabel label, int num_classes) {
  if (num_classes <= 0 || code(label) >= num_classes) {
    throw Error(ErrorKind::kInvalidLabel,
                "label " + std::to_string(code(label)) +
                    " out of range for " + std::to_string(num_classes) +
                    " classes");
  }
  std::vector<double> v(static_cast<std::size_t>(num_classes), 0.0);
  v[static_cast<std::size_t>(code(label))] = 1.0;
  return v;
}

ClassQuota default_training_quota() {
  return {
      {SourceLabel::kHappy, 4000},    {SourceLabel::kSad, 4000},
      {SourceLabel::kAngry, 1500},    {SourceLabel::kAfraid, 1500},
      {SourceLabel::kSurprise, 1500}, {SourceLabel::kDisgust, std::nullopt},
      {SourceLabel::kNeutral, 1500},
  };
}

BlendshapeDataset subsample_per_class(const BlendshapeDataset& ds,
                                      const ClassQuota& quota,
                                      std::uint64_t seed) {
  if (ds.split != Split::kTrain) {
    throw Error(ErrorKind::kConfig,
                "per-class subsampling applies to the train split only");
  }
  std::map<SourceLabel, std::vector<std::size_t>> by_class;
  for (std::size_t i = 0; i < ds.samples.size(); ++i) {
    const auto& label7 = ds.samples[i].label7;
    if (!label7) {
      throw Error(ErrorKind::kMissingClass,
                  "sample " + std::to_string(i) +
                      " has no source label; cannot subsample per class");
    }
    by_class[*label7].push_back(i);
  }

  std::mt19937_64 rng(seed);
  std::vector<std::size_t> chosen;
  for (const auto& [label, limit] : quota) {
    auto it = by_class.find(label);
    bool wants_samples = !limit || *limit > 0;
    if (it == by_class.end()) {
      if (wants_samples) {
        throw Error(ErrorKind::kMissingClass,
                    "quota requested for absent class '" +
                        std::string(source_name(label)) + "'");
      }
      continue;
    }
    std::vector<std::size_t> pool = it->second;
    std::size_t take = limit ? std::min(*limit, pool.size()) : pool.size();
    // Partial Fisher-Yates: the first `take` entries are a uniform draw.
    for (std::size_t k = 0; k < take; ++k) {
      std::uniform_int_distribution<std::size_t> pick(k, pool.size() - 1);
      std::swap(pool[k], pool[pick(rng)]);
    }
    chosen.insert(chosen.end(), pool.begin(),
                  pool.begin() + static_cast<std::ptrdiff_t>(take));
  }
  std::sort(chosen.begin(), chosen.end());

  BlendshapeDataset out;
  out.split = ds.split;
  out.blendshape_names = ds.blendshape_names;
  out.samples.reserve(chosen.size());
  for (std::size_t i : chosen) out.samples.push_back(ds.samples[i]);
  return out;
}

BlendshapeDataset read_dataset_csv(std::istream& in, Split split,
                                   std::string_view source) {
  BlendshapeDataset ds;
  ds.split = split;
  ds.blendshape_names.clear();

  std::string line;
  if (!std::getline(in, line)) {
    parse_fail(source, 1, "", "missing header row");
  }
  if (line.size() >= 3 && line.compare(0, 3, "\xEF\xBB\xBF") == 0) {
    line.erase(0, 3);
  }
  auto header = text::split(text::trim(line), ',');
  if (header.size() < kFixedColumns || text::trim(header[0]) != "index" ||
      text::trim(header[1]) != "label7" || text::trim(header[2]) != "label3") {
    parse_fail(source, 1, "",
               "header must start with 'index,label7,label3'");
  }
  if (header.size() != kFixedColumns + kNumBlendshapes) {
    parse_fail(source, 1, "",
               "expected " + std::to_string(kNumBlendshapes) +
                   " blendshape columns, found " +
                   std::to_string(header.size() - kFixedColumns));
  }
  for (std::size_t c = kFixedColumns; c < header.size(); ++c) {
    std::string name(text::trim(header[c]));
    if (name.empty()) parse_fail(source, 1, "", "empty blendshape name");
    if (find_name(ds.blendshape_names, name)) {
      parse_fail(source, 1, name, "duplicate blendshape name");
    }
    ds.blendshape_names.push_back(std::move(name));
  }

  std::unordered_set<std::uint64_t> seen_index;
  std::size_t row = 1;
  while (std::getline(in, line)) {
    ++row;
    auto trimmed = text::trim(line);
    if (trimmed.empty()) continue;
    auto cells = text::split(trimmed, ',');
    if (cells.size() != header.size()) {
      parse_fail(source, row, "",
                 "expected " + std::to_string(header.size()) +
                     " columns, found " + std::to_string(cells.size()));
    }
    LabeledSample s;
    if (auto cell = text::trim(cells[0]); !cell.empty()) {
      auto idx = text::parse_uint(cell);
      if (!idx) parse_fail(source, row, "index", "not a non-negative integer");
      if (!seen_index.insert(*idx).second) {
        parse_fail(source, row, "index",
                   "duplicate index " + std::to_string(*idx));
      }
      s.frame.index = *idx;
    }
    if (auto cell = text::trim(cells[1]); !cell.empty()) {
      try {
        s.label7 = source_label_from_name(cell);
      } catch (const Error&) {
        parse_fail(source, row, "label7",
                   "unknown label '" + std::string(cell) + "'");
      }
    }
    auto l3 = text::parse_int(cells[2]);
    if (!l3 || *l3 < 0 || *l3 >= kNumClasses) {
      parse_fail(source, row, "label3",
                 "'" + std::string(text::trim(cells[2])) +
                     "' is not one of 0, 1, 2");
    }
    s.label3 = static_cast<ClassLabel>(*l3);
    if (s.label7 && remap_label(*s.label7) != s.label3) {
      parse_fail(source, row, "label3",
                 "inconsistent with label7 '" +
                     std::string(source_name(*s.label7)) + "'");
    }
    s.frame.scores.reserve(kNumBlendshapes);
    for (std::size_t c = kFixedColumns; c < cells.size(); ++c) {
      const auto& name = ds.blendshape_names[c - kFixedColumns];
      auto v = text::parse_double(cells[c]);
      if (!v) parse_fail(source, row, name, "not a decimal number");
      if (!(*v >= 0.0 && *v <= 1.0)) {
        parse_fail(source, row, name,
                   "score " + std::string(text::trim(cells[c])) +
                       " outside [0,1]");
      }
      s.frame.scores.push_back(*v);
    }
    ds.samples.push_back(std::move(s));
  }
  return ds;
}

void write_dataset_csv(std::ostream& out, const BlendshapeDataset& ds) {
  validate(ds);
  out << "index,label7,label3";
  for (const auto& name : ds.blendshape_names) out << ',' << name;
  out << '\n';
  for (const auto& s : ds.samples) {
    if (s.frame.index) out << *s.frame.index;
    out << ',';
    if (s.label7) out << source_name(*s.label7);
    out << ',' << code(s.label3);
    for (double v : s.frame.scores) out << ',' << text::format_double(v);
    out << '\n';
  }
}

BlendshapeDataset load_dataset(const std::filesystem::path& path,
                               std::optional<Split> split) {
  if (!split) {
    auto stem = path.stem().string();
    if (stem == "train") {
      split = Split::kTrain;
    } else if (stem == "val" || stem == "validation") {
      split = Split::kValidation;
    } else if (stem == "test") {
      split = Split::kTest;
    } else {
      throw Error(ErrorKind::kConfig, "cannot infer split from file name '" +
                                          path.string() + "'");
    }
  }
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  }
  return read_dataset_csv(in, *split, path.string());
}

void save_dataset(const BlendshapeDataset& ds,
                  const std::filesystem::path& path) {
  std::ostringstream buf;
  write_dataset_csv(buf, ds);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  }
  out << buf.str();
  if (!out) {
    throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
  }
}

BlendshapeDataset load_split(const std::filesystem::path& dir, Split split) {
  return load_dataset(dir / std::string(split_file_name(split)), split);
}

}  // namespace blendemo
