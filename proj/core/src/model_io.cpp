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

#include "blendemo/model_io.hpp"

#include <bit>
#include <chrono>
#include <cstdlib>
#include <cstring>
#include <ctime>
#include <fstream>
#include <sstream>

#include <openssl/evp.h>

#include "blendemo/error.hpp"
#include "blendemo/text.hpp"
#include "json.hpp"

namespace blendemo {
namespace {

using nlohmann::json;

constexpr std::string_view kMagic = "BLENDEMO-MODEL ";
constexpr std::string_view kFooterTag = "sha256 ";
constexpr std::size_t kDigestHexLength = 64;
constexpr std::size_t kFooterLength =
    kFooterTag.size() + kDigestHexLength + 1;

void append_le(std::string& out, double v) {
  auto bits = std::bit_cast<std::uint64_t>(v);
  for (int b = 0; b < 8; ++b) {
    out.push_back(static_cast<char>((bits >> (8 * b)) & 0xFF));
  }
}

double read_le(const char* p) {
  std::uint64_t bits = 0;
  for (int b = 0; b < 8; ++b) {
    bits |= static_cast<std::uint64_t>(static_cast<unsigned char>(p[b]))
            << (8 * b);
  }
  return std::bit_cast<double>(bits);
}

[[noreturn]] void malformed(const std::string& what) {
  throw Error(ErrorKind::kParse, "malformed model file: " + what);
}

// Reads "<tag> <number>\n" at `pos`.
std::size_t read_count_line(std::string_view bytes, std::size_t& pos,
                            std::string_view tag) {
  auto eol = bytes.find('\n', pos);
  if (eol == std::string_view::npos) {
    throw Error(ErrorKind::kTruncated, "model file ends inside a header line");
  }
  auto line = bytes.substr(pos, eol - pos);
  if (line.substr(0, tag.size()) != tag) {
    malformed("expected '" + std::string(tag) + "' line");
  }
  auto n = text::parse_uint(line.substr(tag.size()));
  if (!n) malformed("bad count on '" + std::string(tag) + "' line");
  pos = eol + 1;
  return static_cast<std::size_t>(*n);
}

json metadata_json(const Model& m) {
  const auto& p = m.params;
  json meta;
  meta["format_version"] = kModelFormatVersion;
  meta["blendshape_names"] = m.mask.source_names();
  meta["mask_indices"] = m.mask.kept_indices();
  meta["mask_names"] = m.mask.kept_names();
  meta["class_names"] = m.class_names;
  meta["layer_units"] = p.layer_units();
  meta["input_dim"] = p.input_dim();
  meta["num_classes"] = p.head.bias.size();
  meta["gate_order"] = "input,forget,cell,output";
  meta["tensor_layout"] = "column-major";
  meta["parameter_count"] = p.parameter_count();
  meta["metadata"] = m.metadata;
  return meta;
}

}  // namespace

std::string sha256_hex(std::string_view data) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(data.data(), data.size(), digest, &len, EVP_sha256(),
                 nullptr) != 1) {
    throw Error(ErrorKind::kIo, "SHA-256 computation failed");
  }
  static constexpr char kHex[] = "0123456789abcdef";
  std::string out;
  out.reserve(2 * len);
  for (unsigned int i = 0; i < len; ++i) {
    out.push_back(kHex[digest[i] >> 4]);
    out.push_back(kHex[digest[i] & 0xF]);
  }
  return out;
}

std::string provenance_timestamp() {
  std::time_t t = 0;
  if (const char* epoch = std::getenv("SOURCE_DATE_EPOCH")) {
    auto v = text::parse_int(epoch);
    t = v ? static_cast<std::time_t>(*v) : 0;
  } else {
    t = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  }
  std::tm tm{};
  gmtime_r(&t, &tm);
  char buf[32];
  std::strftime(buf, sizeof(buf), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

std::string serialize_model(const Model& model) {
  if (model.params.input_dim() !=
      static_cast<Eigen::Index>(model.mask.size())) {
    throw Error(ErrorKind::kConsistency,
                "model input width differs from its feature mask");
  }
  std::string meta = metadata_json(model).dump(2);
  std::string out;
  out += kMagic;
  out += std::to_string(kModelFormatVersion) + "\n";
  out += "meta " + std::to_string(meta.size()) + "\n";
  out += meta;
  out += "\n";
  out += "weights " + std::to_string(model.params.parameter_count()) + "\n";
  for (auto tensor : model.params.tensors()) {
    for (double v : tensor) append_le(out, v);
  }
  std::string digest = sha256_hex(out);
  out += kFooterTag;
  out += digest;
  out += "\n";
  return out;
}

Model deserialize_model(std::string_view bytes) {
  // Version first, so newer files are rejected before anything else is read.
  auto eol = bytes.find('\n');
  if (bytes.substr(0, kMagic.size()) != kMagic) {
    if (bytes.size() < kMagic.size() &&
        kMagic.substr(0, bytes.size()) == bytes) {
      throw Error(ErrorKind::kTruncated, "model file is truncated");
    }
    malformed("missing BLENDEMO-MODEL signature");
  }
  if (eol == std::string_view::npos) {
    throw Error(ErrorKind::kTruncated, "model file is truncated");
  }
  auto version = text::parse_int(bytes.substr(kMagic.size(), eol - kMagic.size()));
  if (!version) malformed("unreadable format version");
  if (*version != kModelFormatVersion) {
    throw Error(ErrorKind::kVersion,
                "model format version " + std::to_string(*version) +
                    " is not supported (this build reads version " +
                    std::to_string(kModelFormatVersion) + ")");
  }

  if (bytes.size() < eol + 1 + kFooterLength ||
      bytes.substr(bytes.size() - kFooterLength, kFooterTag.size()) !=
          kFooterTag ||
      bytes.back() != '\n') {
    throw Error(ErrorKind::kTruncated,
                "model file is truncated (checksum footer missing)");
  }
  std::string_view body = bytes.substr(0, bytes.size() - kFooterLength);
  std::string_view stored = bytes.substr(
      bytes.size() - kFooterLength + kFooterTag.size(), kDigestHexLength);
  if (sha256_hex(body) != stored) {
    throw Error(ErrorKind::kChecksum, "model file checksum mismatch");
  }

  std::size_t pos = eol + 1;
  std::size_t meta_len = read_count_line(body, pos, "meta ");
  if (pos + meta_len + 1 > body.size()) {
    throw Error(ErrorKind::kTruncated, "metadata section is truncated");
  }
  json meta;
  try {
    meta = json::parse(body.substr(pos, meta_len));
  } catch (const json::exception& e) {
    malformed(std::string("metadata is not valid JSON: ") + e.what());
  }
  pos += meta_len;
  if (body[pos] != '\n') malformed("metadata section not terminated");
  ++pos;
  std::size_t count = read_count_line(body, pos, "weights ");
  if (body.size() - pos != count * 8) {
    throw Error(ErrorKind::kTruncated,
                "weights section holds " + std::to_string(body.size() - pos) +
                    " bytes, expected " + std::to_string(count * 8));
  }

  Model model;
  try {
    auto names = meta.at("blendshape_names").get<std::vector<std::string>>();
    auto kept = meta.at("mask_indices").get<std::vector<std::size_t>>();
    model.mask = FeatureMask(std::move(kept), std::move(names));
    model.class_names =
        meta.at("class_names").get<std::array<std::string, kNumClasses>>();
    auto units = meta.at("layer_units").get<std::vector<int>>();
    int input_dim = meta.at("input_dim").get<int>();
    int num_classes = meta.at("num_classes").get<int>();
    if (input_dim != static_cast<int>(model.mask.size())) {
      malformed("input_dim does not match the mask");
    }
    model.metadata =
        meta.at("metadata").get<std::map<std::string, std::string>>();
    model.params = init_parameters(units, input_dim, 0, num_classes);
  } catch (const json::exception& e) {
    malformed(std::string("bad metadata field: ") + e.what());
  }

  if (model.params.parameter_count() != count) {
    malformed("weight count " + std::to_string(count) +
              " does not match the declared architecture");
  }
  const char* p = body.data() + pos;
  for (auto tensor : model.params.tensors()) {
    for (double& v : tensor.values) {
      v = read_le(p);
      p += 8;
    }
  }
  return model;
}

void save_model(const Model& model, const std::filesystem::path& path) {
  std::string bytes = serialize_model(model);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorKind::kIo, "cannot write '" + path.string() + "'");
  }
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) {
    throw Error(ErrorKind::kIo, "write failed for '" + path.string() + "'");
  }
}

Model load_model(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorKind::kIo, "cannot open '" + path.string() + "'");
  }
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return deserialize_model(buf.str());
  } catch (const Error& e) {
    throw Error(e.kind(), path.string() + ": " + e.what());
  }
}

}  // namespace blendemo
