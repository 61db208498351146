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

#include "blendemo/nn.hpp"

#include <cmath>
#include <random>

#include <Eigen/QR>

#include "blendemo/error.hpp"

namespace blendemo {
namespace {

constexpr int kGates = 4;

Vector sigmoid(const Vector& z) {
  return z.unaryExpr([](double v) { return 1.0 / (1.0 + std::exp(-v)); });
}

Vector tanh_vec(const Vector& z) {
  return z.unaryExpr([](double v) { return std::tanh(v); });
}

template <typename Fn>
void for_each_tensor(Parameters& p, Fn&& fn) {
  for (auto& layer : p.layers) {
    fn(layer.input_weights.data(), layer.input_weights.size(), false);
    fn(layer.recurrent_weights.data(), layer.recurrent_weights.size(), false);
    fn(layer.bias.data(), layer.bias.size(), true);
  }
  fn(p.head.weights.data(), p.head.weights.size(), false);
  fn(p.head.bias.data(), p.head.bias.size(), true);
}

Matrix orthogonal(Eigen::Index n, std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  Matrix a(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    for (Eigen::Index i = 0; i < n; ++i) a(i, j) = normal(rng);
  }
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(n, n);
  Matrix r = qr.matrixQR().triangularView<Eigen::Upper>();
  for (Eigen::Index j = 0; j < n; ++j) {
    if (r(j, j) < 0) q.col(j) *= -1.0;
  }
  return q;
}

void fill_uniform(Eigen::Ref<Matrix> m, double bound, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> dist(-bound, bound);
  for (Eigen::Index j = 0; j < m.cols(); ++j) {
    for (Eigen::Index i = 0; i < m.rows(); ++i) m(i, j) = dist(rng);
  }
}

void check_cache(const Parameters& params, const ForwardCache& cache) {
  if (cache.layer_units != params.layer_units() ||
      cache.input_dim != params.input_dim() ||
      cache.records.size() != params.layers.size() ||
      cache.probabilities.size() != params.head.bias.size()) {
    throw Error(ErrorKind::kConsistency,
                "forward cache was not produced by this model");
  }
}

}  // namespace

std::vector<int> Parameters::layer_units() const {
  std::vector<int> units;
  for (const auto& l : layers) units.push_back(static_cast<int>(l.units()));
  return units;
}

Eigen::Index Parameters::input_dim() const {
  return layers.empty() ? 0 : layers.front().input_dim();
}

std::size_t Parameters::parameter_count() const {
  std::size_t n = 0;
  for (auto t : tensors()) n += t.size();
  return n;
}

std::vector<ParamTensor> Parameters::tensors() {
  std::vector<ParamTensor> out;
  for_each_tensor(*this, [&](double* data, Eigen::Index n, bool is_bias) {
    out.push_back({std::span<double>(data, static_cast<std::size_t>(n)),
                   is_bias});
  });
  return out;
}

std::vector<std::span<const double>> Parameters::tensors() const {
  std::vector<std::span<const double>> out;
  for_each_tensor(const_cast<Parameters&>(*this),
                  [&](double* data, Eigen::Index n, bool) {
                    out.emplace_back(data, static_cast<std::size_t>(n));
                  });
  return out;
}

Parameters Parameters::zeros_like() const {
  Parameters z;
  for (const auto& l : layers) {
    z.layers.push_back({Matrix::Zero(l.input_weights.rows(), l.input_dim()),
                        Matrix::Zero(l.recurrent_weights.rows(), l.units()),
                        Vector::Zero(l.bias.size())});
  }
  z.head.weights = Matrix::Zero(head.weights.rows(), head.weights.cols());
  z.head.bias = Vector::Zero(head.bias.size());
  return z;
}

bool Parameters::same_shape(const Parameters& other) const {
  auto a = tensors();
  auto b = other.tensors();
  if (a.size() != b.size() || layer_units() != other.layer_units() ||
      input_dim() != other.input_dim()) {
    return false;
  }
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (a[k].size() != b[k].size()) return false;
  }
  return true;
}

bool Parameters::operator==(const Parameters& other) const {
  if (!same_shape(other)) return false;
  auto a = tensors();
  auto b = other.tensors();
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (!std::equal(a[k].begin(), a[k].end(), b[k].begin())) return false;
  }
  return true;
}

void add_scaled(Gradients& dst, const Gradients& src, double weight) {
  if (!dst.same_shape(src)) {
    throw Error(ErrorKind::kConsistency, "gradient shapes differ");
  }
  auto d = dst.tensors();
  auto s = src.tensors();
  for (std::size_t k = 0; k < d.size(); ++k) {
    for (std::size_t i = 0; i < d[k].values.size(); ++i) {
      d[k].values[i] += weight * s[k][i];
    }
  }
}

double global_norm(const Gradients& g) {
  double sum = 0.0;
  for (auto t : g.tensors()) {
    for (double v : t) sum += v * v;
  }
  return std::sqrt(sum);
}

double glorot_bound(int fan_in, int fan_out) {
  return std::sqrt(6.0 / static_cast<double>(fan_in + fan_out));
}

Parameters init_parameters(std::span<const int> layer_units, int input_dim,
                           std::uint64_t seed, int num_classes) {
  if (layer_units.empty()) {
    throw Error(ErrorKind::kInvalidArchitecture,
                "at least one LSTM layer is required");
  }
  if (input_dim <= 0 || num_classes <= 0) {
    throw Error(ErrorKind::kInvalidArchitecture,
                "input dimension and class count must be positive");
  }
  for (int u : layer_units) {
    if (u <= 0) {
      throw Error(ErrorKind::kInvalidArchitecture,
                  "layer width must be positive, got " + std::to_string(u));
    }
  }

  std::mt19937_64 rng(seed);
  Parameters p;
  int in = input_dim;
  for (int units : layer_units) {
    LstmLayerParams layer;
    layer.input_weights.resize(kGates * units, in);
    layer.recurrent_weights.resize(kGates * units, units);
    layer.bias = Vector::Zero(kGates * units);
    double bound = glorot_bound(in, units);
    for (int g = 0; g < kGates; ++g) {
      fill_uniform(layer.input_weights.middleRows(g * units, units), bound,
                   rng);
    }
    for (int g = 0; g < kGates; ++g) {
      layer.recurrent_weights.middleRows(g * units, units) =
          orthogonal(units, rng);
    }
    layer.bias.segment(units, units).setOnes();  // forget gate
    p.layers.push_back(std::move(layer));
    in = units;
  }
  p.head.weights.resize(num_classes, in);
  fill_uniform(p.head.weights, glorot_bound(in, num_classes), rng);
  p.head.bias = Vector::Zero(num_classes);
  return p;
}

Model init_model(std::span<const int> layer_units, FeatureMask mask,
                 std::uint64_t seed) {
  if (mask.empty()) {
    throw Error(ErrorKind::kInvalidArchitecture,
                "feature mask keeps no blendshapes");
  }
  Model m;
  m.params = init_parameters(layer_units, static_cast<int>(mask.size()), seed);
  m.mask = std::move(mask);
  return m;
}

CellStep lstm_cell_forward(const Vector& x, const Vector& h_prev,
                           const Vector& c_prev, const LstmLayerParams& p) {
  const Eigen::Index units = p.units();
  if (x.size() != p.input_dim() || h_prev.size() != units ||
      c_prev.size() != units || p.input_weights.rows() != kGates * units ||
      p.bias.size() != kGates * units) {
    throw Error(ErrorKind::kShape, "LSTM cell input dimensions mismatch");
  }
  Vector z = p.input_weights * x + p.recurrent_weights * h_prev + p.bias;
  CellStep s;
  s.input_gate = sigmoid(z.segment(0, units));
  s.forget_gate = sigmoid(z.segment(units, units));
  s.candidate = tanh_vec(z.segment(2 * units, units));
  s.output_gate = sigmoid(z.segment(3 * units, units));
  s.c = s.forget_gate.cwiseProduct(c_prev) +
        s.input_gate.cwiseProduct(s.candidate);
  s.tanh_c = tanh_vec(s.c);
  s.h = s.output_gate.cwiseProduct(s.tanh_c);
  return s;
}

HiddenState zero_state(const Parameters& params) {
  HiddenState s;
  for (const auto& l : params.layers) {
    s.h.push_back(Vector::Zero(l.units()));
    s.c.push_back(Vector::Zero(l.units()));
  }
  return s;
}

Vector softmax(const Vector& logits) {
  Vector e = (logits.array() - logits.maxCoeff()).exp();
  return e / e.sum();
}

ForwardResult forward(const Parameters& params, std::span<const Vector> seq,
                      const HiddenState* state) {
  if (params.layers.empty()) {
    throw Error(ErrorKind::kInvalidArchitecture, "model has no layers");
  }
  if (seq.empty()) {
    throw Error(ErrorKind::kShape, "input sequence is empty");
  }
  for (const auto& x : seq) {
    if (x.size() != params.input_dim()) {
      throw Error(ErrorKind::kShape,
                  "feature vector has " + std::to_string(x.size()) +
                      " entries, model expects " +
                      std::to_string(params.input_dim()));
    }
  }
  HiddenState current = state ? *state : zero_state(params);
  if (current.h.size() != params.layers.size() ||
      current.c.size() != params.layers.size()) {
    throw Error(ErrorKind::kShape, "hidden state does not match the model");
  }
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    if (current.h[l].size() != params.layers[l].units() ||
        current.c[l].size() != params.layers[l].units()) {
      throw Error(ErrorKind::kShape, "hidden state does not match the model");
    }
  }

  ForwardResult out;
  auto& cache = out.cache;
  cache.layer_units = params.layer_units();
  cache.input_dim = params.input_dim();
  cache.records.resize(params.layers.size());

  std::vector<Vector> layer_input(seq.begin(), seq.end());
  for (std::size_t l = 0; l < params.layers.size(); ++l) {
    auto& records = cache.records[l];
    records.reserve(layer_input.size());
    for (auto& x : layer_input) {
      CellRecord rec{x, current.h[l], current.c[l],
                     lstm_cell_forward(x, current.h[l], current.c[l],
                                       params.layers[l])};
      current.h[l] = rec.step.h;
      current.c[l] = rec.step.c;
      x = rec.step.h;  // becomes the next layer's input at this timestep
      records.push_back(std::move(rec));
    }
  }
  cache.logits = params.head.weights * layer_input.back() + params.head.bias;
  cache.probabilities = softmax(cache.logits);
  out.probabilities = cache.probabilities;
  out.state = std::move(current);
  return out;
}

ForwardResult forward(const Model& model, std::span<const Vector> seq,
                      const HiddenState* state) {
  if (model.params.input_dim() != static_cast<Eigen::Index>(model.mask.size())) {
    throw Error(ErrorKind::kConsistency,
                "model input width differs from its feature mask");
  }
  return forward(model.params, seq, state);
}

Gradients backward(const Parameters& params, const ForwardCache& cache,
                   std::span<const double> target, const LossSpec& loss) {
  check_cache(params, cache);
  const auto& probs = cache.probabilities;
  if (static_cast<Eigen::Index>(target.size()) != probs.size()) {
    throw Error(ErrorKind::kShape, "target length differs from class count");
  }

  std::span<const double> prob_span(probs.data(),
                                    static_cast<std::size_t>(probs.size()));
  auto dprob_vec = loss_gradient(loss, target, prob_span);
  Eigen::Map<const Vector> dprob(dprob_vec.data(), probs.size());
  // Softmax Jacobian-vector product: p * (dp - <p, dp>).
  Vector dlogits = probs.cwiseProduct(
      (dprob.array() - probs.dot(dprob)).matrix());

  Gradients grads = params.zeros_like();
  const std::size_t num_layers = params.layers.size();
  const std::size_t steps = cache.records.front().size();
  const Vector& top_h = cache.records.back().back().step.h;
  grads.head.weights = dlogits * top_h.transpose();
  grads.head.bias = dlogits;

  // Gradient arriving at each timestep's output of the current layer.
  std::vector<Vector> dh_from_above(
      steps, Vector::Zero(params.layers.back().units()));
  dh_from_above.back() = params.head.weights.transpose() * dlogits;

  for (std::size_t l = num_layers; l-- > 0;) {
    const auto& layer = params.layers[l];
    auto& g = grads.layers[l];
    const Eigen::Index units = layer.units();
    Vector dh_next = Vector::Zero(units);
    Vector dc_next = Vector::Zero(units);
    std::vector<Vector> dx(steps);
    Vector dz(kGates * units);
    for (std::size_t t = steps; t-- > 0;) {
      const auto& rec = cache.records[l][t];
      const auto& s = rec.step;
      Vector dh = dh_from_above[t] + dh_next;
      Vector dc = dc_next + dh.cwiseProduct(s.output_gate)
                                .cwiseProduct((1.0 - s.tanh_c.array().square())
                                                  .matrix());
      Vector d_out = dh.cwiseProduct(s.tanh_c);
      Vector d_in = dc.cwiseProduct(s.candidate);
      Vector d_cand = dc.cwiseProduct(s.input_gate);
      Vector d_forget = dc.cwiseProduct(rec.c_prev);
      dc_next = dc.cwiseProduct(s.forget_gate);

      auto sig_grad = [](const Vector& gate) {
        return (gate.array() * (1.0 - gate.array())).matrix();
      };
      dz.segment(0, units) = d_in.cwiseProduct(sig_grad(s.input_gate));
      dz.segment(units, units) = d_forget.cwiseProduct(sig_grad(s.forget_gate));
      dz.segment(2 * units, units) = d_cand.cwiseProduct(
          (1.0 - s.candidate.array().square()).matrix());
      dz.segment(3 * units, units) =
          d_out.cwiseProduct(sig_grad(s.output_gate));

      g.input_weights.noalias() += dz * rec.x.transpose();
      g.recurrent_weights.noalias() += dz * rec.h_prev.transpose();
      g.bias += dz;
      dh_next = layer.recurrent_weights.transpose() * dz;
      dx[t] = layer.input_weights.transpose() * dz;
    }
    dh_from_above = std::move(dx);
  }
  return grads;
}

}  // namespace blendemo
