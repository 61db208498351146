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

#include <gtest/gtest.h>

#include <array>
#include <cmath>

#include "blendemo/error.hpp"
#include "test_support.hpp"

namespace blendemo {
namespace {

// A model whose only nonzero-sized decayed tensor is a single scalar weight:
// one unit, one input, one class is not allowed, so use the head weight of a
// minimal model and zero everything else.
struct Scalar {
  Parameters params;
  double& weight() { return params.head.weights(0, 0); }
};

Scalar scalar_model(double value) {
  Scalar s{init_parameters(std::vector<int>{1}, 1, 0)};
  for (auto t : s.params.tensors()) std::fill(t.values.begin(), t.values.end(), 0.0);
  s.weight() = value;
  return s;
}

Gradients scalar_grad(const Parameters& like, double g) {
  Gradients grads = like.zeros_like();
  grads.head.weights(0, 0) = g;
  return grads;
}

struct TraceCase {
  bool amsgrad;
  double weight_decay;
  std::array<double, 3> expected;
};

class AdamWTrace : public ::testing::TestWithParam<TraceCase> {};

TEST_P(AdamWTrace, MatchesReferenceSteps) {
  const auto& tc = GetParam();
  AdamWConfig cfg{0.1, 0.9, 0.999, 1e-8, tc.weight_decay, tc.amsgrad};
  auto s = scalar_model(1.0);
  auto state = AdamWState::for_params(s.params);
  const std::array<double, 3> grads{0.5, -0.2, 0.05};
  for (int t = 0; t < 3; ++t) {
    adamw_step(s.params, scalar_grad(s.params, grads[t]), state, cfg);
    EXPECT_NEAR(s.weight(), tc.expected[t], 1e-12) << "step " << t + 1;
  }
  EXPECT_EQ(state.step, 3u);
}

INSTANTIATE_TEST_SUITE_P(
    Reference, AdamWTrace,
    ::testing::Values(
        TraceCase{false, 0.0,
                  {0.90000000199999997, 0.86543941811651082, 0.83292732204844377}},
        TraceCase{false, 0.01,
                  {0.89900000199999996, 0.86354041811451077, 0.83016478162832918}},
        TraceCase{true, 0.0,
                  {0.90000000199999997, 0.87368421305263155, 0.85338901050650606}},
        TraceCase{true, 0.01,
                  {0.89900000199999996, 0.8717852130506315, 0.85061822529145537}}),
    [](const auto& info) {
      return std::string(info.param.amsgrad ? "Amsgrad" : "Plain") +
             (info.param.weight_decay > 0 ? "Decay" : "NoDecay");
    });

TEST(AdamW, PureDecayWithZeroGradient) {
  AdamWConfig cfg{0.1, 0.9, 0.999, 1e-8, 0.1, true};
  auto s = scalar_model(1.0);
  auto state = AdamWState::for_params(s.params);
  adamw_step(s.params, s.params.zeros_like(), state, cfg);
  EXPECT_NEAR(s.weight(), 0.99, 1e-15);
}

TEST(AdamW, ZeroGradientNoDecayLeavesParametersUnchanged) {
  AdamWConfig cfg{0.1, 0.9, 0.999, 1e-8, 0.0, true};
  auto p = testing::random_parameters({3, 2}, 4, 5);
  auto before = p;
  auto state = AdamWState::for_params(p);
  for (int i = 0; i < 3; ++i) adamw_step(p, p.zeros_like(), state, cfg);
  EXPECT_EQ(p, before);
}

TEST(AdamW, BiasesAreNotDecayed) {
  AdamWConfig cfg{0.1, 0.9, 0.999, 1e-8, 0.5, false};
  auto p = testing::random_parameters({3}, 4, 6);
  auto before = p;
  auto state = AdamWState::for_params(p);
  adamw_step(p, p.zeros_like(), state, cfg);
  EXPECT_EQ(p.layers[0].bias, before.layers[0].bias);
  EXPECT_EQ(p.head.bias, before.head.bias);
  EXPECT_TRUE(p.layers[0].input_weights.isApprox(before.layers[0].input_weights * 0.95));
}

TEST(AdamW, ShapeMismatchRejected) {
  auto p = testing::random_parameters({3}, 4, 6);
  auto q = testing::random_parameters({2}, 4, 6);
  auto state = AdamWState::for_params(p);
  try {
    adamw_step(p, q, state, {});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConsistency);
  }
}

TEST(GlobalClipnorm, ScalesToUnitNorm) {
  auto s = scalar_model(0.0);
  Gradients g = s.params.zeros_like();
  g.head.weights(0, 0) = 3.0;
  g.head.bias(1) = 4.0;
  auto clipped = global_clipnorm(g, 1.0);
  EXPECT_NEAR(clipped.head.weights(0, 0), 0.6, 1e-15);
  EXPECT_NEAR(clipped.head.bias(1), 0.8, 1e-15);
  EXPECT_NEAR(global_norm(clipped), 1.0, 1e-15);
}

TEST(GlobalClipnorm, BelowThresholdUnchanged) {
  auto g = testing::random_parameters({3}, 2, 1, 0.01);
  ASSERT_LT(global_norm(g), 1.0);
  EXPECT_EQ(global_clipnorm(g, 1.0), g);
}

TEST(GlobalClipnorm, ResultNeverExceedsMaxNorm) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    auto g = testing::random_parameters({4, 3}, 5, seed, 3.0);
    EXPECT_LE(global_norm(global_clipnorm(g, 1.0)), 1.0 + 1e-12);
  }
}

TEST(GlobalClipnorm, NonPositiveMaxNormRejected) {
  auto g = testing::random_parameters({3}, 2, 1);
  try {
    global_clipnorm(g, 0.0);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kConfig);
  }
}

}  // namespace
}  // namespace blendemo
