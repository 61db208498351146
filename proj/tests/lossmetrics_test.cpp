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

#include <gtest/gtest.h>

#include <cmath>
#include <numeric>
#include <random>
#include <sstream>

#include "blendemo/error.hpp"
#include "blendemo/losses.hpp"
#include "blendemo/metrics.hpp"
#include "test_support.hpp"

namespace blendemo {
namespace {

using Vec = std::vector<double>;

const ConfusionMatrix kReferenceConfusion = {{{{251, 35, 5}, {110, 850, 150}, {21, 140, 84}}}};

// Expands a confusion matrix into (prediction, truth) lists.
void expand(const ConfusionMatrix& cm, std::vector<ClassLabel>& preds,
            std::vector<ClassLabel>& truths) {
  for (int t = 0; t < kNumClasses; ++t) {
    for (int p = 0; p < kNumClasses; ++p) {
      for (std::uint64_t n = 0; n < cm.cells[t][p]; ++n) {
        truths.push_back(static_cast<ClassLabel>(t));
        preds.push_back(static_cast<ClassLabel>(p));
      }
    }
  }
}

TEST(Mse, Examples) {
  EXPECT_EQ(mse(Vec{0.2, 0.3, 0.5}, Vec{0.2, 0.3, 0.5}), 0.0);
  EXPECT_DOUBLE_EQ(mse(Vec{1, 0, 0}, Vec{0.5, 0.25, 0.25}), 0.125);
}

TEST(Mse, LengthMismatch) {
  try {
    mse(Vec{1, 0}, Vec{1, 0, 0});
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kShape);
  }
}

TEST(Mse, NonNegativeAndZeroOnlyAtEquality) {
  std::mt19937_64 rng(3);
  for (int i = 0; i < 200; ++i) {
    auto a = testing::random_distribution(3, rng);
    auto b = testing::random_distribution(3, rng);
    EXPECT_GT(mse(a, b), 0.0);
    EXPECT_EQ(mse(a, a), 0.0);
  }
}

TEST(Cce, Examples) {
  EXPECT_NEAR(cce(Vec{0, 1, 0}, Vec{0.25, 0.5, 0.25}), std::log(2.0), 1e-15);
  EXPECT_EQ(cce(Vec{0, 0, 1}, Vec{0, 0, 1}), 0.0);
}

TEST(Cce, ClampKeepsLossFinite) {
  double v = cce(Vec{1, 0, 0}, Vec{1e-20, 0.5, 0.5 - 1e-20});
  EXPECT_NEAR(v, 27.631021115928547, 1e-12);
  EXPECT_NEAR(cce(Vec{1, 0, 0}, Vec{0.0, 0.5, 0.5}), 27.631021115928547, 1e-12);
}

TEST(Cce, RejectsNonOneHotTarget) {
  for (const Vec& y : {Vec{0.5, 0.5, 0}, Vec{1, 1, 0}, Vec{0, 0, 0}}) {
    try {
      cce(y, Vec{0.2, 0.3, 0.5});
      FAIL();
    } catch (const Error& e) {
      EXPECT_EQ(e.kind(), ErrorKind::kInvalidTarget);
    }
  }
}

TEST(Cce, StrictlyDecreasingInTrueClassProbability) {
  double prev = cce(Vec{0, 1, 0}, Vec{0.495, 0.01, 0.495});
  for (double p = 0.02; p < 1.0; p += 0.01) {
    double now = cce(Vec{0, 1, 0}, Vec{(1 - p) / 2, p, (1 - p) / 2});
    EXPECT_LT(now, prev);
    prev = now;
  }
}

TEST(Focal, GammaZeroAlphaOneIsCce) {
  Vec y{0, 1, 0};
  Vec p{0.25, 0.5, 0.25};
  EXPECT_EQ(focal(y, p, {1.0, 0.0}), cce(y, p));
}

TEST(Focal, GammaZeroAlphaOneIsCceOnRandomDistributions) {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 1000; ++i) {
    Vec p = testing::random_distribution(3, rng);
    Vec y(3, 0.0);
    y[i % 3] = 1.0;
    EXPECT_NEAR(focal(y, p, {1.0, 0.0}), cce(y, p), 1e-12);
  }
}

TEST(Losses, MatchNaiveLoopsOnRandomDistributions) {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 1000; ++i) {
    Vec p = testing::random_distribution(3, rng);
    Vec y(3, 0.0);
    y[(i * 7) % 3] = 1.0;
    double sq = 0.0, ce = 0.0;
    for (int k = 0; k < 3; ++k) {
      sq += (y[k] - p[k]) * (y[k] - p[k]);
      if (y[k] != 0.0) ce -= y[k] * std::log(std::max(p[k], 1e-12));
    }
    EXPECT_NEAR(mse(y, p), sq / 3.0, 1e-15);
    EXPECT_NEAR(cce(y, p), ce, 1e-15);
  }
}

TEST(Focal, WorkedExample) {
  EXPECT_NEAR(focal(Vec{0, 1, 0}, Vec{0.25, 0.5, 0.25}, {0.25, 2.0}),
              0.04332169878499658, 1e-15);
}

TEST(Focal, VanishesFasterThanCce) {
  Vec y{1, 0, 0};
  double prev_ratio = 1.0;
  for (double p : {0.9, 0.99, 0.999, 0.9999}) {
    Vec yhat{p, (1 - p) / 2, (1 - p) / 2};
    double ratio = focal(y, yhat, {1.0, 2.0}) / cce(y, yhat);
    EXPECT_LT(ratio, prev_ratio);
    prev_ratio = ratio;
  }
  EXPECT_LT(prev_ratio, 1e-7);
}

// Central differences of loss_value with respect to yhat.
TEST(LossGradient, MatchesFiniteDifferences) {
  std::mt19937_64 rng(21);
  const LossSpec specs[] = {{LossKind::kMse, {}},
                            {LossKind::kCce, {}},
                            {LossKind::kFocal, {0.25, 2.0}},
                            {LossKind::kFocal, {0.7, 0.5}}};
  for (const auto& spec : specs) {
    for (int trial = 0; trial < 50; ++trial) {
      auto yhat = testing::random_distribution(3, rng);
      Vec y(3, 0.0);
      y[trial % 3] = 1.0;
      auto grad = loss_gradient(spec, y, yhat);
      for (std::size_t i = 0; i < 3; ++i) {
        const double h = 1e-6;
        Vec up = yhat, down = yhat;
        up[i] += h;
        down[i] -= h;
        double fd = (loss_value(spec, y, up) - loss_value(spec, y, down)) / (2 * h);
        EXPECT_NEAR(grad[i], fd, 1e-6 * std::max(1.0, std::abs(fd)));
      }
    }
  }
}

TEST(Confusion, PerfectPredictions) {
  std::vector<ClassLabel> labels;
  for (int i = 0; i < 10; ++i) labels.push_back(static_cast<ClassLabel>(i % 3));
  auto cm = confusion(labels, labels);
  EXPECT_EQ(cm.total(), 10u);
  EXPECT_EQ(cm.trace(), 10u);
}

TEST(Confusion, ReconstructsReference) {
  std::vector<ClassLabel> preds, truths;
  expand(kReferenceConfusion, preds, truths);
  EXPECT_EQ(confusion(preds, truths), kReferenceConfusion);
}

TEST(Confusion, SingleSadPredictedHappy) {
  std::vector<ClassLabel> preds{ClassLabel::kHappy};
  std::vector<ClassLabel> truths{ClassLabel::kSad};
  ConfusionMatrix expected;
  expected.cells[2][0] = 1;
  EXPECT_EQ(confusion(preds, truths), expected);
}

TEST(Confusion, LengthMismatch) {
  std::vector<ClassLabel> a{ClassLabel::kHappy};
  std::vector<ClassLabel> b{ClassLabel::kHappy, ClassLabel::kSad};
  EXPECT_THROW(confusion(a, b), Error);
}

TEST(Confusion, InvariantUnderSampleOrder) {
  std::vector<ClassLabel> preds, truths;
  expand(kReferenceConfusion, preds, truths);
  std::vector<std::size_t> order(preds.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(5);
  std::shuffle(order.begin(), order.end(), rng);
  std::vector<ClassLabel> p2, t2;
  for (auto i : order) {
    p2.push_back(preds[i]);
    t2.push_back(truths[i]);
  }
  auto cm = confusion(p2, t2);
  for (int k = 0; k < 3; ++k) EXPECT_EQ(cm.row_sum(k), kReferenceConfusion.row_sum(k));
  EXPECT_EQ(cm, kReferenceConfusion);
}

TEST(Accuracy, ReferenceConfusion) {
  EXPECT_EQ(kReferenceConfusion.total(), 1646u);
  EXPECT_NEAR(categorical_accuracy(kReferenceConfusion), 0.7199, 1e-4);
}

TEST(Accuracy, Extremes) {
  ConfusionMatrix diag;
  diag.cells[0][0] = 3;
  diag.cells[2][2] = 4;
  EXPECT_EQ(categorical_accuracy(diag), 1.0);
  ConfusionMatrix off;
  off.cells[0][1] = 3;
  off.cells[2][0] = 1;
  EXPECT_EQ(categorical_accuracy(off), 0.0);
  EXPECT_THROW(categorical_accuracy(ConfusionMatrix{}), Error);
}

TEST(MacroF1, ReferenceConfusion) {
  EXPECT_NEAR(macro_f1(kReferenceConfusion), 0.6298, 5e-4);
}

TEST(MacroF1, PerfectDiagonal) {
  ConfusionMatrix cm;
  cm.cells[0][0] = 5;
  cm.cells[1][1] = 2;
  cm.cells[2][2] = 1;
  EXPECT_EQ(macro_f1(cm), 1.0);
}

TEST(MacroF1, AbsentClassContributesZero) {
  // Sad is never true and never predicted.
  // Happy: P = 4/5, R = 4/6. Unknown: P = 2/4, R = 2/3.
  ConfusionMatrix cm{{{{4, 2, 0}, {1, 2, 0}, {0, 0, 0}}}};
  const double p0 = 4.0 / 5.0, r0 = 4.0 / 6.0;
  const double p1 = 2.0 / 4.0, r1 = 2.0 / 3.0;
  const double f0 = 2 * p0 * r0 / (p0 + r0);
  const double f1 = 2 * p1 * r1 / (p1 + r1);
  EXPECT_NEAR(macro_f1(cm), (f0 + f1 + 0.0) / 3.0, 1e-15);
}

TEST(MetricsReport, ContainsClassNamesAndValues) {
  Metrics m;
  m.confusion = kReferenceConfusion;
  m.accuracy = categorical_accuracy(kReferenceConfusion);
  m.macro_f1 = macro_f1(kReferenceConfusion);
  std::ostringstream out;
  write_metrics_report(out, m, false);
  auto s = out.str();
  EXPECT_NE(s.find("accuracy: 0.719927"), std::string::npos) << s;
  EXPECT_NE(s.find("macro_f1: 0.629758"), std::string::npos) << s;
  EXPECT_NE(s.find("unknown"), std::string::npos);
  EXPECT_NE(s.find("850"), std::string::npos);
}

}  // namespace
}  // namespace blendemo
