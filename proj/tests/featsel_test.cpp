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

#include "blendemo/featsel.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "blendemo/error.hpp"
#include "test_support.hpp"

namespace blendemo {
namespace {

BlendshapeDataset column_dataset(const std::vector<double>& column_values,
                                 std::size_t column) {
  BlendshapeDataset ds;
  for (double v : column_values) {
    LabeledSample s;
    s.frame.scores.assign(kNumBlendshapes, 0.0);
    s.frame.scores[column] = v;
    ds.samples.push_back(s);
  }
  return ds;
}

// Independent counting pass: sample-major loop over a copied score table.
std::vector<std::size_t> brute_force_counts(const BlendshapeDataset& ds,
                                            double threshold) {
  std::vector<std::size_t> counts(kNumBlendshapes, 0);
  for (std::size_t j = 0; j < kNumBlendshapes; ++j) {
    for (const auto& s : ds.samples) {
      counts[j] += (s.frame.scores[j] > threshold) ? 1 : 0;
    }
  }
  return counts;
}

TEST(CountActivations, StrictThresholdOnThreeFrames) {
  auto ds = column_dataset({0.5, 0.39, 0.41}, 7);
  auto ac = count_activations(ds, 0.4);
  EXPECT_EQ(ac.counts[7], 2u);
  EXPECT_EQ(ac.dataset_size, 3u);
}

TEST(CountActivations, BoundaryScoreNotCounted) {
  auto ds = column_dataset({0.4, 0.4, 0.4000000001}, 3);
  EXPECT_EQ(count_activations(ds, 0.4).counts[3], 1u);
}

TEST(CountActivations, AllZeroDataset) {
  auto ds = column_dataset({0, 0, 0, 0}, 0);
  auto ac = count_activations(ds, 0.4);
  for (auto c : ac.counts) EXPECT_EQ(c, 0u);
}

TEST(CountActivations, EmptyDatasetIsError) {
  BlendshapeDataset ds;
  try {
    count_activations(ds, 0.4);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kEmptyDataset);
  }
}

TEST(CountActivations, MatchesBruteForceOnThousandFrames) {
  auto ds = testing::random_dataset(1000, 17);
  auto ac = count_activations(ds, 0.4);
  EXPECT_EQ(ac.counts, brute_force_counts(ds, 0.4));
  for (auto c : ac.counts) EXPECT_LE(c, ac.dataset_size);
}

TEST(CountActivations, MonotoneInThreshold) {
  auto ds = testing::random_dataset(300, 4);
  auto lo = count_activations(ds, 0.3);
  auto hi = count_activations(ds, 0.6);
  for (std::size_t j = 0; j < kNumBlendshapes; ++j) {
    EXPECT_GE(lo.counts[j], hi.counts[j]);
  }
}

TEST(SelectFeatures, StrictMinCount) {
  ActivationCounts ac;
  ac.counts = {150, 100, 101};
  auto mask = select_features(ac, 100);
  EXPECT_EQ(mask.kept_indices(), (std::vector<std::size_t>{0, 2}));
}

TEST(SelectFeatures, AllZeroCountsGiveEmptyMask) {
  ActivationCounts ac;
  ac.counts.assign(kNumBlendshapes, 0);
  EXPECT_TRUE(select_features(ac, 100).empty());
}

TEST(SelectFeatures, RaisingMinCountNeverAddsIndices) {
  auto ac = count_activations(testing::random_dataset(500, 8), 0.4);
  auto previous = select_features(ac, 0).kept_indices();
  for (std::size_t min = 10; min <= 500; min += 10) {
    auto kept = select_features(ac, min).kept_indices();
    EXPECT_TRUE(std::includes(previous.begin(), previous.end(), kept.begin(),
                              kept.end()));
    previous = kept;
  }
}

TEST(ApplyMask, IdentityMaskReturnsInput) {
  auto ds = testing::random_dataset(1, 3);
  auto mask = FeatureMask::identity(canonical_blendshape_names());
  EXPECT_EQ(apply_mask(ds.samples[0].frame, mask), ds.samples[0].frame.scores);
}

TEST(ApplyMask, SingleIndex) {
  BlendshapeFrame f;
  f.scores.assign(kNumBlendshapes, 0.0);
  f.scores[0] = 0.7;
  FeatureMask mask({0}, canonical_blendshape_names());
  EXPECT_EQ(apply_mask(f, mask), (std::vector<double>{0.7}));
}

TEST(ApplyMask, RandomMaskMatchesGatherLoop) {
  std::mt19937_64 rng(12);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::size_t> all(kNumBlendshapes);
    std::iota(all.begin(), all.end(), std::size_t{0});
    std::shuffle(all.begin(), all.end(), rng);
    std::vector<std::size_t> kept(all.begin(), all.begin() + 27);
    std::sort(kept.begin(), kept.end());
    FeatureMask mask(kept, canonical_blendshape_names());
    auto frame = testing::random_dataset(1, trial).samples[0].frame;
    auto out = apply_mask(frame, mask);
    ASSERT_EQ(out.size(), 27u);
    for (std::size_t k = 0; k < kept.size(); ++k) {
      EXPECT_EQ(out[k], frame.scores[kept[k]]);
    }
  }
}

TEST(ApplyMask, NameListMismatch) {
  auto names = canonical_blendshape_names();
  FeatureMask mask({1, 2}, names);
  std::swap(names[1], names[2]);
  BlendshapeFrame f;
  f.scores.assign(kNumBlendshapes, 0.1);
  try {
    apply_mask(f, mask, names);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.kind(), ErrorKind::kMaskMismatch);
  }
}

TEST(FeatureMask, RejectsUnsortedIndices) {
  EXPECT_THROW(FeatureMask({3, 1}, canonical_blendshape_names()), Error);
  EXPECT_THROW(FeatureMask({52}, canonical_blendshape_names()), Error);
}

TEST(MaskFile, RoundTrip) {
  testing::TempDir dir;
  FeatureMask mask({0, 5, 44, 51}, canonical_blendshape_names());
  write_mask_file(mask, dir / "mask.txt");
  EXPECT_EQ(read_mask_file(dir / "mask.txt", canonical_blendshape_names()),
            mask);
}

}  // namespace
}  // namespace blendemo
