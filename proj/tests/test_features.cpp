// Copyright 2026 The smad Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include <cmath>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "smad/features.hpp"
#include "oracles.hpp"
#include "test_util.hpp"

namespace smad {
namespace {

TEST(Lbp, HandWorkedCode) {
  ImagePlane p(3, 3);
  p.data = {1, 9, 2,  //
            8, 5, 3,  //
            7, 4, 6};
  auto h = lbp_histogram(p, 1);
  // N (bit 2), W (bit 4), SW (bit 5), SE (bit 7) are >= 5.
  EXPECT_DOUBLE_EQ(h[4 + 16 + 32 + 128], 1.0);
}

TEST(Lbp, ConstantPlaneIsAllOnes) {
  auto h = lbp_histogram(ImagePlane(10, 10, 0.5), 1);
  EXPECT_DOUBLE_EQ(h[255], 1.0);
}

TEST(Lbp, BrightCentrePixelHasCodeZero) {
  ImagePlane p(3, 3, 0.0);
  p.at(1, 1) = 1.0;
  auto h = lbp_histogram(p, 1);
  EXPECT_DOUBLE_EQ(h[0], 1.0);
}

TEST(Lbp, MatchesOracle) {
  std::mt19937_64 rng(31);
  for (int trial = 0; trial < 20; ++trial) {
    auto p = test::random_plane(16, 16, rng);
    int r = 1 + trial % 3;
    EXPECT_EQ(lbp_histogram(p, r), oracle::lbp(p, r)) << "trial " << trial;
  }
}

TEST(Lbp, TooSmallRejected) {
  EXPECT_EQ(test::error_code_of([] { lbp_histogram(ImagePlane(2, 5), 1); }), Errc::invalid);
}

TEST(Hog, MatchesOracle) {
  std::mt19937_64 rng(32);
  for (int trial = 0; trial < 20; ++trial) {
    int w = 16 + int(rng() % 30), h = 16 + int(rng() % 30);
    auto p = test::random_plane(w, h, rng);
    auto got = hog_descriptor(p);
    auto want = oracle::hog(p, 8, 9, 0.2, 1e-6);
    ASSERT_EQ(got.size(), want.size());
    for (std::size_t i = 0; i < got.size(); ++i) ASSERT_NEAR(got[i], want[i], 1e-9) << "trial " << trial;
  }
}

TEST(Hog, VerticalEdgeVotesIntoBinZero) {
  ImagePlane p(16, 16);
  for (int y = 0; y < 16; ++y)
    for (int x = 8; x < 16; ++x) p.at(x, y) = 1.0;
  auto v = hog_descriptor(p);
  ASSERT_EQ(v.size(), 36u);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (i % 9 != 0) {
      EXPECT_EQ(v[i], 0.0);
    }
  }
  EXPECT_GT(v[0] + v[9], 0.0);
}

TEST(Hog, ConstantPlaneIsAllZero) {
  for (double v : hog_descriptor(ImagePlane(32, 32, 0.6))) EXPECT_EQ(v, 0.0);
}

TEST(Hog, BlockNormsBounded) {
  std::mt19937_64 rng(33);
  auto v = hog_descriptor(test::random_plane(40, 40, rng));
  for (std::size_t b = 0; b < v.size(); b += 36) {
    double ss = 0;
    for (int i = 0; i < 36; ++i) {
      EXPECT_LE(v[b + i], 0.2 / 0.2 + 1e-12);
      ss += v[b + i] * v[b + i];
    }
    EXPECT_NEAR(ss, 1.0, 1e-6);
  }
}

TEST(Hog, LayoutAndSmallPlane) {
  EXPECT_EQ(hog_layout({320, 320}).dims, 39u * 39u * 36u);
  EXPECT_EQ(hog_layout({80, 80}).dims, 9u * 9u * 36u);
  EXPECT_EQ(test::error_code_of([] { hog_descriptor(ImagePlane(15, 64)); }), Errc::invalid);
}

TEST(Hog, BinBoundaries) {
  EXPECT_EQ(hog_bin(1, 0, 9), 0);
  EXPECT_EQ(hog_bin(0, 1, 9), 4);
  EXPECT_EQ(hog_bin(-1, 0, 9), 0);
  EXPECT_EQ(hog_bin(1, -1e-12, 9), 8);
}

TEST(Bsif, MatchesOracle) {
  std::mt19937_64 rng(34);
  const auto& bank = builtin_bsif_bank();
  for (int trial = 0; trial < 20; ++trial) {
    auto p = test::random_plane(16, 16, rng);
    EXPECT_EQ(bsif_histogram(p, bank), oracle::bsif(p, bank)) << "trial " << trial;
  }
}

TEST(Bsif, FlatPlaneMapsToCodeZero) {
  auto h = bsif_histogram(ImagePlane(12, 12, 0.3), builtin_bsif_bank());
  ASSERT_EQ(h.size(), 256u);
  EXPECT_DOUBLE_EQ(h[0], 1.0);
}

TEST(Bsif, NegatedPlaneComplementsCodes) {
  // With ~zero-probability zero responses on random data, code c maps to 255 - c.
  std::mt19937_64 rng(36);
  auto p = test::random_plane(20, 20, rng);
  ImagePlane neg = p;
  for (auto& v : neg.data) v = -v;
  auto h = bsif_histogram(p, builtin_bsif_bank());
  auto hn = bsif_histogram(neg, builtin_bsif_bank());
  for (int c = 0; c < 256; ++c) EXPECT_DOUBLE_EQ(h[c], hn[255 - c]);
}

TEST(Bsif, PinnedBankFileMatchesBuiltin) {
  auto fb = FilterBank::load(std::filesystem::path(SMAD_SOURCE_DIR) / "data" / "bsif_11x11_8bit.bin");
  const auto& builtin = builtin_bsif_bank();
  EXPECT_EQ(fb.count, 8);
  EXPECT_EQ(fb.size, 11);
  EXPECT_EQ(fb.taps, builtin.taps);
  EXPECT_EQ(builtin.checksum(), fb.checksum());
  EXPECT_NO_THROW(fb.validate(8, 11));
}

TEST(Bsif, BankSaveLoadAndValidation) {
  auto dir = test::scratch_dir("bsif_bank");
  builtin_bsif_bank().save(dir / "b.bin");
  auto fb = FilterBank::load(dir / "b.bin");
  EXPECT_EQ(fb.taps, builtin_bsif_bank().taps);
  fb.taps[3] += 1e-3;
  EXPECT_EQ(test::error_code_of([&] { fb.validate(8, 11); }), Errc::invalid);
  EXPECT_EQ(test::error_code_of([&] { builtin_bsif_bank().validate(8, 9); }), Errc::invalid);
}

TEST(FeatureDims, DefaultConfiguration) {
  auto d = feature_dims(DescriptorConfig{});
  EXPECT_EQ(d.lbp, 4608u);
  EXPECT_EQ(d.hog, 424008u);
  EXPECT_EQ(d.bsif, 4608u);
  auto rows = describe_dims(DescriptorConfig{});
  ASSERT_EQ(rows.size(), 18u);
  EXPECT_EQ(rows[2].dims, (Dims{80, 80}));
  EXPECT_EQ(rows[2].hog, 2916u);
  EXPECT_EQ(rows[0].hog, 54756u);
  EXPECT_EQ(rows[17].label, "Cr3");
}

TEST(FeatureDims, InvalidConfigRejected) {
  DescriptorConfig c;
  c.working_size = 40;
  EXPECT_EQ(test::error_code_of([&] { c.validate(); }), Errc::config);
  c = {};
  c.bsif_size = 10;
  EXPECT_EQ(test::error_code_of([&] { c.validate(); }), Errc::config);
}

TEST(Extractor, DimsHistogramsAndDeterminism) {
  DescriptorConfig c;
  c.working_size = 64;
  FeatureExtractor ex(c);
  std::mt19937_64 rng(35);
  auto img = test::random_rgb(90, 70, rng);
  auto fs = ex.extract(img, "a");
  auto d = feature_dims(c);
  EXPECT_EQ(fs.lbp.dim(), d.lbp);
  EXPECT_EQ(fs.hog.dim(), d.hog);
  EXPECT_EQ(fs.bsif.dim(), d.bsif);
  for (int k = 0; k < 18; ++k) {
    double sl = std::accumulate(fs.lbp.values.begin() + 256 * k, fs.lbp.values.begin() + 256 * (k + 1), 0.0);
    double sb = std::accumulate(fs.bsif.values.begin() + 256 * k, fs.bsif.values.begin() + 256 * (k + 1), 0.0);
    EXPECT_NEAR(sl, 1.0, 1e-12);
    EXPECT_NEAR(sb, 1.0, 1e-12);
  }
  auto again = ex.extract(img, "a");
  EXPECT_EQ(fs.lbp.values, again.lbp.values);
  EXPECT_EQ(fs.hog.values, again.hog.values);
  EXPECT_EQ(fs.bsif.values, again.bsif.values);
}

TEST(Extractor, ConstantImageGivesOneHotLbpBlocks) {
  DescriptorConfig c;
  c.working_size = 64;
  // 0.5 is exact through every colour transform and binomial tap, so the bands are exactly
  // zero. Other grays leave rounding residue of order 1e-17, which LBP comparisons see.
  auto fs = FeatureExtractor(c).extract(test::solid_rgb(64, 64, 0.5, 0.5, 0.5));
  ASSERT_EQ(fs.lbp.dim(), 18u * 256u);
  for (int k = 0; k < 18; ++k) {
    int ones = 0;
    for (int i = 0; i < 256; ++i) {
      double v = fs.lbp.values[std::size_t(256 * k + i)];
      ones += v == 1.0;
      EXPECT_TRUE(v == 0.0 || v == 1.0);
    }
    EXPECT_EQ(ones, 1) << "block " << k;
  }
}

TEST(Extractor, CanonicalTextTracksSettings) {
  DescriptorConfig a, b;
  b.lbp_radius = 2;
  FeatureExtractor ea(a), eb(b);
  EXPECT_NE(ea.canonical(), eb.canonical());
  EXPECT_NE(ea.hash(), eb.hash());
  EXPECT_EQ(ea.hash(), FeatureExtractor(a).hash());
}

}  // namespace
}  // namespace smad
