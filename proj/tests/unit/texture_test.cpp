#include <gtest/gtest.h>

#include <numeric>

#include "dermveil/error.hpp"
#include "dermveil/features.hpp"
#include "dermveil/rng.hpp"
#include "oracles.hpp"

using namespace dermveil;

namespace {

std::vector<int> stripes() {
  std::vector<int> w(25);
  for (int r = 0; r < 5; ++r) {
    for (int c = 0; c < 5; ++c) w[r * 5 + c] = c % 2;
  }
  return w;
}

}  // namespace

TEST(Glcm, ConstantWindow) {
  const std::vector<int> w(25, 7);
  for (const auto dir : kGlcmDirections) {
    const Glcm m = glcm(w, 5, dir, 16);
    EXPECT_DOUBLE_EQ(m.at(7, 7), 1.0);
  }
  const TextureFeatures t = texture_features(w, 5, 16);
  EXPECT_EQ(t.entropy, 0.0);
  EXPECT_EQ(t.contrast, 0.0);
  EXPECT_EQ(t.correlation, 0.0);
}

TEST(Glcm, VerticalStripes) {
  const auto w = stripes();
  const Glcm m = glcm(w, 5, GlcmDirection::Deg0, 2);
  // Columns 0..3 -> 4 pairs per row: (0,1) x2 and (1,0) x2.
  EXPECT_DOUBLE_EQ(m.at(0, 1), 0.5);
  EXPECT_DOUBLE_EQ(m.at(1, 0), 0.5);
  EXPECT_DOUBLE_EQ(m.at(0, 0), 0.0);
  const TextureFeatures t0 = texture_statistics(m);
  EXPECT_DOUBLE_EQ(t0.entropy, 1.0);
  EXPECT_DOUBLE_EQ(t0.contrast, 1.0);
  const TextureFeatures all = texture_features(w, 5, 2);
  const TextureFeatures expect = oracle::pair_texture(w, 5, 2);
  EXPECT_NEAR(all.entropy, expect.entropy, 1e-12);
  EXPECT_NEAR(all.contrast, expect.contrast, 1e-12);
  EXPECT_NEAR(all.correlation, expect.correlation, 1e-12);
}

TEST(Glcm, OffsetsAndErrors) {
  EXPECT_EQ(glcm_offset(GlcmDirection::Deg45), (std::array<int, 2>{-1, 1}));
  EXPECT_EQ(glcm_offset(GlcmDirection::Deg135), (std::array<int, 2>{-1, -1}));
  EXPECT_THROW(glcm(std::vector<int>{1}, 1, GlcmDirection::Deg0, 4), Error);
  EXPECT_THROW(glcm(std::vector<int>(4, 9), 2, GlcmDirection::Deg0, 4), Error);
}

TEST(Glcm, EntriesSumToOne) {
  Rng rng(1);
  std::vector<int> w(49);
  for (int t = 0; t < 200; ++t) {
    for (auto& x : w) x = static_cast<int>(rng.below(16));
    for (const auto dir : kGlcmDirections) {
      const Glcm m = glcm(w, 7, dir, 16);
      const auto v = m.values();
      EXPECT_NEAR(std::accumulate(v.begin(), v.end(), 0.0), 1.0, 1e-12);
    }
  }
}

TEST(Texture, MatchesPairEnumeration) {
  Rng rng(12);
  std::vector<int> w(25);
  for (int t = 0; t < 1000; ++t) {
    const int levels = t % 5 == 0 ? 2 : 16;
    const int spread = 1 + static_cast<int>(rng.below(levels));
    for (auto& x : w) x = static_cast<int>(rng.below(spread));
    const TextureFeatures got = texture_features(w, 5, levels);
    const TextureFeatures expect = oracle::pair_texture(w, 5, levels);
    ASSERT_NEAR(got.entropy, expect.entropy, 1e-9);
    ASSERT_NEAR(got.contrast, expect.contrast, 1e-9);
    ASSERT_NEAR(got.correlation, expect.correlation, 1e-9);
    EXPECT_GE(got.entropy, 0.0);
    EXPECT_GE(got.contrast, 0.0);
    EXPECT_GE(got.correlation, -1.0);
    EXPECT_LE(got.correlation, 1.0);
  }
}

TEST(Texture, ShiftedLevelsGiveIdenticalStatistics) {
  Rng rng(4);
  std::vector<int> w(25), shifted(25);
  for (int t = 0; t < 100; ++t) {
    for (auto& x : w) x = static_cast<int>(rng.below(8));
    const int k = static_cast<int>(rng.below(8));
    for (int i = 0; i < 25; ++i) shifted[i] = w[i] + k;
    const TextureFeatures a = texture_features(w, 5, 16);
    const TextureFeatures b = texture_features(shifted, 5, 16);
    EXPECT_NEAR(a.entropy, b.entropy, 1e-12);
    EXPECT_NEAR(a.contrast, b.contrast, 1e-12);
    EXPECT_NEAR(a.correlation, b.correlation, 1e-9);
  }
}

TEST(Luminance, Quantization) {
  EXPECT_DOUBLE_EQ(luminance({255, 255, 255}), 255.0);
  EXPECT_EQ(quantize_luminance(0.0, 16), 0);
  EXPECT_EQ(quantize_luminance(15.99, 16), 0);
  EXPECT_EQ(quantize_luminance(16.0, 16), 1);
  EXPECT_EQ(quantize_luminance(255.0, 16), 15);
}
