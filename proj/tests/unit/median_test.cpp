#include <gtest/gtest.h>

#include <bit>
#include <numeric>

#include "dermveil/error.hpp"
#include "dermveil/features.hpp"
#include "dermveil/rng.hpp"
#include "oracles.hpp"

using namespace dermveil;

TEST(Median25, SimpleCases) {
  std::vector<double> v(25);
  std::iota(v.begin(), v.end(), 0.0);
  EXPECT_EQ(median25(v), 12.0);
  std::reverse(v.begin(), v.end());
  EXPECT_EQ(median25(v), 12.0);
  EXPECT_EQ(median25(std::vector<double>(25, 3.5)), 3.5);
  EXPECT_THROW(median25(std::vector<double>(24, 1.0)), Error);
}

TEST(Median25, MatchesSortOnRandomTuples) {
  Rng rng(99);
  std::vector<double> v(25);
  for (int t = 0; t < 20000; ++t) {
    // Small alphabets force many ties.
    const int alphabet = t % 3 == 0 ? 3 : 1000;
    for (auto& x : v) x = static_cast<double>(rng.below(alphabet)) + (t % 2 ? rng.uniform() : 0.0);
    ASSERT_EQ(median25(v), oracle::sorted_median(v));
  }
}

// 0-1 principle: a comparator network selects the k-th order statistic of
// every input iff it does so for every 0/1 input. 2^25 inputs, 64 per word.
TEST(Median25, ZeroOnePrincipleExhaustive) {
  const auto net = median25_exchanges();
  ASSERT_EQ(net.size(), 99u);
  const std::uint64_t lane_patterns[6] = {0xAAAAAAAAAAAAAAAAULL, 0xCCCCCCCCCCCCCCCCULL,
                                          0xF0F0F0F0F0F0F0F0ULL, 0xFF00FF00FF00FF00ULL,
                                          0xFFFF0000FFFF0000ULL, 0xFFFFFFFF00000000ULL};
  std::uint64_t bad = 0;
  for (std::uint64_t word = 0; word < (1ULL << 19); ++word) {
    std::uint64_t v[25];
    for (int i = 0; i < 6; ++i) v[i] = lane_patterns[i];
    for (int i = 6; i < 25; ++i) v[i] = (word >> (i - 6)) & 1 ? ~0ULL : 0ULL;
    for (const auto& [i, j] : net) {
      const std::uint64_t lo = v[i] & v[j];
      const std::uint64_t hi = v[i] | v[j];
      v[i] = lo;
      v[j] = hi;
    }
    const int high_ones = std::popcount(word);
    std::uint64_t expect = 0;
    for (int lane = 0; lane < 64; ++lane) {
      if (high_ones + std::popcount(static_cast<unsigned>(lane)) >= 13) expect |= 1ULL << lane;
    }
    bad += std::popcount(v[12] ^ expect);
  }
  EXPECT_EQ(bad, 0u);
}

TEST(Median25, NetworkIsAPartialSortOnly) {
  // Position 12 is exact; the rest need not be sorted.
  std::array<double, 25> v;
  for (int i = 0; i < 25; ++i) v[i] = 24 - i;
  median25_network(v);
  EXPECT_EQ(v[12], 12);
  for (int i = 0; i < 12; ++i) EXPECT_LE(v[i], v[12]);
  for (int i = 13; i < 25; ++i) EXPECT_GE(v[i], v[12]);
}
