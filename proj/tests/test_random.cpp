#include <gtest/gtest.h>

#include <set>

#include "anng/random.hpp"

using anng::Philox4x32;

// Known-answer vectors for Philox4x32-10 (Random123 distribution).
TEST(Philox, KnownAnswerZero) {
  const auto out = Philox4x32::apply({0, 0, 0, 0}, {0, 0});
  EXPECT_EQ(out, (Philox4x32::Counter{0x6627e8d5u, 0xe169c58du, 0xbc57ac4cu, 0x9b00dbd8u}));
}

TEST(Philox, KnownAnswerOnes) {
  const auto out = Philox4x32::apply({0xffffffffu, 0xffffffffu, 0xffffffffu, 0xffffffffu}, {0xffffffffu, 0xffffffffu});
  EXPECT_EQ(out, (Philox4x32::Counter{0x408f276du, 0x41c83b0eu, 0xa20bc7c6u, 0x6d5451fdu}));
}

TEST(CoinFlip, DeterministicAndInUnitInterval) {
  for (std::uint64_t i = 0; i < 50; ++i)
    for (std::uint64_t j = 0; j < 50; ++j) {
      if (i == j) continue;
      const double u = anng::coin_flip(9, i, j);
      EXPECT_GE(u, 0.0);
      EXPECT_LT(u, 1.0);
      EXPECT_EQ(u, anng::coin_flip(9, i, j));
    }
}

TEST(CoinFlip, OrderedPairsAndSeedsDiffer) {
  EXPECT_NE(anng::coin_flip(1, 2, 3), anng::coin_flip(1, 3, 2));
  EXPECT_NE(anng::coin_flip(1, 2, 3), anng::coin_flip(2, 2, 3));
}

TEST(CoinFlip, SelfPairRejected) { EXPECT_THROW(anng::coin_flip(1, 4, 4), std::invalid_argument); }

TEST(CoinFlip, MeanAndVarianceOfUniform) {
  double sum = 0.0, sq = 0.0;
  const int n = 200000;
  for (int k = 0; k < n; ++k) {
    const double u = anng::coin_flip(77, static_cast<std::uint64_t>(k), static_cast<std::uint64_t>(k) + 1);
    sum += u;
    sq += u * u;
  }
  const double mean = sum / n;
  EXPECT_NEAR(mean, 0.5, 5.0 * std::sqrt(1.0 / 12.0 / n));
  EXPECT_NEAR(sq / n - mean * mean, 1.0 / 12.0, 2e-3);
}

TEST(DeriveSeed, StreamsAndIndicesAreDistinct) {
  std::set<std::uint64_t> seen;
  for (std::uint64_t s = 1; s <= 7; ++s)
    for (std::uint64_t k = 0; k < 100; ++k) seen.insert(anng::derive_seed(5, s, k));
  EXPECT_EQ(seen.size(), 700u);
  EXPECT_EQ(anng::derive_seed(5, 1, 3), anng::derive_seed(5, 1, 3));
}

TEST(MakeRng, ReproducibleStreams) {
  auto a = anng::make_rng(3, anng::streams::kQuery, 8);
  auto b = anng::make_rng(3, anng::streams::kQuery, 8);
  for (int k = 0; k < 10; ++k) EXPECT_EQ(a(), b());
}
