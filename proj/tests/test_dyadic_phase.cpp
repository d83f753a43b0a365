// SPDX-License-Identifier: Apache-2.0
#include <gtest/gtest.h>

#include <random>

#include "aqft/dyadic_phase.hpp"

using aqft::DyadicPhase;

TEST(DyadicPhase, ReducesToLowestTerms) {
  const DyadicPhase a(2, 3);
  EXPECT_EQ(a.numerator(), 1);
  EXPECT_EQ(a.denom_log(), 2);
  EXPECT_EQ(DyadicPhase(4, 1), DyadicPhase(0, 0));
  EXPECT_EQ(DyadicPhase(0, 7).denom_log(), 0u);
}

TEST(DyadicPhase, WrapsIntoHalfOpenPeriod) {
  EXPECT_EQ(DyadicPhase(3, 1), DyadicPhase(-1, 1));   // 3/2 -> -1/2
  EXPECT_EQ(DyadicPhase(-1, 0), DyadicPhase(1, 0));   // -1 -> 1
  EXPECT_EQ(DyadicPhase(7, 2), DyadicPhase(-1, 2));   // 7/4 -> -1/4
  EXPECT_EQ(DyadicPhase(-5, 2), DyadicPhase(3, 2));   // -5/4 -> 3/4
  EXPECT_DOUBLE_EQ(DyadicPhase(1, 0).value(), 1.0);
}

TEST(DyadicPhase, ArithmeticIsAdditiveModTwo) {
  std::mt19937_64 rng(7);
  std::uniform_int_distribution<std::int64_t> num(-1000, 1000);
  std::uniform_int_distribution<std::uint32_t> den(0, 12);
  for (int i = 0; i < 500; ++i) {
    const DyadicPhase a(num(rng), den(rng)), b(num(rng), den(rng));
    const double sum = a.value() + b.value();
    const double got = (a + b).value();
    const double diff = std::remainder(sum - got, 2.0);
    EXPECT_NEAR(diff, 0.0, 1e-12);
    EXPECT_GT(got, -1.0);
    EXPECT_LE(got, 1.0);
    EXPECT_EQ(a - a, DyadicPhase());
    EXPECT_EQ((a + b) - b, a);
  }
}

TEST(DyadicPhase, TextForms) {
  EXPECT_EQ(DyadicPhase(-1, 3).to_string(), "-1/2^3");
  EXPECT_EQ(DyadicPhase::parse("-1/2^3"), DyadicPhase(-1, 3));
  EXPECT_EQ(DyadicPhase::parse("-1/8"), DyadicPhase(-1, 3));
  EXPECT_EQ(DyadicPhase::parse("+3/4"), DyadicPhase(3, 2));
  EXPECT_EQ(DyadicPhase::parse("1"), DyadicPhase(1, 0));
  for (const char* bad : {"", "1/3", "x", "1/", "1/2^", "1/0", "/4", "1/2^61"}) {
    EXPECT_THROW(DyadicPhase::parse(bad), std::invalid_argument) << bad;
  }
}

TEST(DyadicPhase, CliffordTClassification) {
  EXPECT_TRUE(DyadicPhase(1, 2).is_clifford_t());
  EXPECT_TRUE(DyadicPhase(1, 1).is_clifford_t());
  EXPECT_FALSE(DyadicPhase(1, 3).is_clifford_t());
}

TEST(DyadicPhase, RejectsHugeDenominator) { EXPECT_THROW(DyadicPhase(1, 61), std::invalid_argument); }
