#include "trimscale/mantissa.hpp"

#include <gtest/gtest.h>

namespace trimscale {
namespace {

TEST(Normalize, ThirteenEightBit) {
  const auto nm = normalize(Operand{13, 8});
  EXPECT_FALSE(nm.is_zero);
  EXPECT_EQ(nm.lod, 3);
  // X = 5/8 at 7 fractional bits.
  EXPECT_EQ(nm.mantissa, 80u);
}

TEST(Normalize, PowerOfTwo) {
  const auto nm = normalize(Operand{128, 8});
  EXPECT_EQ(nm.lod, 7);
  EXPECT_EQ(nm.mantissa, 0u);
}

TEST(Normalize, ZeroIsFlagged) {
  const auto nm = normalize(Operand{0, 8});
  EXPECT_TRUE(nm.is_zero);
  EXPECT_EQ(nm.lod, 0);
  EXPECT_EQ(nm.mantissa, 0u);
}

TEST(Operand, RejectsOverflowAndBadWidth) {
  EXPECT_THROW(Operand(256, 8), std::out_of_range);
  EXPECT_THROW(Operand(1, 3), std::invalid_argument);
  EXPECT_THROW(Operand(1, 33), std::invalid_argument);
  EXPECT_NO_THROW(Operand(0xffffffffu, 32));
}

TEST(Truncate, FloorsToTopBits) {
  NormalizedOperand nm{0, 72, 8, false};  // X = 72/128 = 0.5625
  EXPECT_EQ(truncate(nm, 3).bits, 0b100u);
  nm.mantissa = 127;  // 0.9921875
  EXPECT_EQ(truncate(nm, 4).bits, 0b1111u);
  nm.mantissa = 0;
  for (int h = 1; h <= 7; ++h) EXPECT_EQ(truncate(nm, h).bits, 0u);
}

TEST(Truncate, RejectsWidthBeyondMantissa) {
  const auto nm = normalize(Operand{13, 8});
  EXPECT_THROW(truncate(nm, 8), std::invalid_argument);
}

TEST(Reconstruct, Examples) {
  NormalizedOperand nm{3, 80, 8, false};
  EXPECT_EQ(reconstruct(nm).value, 13u);
  EXPECT_EQ(reconstruct(normalize(Operand{0, 8})).value, 0u);
}

TEST(Reconstruct, RoundTripExhaustiveUpTo16Bits) {
  for (int n : {4, 8, 12, 16}) {
    for (std::uint64_t v = 0; v < (std::uint64_t{1} << n); ++v) {
      const auto nm = normalize(Operand{v, n});
      ASSERT_EQ(reconstruct(nm).value, v) << "n=" << n;
      if (v) {
        // No mantissa bits below position N-1-lod.
        const int low = n - 1 - nm.lod;
        ASSERT_EQ(nm.mantissa & ((std::uint64_t{1} << low) - 1), 0u);
        ASSERT_LT(nm.mantissa, std::uint64_t{1} << (n - 1));
      }
    }
  }
}

TEST(Truncate, MonotoneAndBounded) {
  constexpr int n = 12;
  for (std::uint64_t v = 1; v < (1u << n); ++v) {
    const auto nm = normalize(Operand{v, n});
    for (int h = 1; h < n - 1; ++h) {
      const auto t = truncate(nm, h);
      const auto t1 = truncate(nm, h + 1);
      ASSERT_EQ(t1.bits >> 1, t.bits);
      // X_h <= X < X_h + 2^-h at N-1 fractional bits.
      const std::uint64_t xh = t.bits << (n - 1 - h);
      ASSERT_LE(xh, nm.mantissa);
      ASSERT_LT(nm.mantissa - xh, std::uint64_t{1} << (n - 1 - h));
    }
  }
}

TEST(LeadingOne, MatchesScan) {
  for (std::uint64_t v = 1; v < 70000; ++v) {
    int scan = 63;
    while (!((v >> scan) & 1)) --scan;
    ASSERT_EQ(leading_one(v), scan);
  }
}

}  // namespace
}  // namespace trimscale
