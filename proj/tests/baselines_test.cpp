#include "trimscale/baselines.hpp"

#include <gtest/gtest.h>

#include "trimscale/design.hpp"

namespace trimscale {
namespace {

TEST(Drum, HandTrace200x200) {
  // 200 = 0b11001000: capture 110, force LSB -> 111, 5 bits dropped.
  EXPECT_EQ(Drum(3, 8)(200, 200), 50176u);
  EXPECT_EQ(Drum(4, 8)(200, 200), 43264u);  // 1101 << 4 each: 13*13 << 8
}

TEST(Drum, SmallOperandsPassThrough) {
  const Drum d(4, 8);
  for (std::uint64_t a = 1; a < 16; ++a) {
    for (std::uint64_t b = 1; b < 16; ++b) ASSERT_EQ(d(a, b), a * b);
  }
  EXPECT_EQ(d(0, 77), 0u);
  EXPECT_EQ(d(77, 0), 0u);
}

TEST(Dsm, FixedSegmentStarts) {
  EXPECT_EQ(Dsm(3, 8).starts(), (std::vector<int>{0, 3, 5}));
  EXPECT_EQ(Dsm(4, 8).starts(), (std::vector<int>{0, 4}));
  const Dsm d(3, 8);
  for (int lod = 0; lod < 8; ++lod) {
    const int s = d.segment_start(lod);
    EXPECT_LE(s, lod);
    EXPECT_LT(lod - s, 3);
  }
}

TEST(Dsm, HandTrace200x200) {
  // m = 4: lod 7 -> segment bits [7:4] = 1100.
  EXPECT_EQ(Dsm(4, 8)(200, 200), 36864u);
  // m = 3: start 5 -> 110.
  EXPECT_EQ(Dsm(3, 8)(200, 200), 36864u);
  EXPECT_EQ(Dsm(4, 8)(0, 3), 0u);
  EXPECT_EQ(Dsm(4, 8)(13, 11), 143u);  // both inside the low segment
}

TEST(Tosam, HandTraces) {
  const Tosam t(1, 3, 8);
  // X = 0: X_h' = 1/16, X_t' = 1/4 -> 1 + 1/8 + 1/16.
  EXPECT_EQ(t(128, 128), 19456u);
  EXPECT_EQ(t(1, 1), 1u);
  EXPECT_EQ(t(200, 200), 44032u);
  EXPECT_EQ(t(16, 64), 1216u);
  EXPECT_EQ(t(0, 200), 0u);
}

TEST(Tosam, ParameterChecks) {
  EXPECT_THROW(Tosam(3, 3, 8), std::invalid_argument);
  EXPECT_THROW(Tosam(1, 2, 8), std::invalid_argument);
  EXPECT_THROW(Tosam(1, 8, 8), std::invalid_argument);
  EXPECT_NO_THROW(Tosam(0, 3, 8));
  EXPECT_THROW(Drum(2, 8), std::invalid_argument);
  EXPECT_THROW(Dsm(9, 8), std::invalid_argument);
}

TEST(Baselines, ZeroAbsorptionAndCommutativity) {
  for (const char* spec : {"drum:3", "drum:5", "dsm:3", "dsm:4", "tosam:0,3", "tosam:1,3", "tosam:2,5", "pow2", "exact"}) {
    const auto d = parse_design(spec, 8);
    for (std::uint64_t a = 0; a < 256; ++a) {
      ASSERT_EQ(d(a, 0), 0u) << spec;
      ASSERT_EQ(d(0, a), 0u) << spec;
      for (std::uint64_t b = 0; b < a; ++b) ASSERT_EQ(d(a, b), d(b, a)) << spec;
    }
  }
}

TEST(Design, ParseGrammar) {
  EXPECT_EQ(parse_design("scaletrim:3,4", 8).name, "scaletrim:3,4");
  EXPECT_TRUE(std::holds_alternative<Tosam>(parse_design("tosam:1,3", 8).impl));
  EXPECT_TRUE(std::holds_alternative<Drum>(parse_design("drum:3", 8).impl));
  EXPECT_TRUE(std::holds_alternative<Pow2>(parse_design("pow2", 8).impl));
  EXPECT_THROW(parse_design("mitchell", 8), std::invalid_argument);
  EXPECT_THROW(parse_design("drum:", 8), std::invalid_argument);
  EXPECT_THROW(parse_design("drum:3,4", 8), std::invalid_argument);
  EXPECT_THROW(parse_design("scaletrim:3", 8), std::invalid_argument);
  EXPECT_THROW(parse_design("tosam:1,x", 8), std::invalid_argument);
  EXPECT_THROW(parse_design("scaletrim:3,5", 8), std::invalid_argument);
}

}  // namespace
}  // namespace trimscale
