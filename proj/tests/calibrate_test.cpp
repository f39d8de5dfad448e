#include "trimscale/calibrate.hpp"

#include <cmath>

#include <gtest/gtest.h>

#include "trimscale/config_io.hpp"

namespace trimscale {
namespace {

// Brute-force normal equation over every mantissa pair, in long double.
struct BruteFit {
  long double ts = 0, ss = 0;
  int h, n_ref;
  std::vector<long double> t, s;

  BruteFit(int h_, int n_ref_) : h(h_), n_ref(n_ref_) {
    const int fb = n_ref - 1;
    const int g = 1 << fb;
    for (int x = 0; x < g; ++x) {
      for (int y = 0; y < g; ++y) {
        const long double X = std::ldexp(static_cast<long double>(x), -fb);
        const long double Y = std::ldexp(static_cast<long double>(y), -fb);
        const long double S = std::ldexp(static_cast<long double>((x >> (fb - h)) + (y >> (fb - h))), -h);
        const long double T = X + Y + X * Y;
        t.push_back(T);
        s.push_back(S);
        ts += T * S;
        ss += S * S;
      }
    }
  }
  long double alpha() const { return ts / ss; }
  long double sse_at(long double a) const {
    long double acc = 0;
    for (std::size_t i = 0; i < t.size(); ++i) acc += (t[i] - a * s[i]) * (t[i] - a * s[i]);
    return acc;
  }
};

TEST(FitAlpha, WorkedExampleNearPaperValue) {
  const auto fp = fit_alpha(3, 8);
  EXPECT_NEAR(static_cast<double>(fp.alpha), 1.407, 0.05);
  // Frozen from tests/oracle/oracle.py (exact rational least squares).
  EXPECT_NEAR(static_cast<double>(fp.alpha), 1.429472081801471, 1e-14);
}

TEST(FitAlpha, MatchesBruteForceOracle) {
  for (int h : {2, 3, 4, 5, 6}) {
    const BruteFit bf(h, 8);
    const auto fp = fit_alpha(h, 8);
    EXPECT_NEAR(static_cast<double>(fp.alpha), static_cast<double>(bf.alpha()), 1e-15) << "h=" << h;
    EXPECT_NEAR(static_cast<double>(fp.residual_mse), static_cast<double>(bf.sse_at(fp.alpha) / bf.t.size()),
                1e-12);
  }
  EXPECT_NEAR(static_cast<double>(fit_alpha(4, 8).alpha), 1.348692136390187, 1e-14);
}

TEST(FitAlpha, OtherGridResolutions) {
  for (int n_ref : {6, 10}) {
    const BruteFit bf(3, n_ref);
    EXPECT_NEAR(static_cast<double>(fit_alpha(3, n_ref).alpha), static_cast<double>(bf.alpha()), 1e-14);
  }
}

TEST(FitAlpha, LeastSquaresOptimality) {
  for (int h : {3, 4, 5}) {
    const BruteFit bf(h, 8);
    const auto a = fit_alpha(h, 8).alpha;
    const long double best = bf.sse_at(a);
    EXPECT_GE(bf.sse_at(a + 1e-6L), best);
    EXPECT_GE(bf.sse_at(a - 1e-6L), best);
  }
}

TEST(FitAlpha, IdentityOnExactRestrictedSet) {
  // Y = 0 and X on exact h-bit values: T = X = S, so the slope is 1.
  const int h = 3;
  long double ts = 0, ss = 0;
  for (int k = 0; k < (1 << h); ++k) {
    const long double x = std::ldexp(static_cast<long double>(k), -h);
    ts += x * x;
    ss += x * x;
  }
  EXPECT_EQ(ts / ss, 1.0L);
}

TEST(FitAlpha, RejectsBadWidths) {
  EXPECT_THROW(fit_alpha(8, 8), std::invalid_argument);
  EXPECT_THROW(fit_alpha(1, 8), std::invalid_argument);
  EXPECT_THROW(fit_alpha(3, 17), std::invalid_argument);
}

TEST(RoundToPow2, FloorRule) {
  auto with = [](long double a) {
    FitParams fp;
    fp.alpha = a;
    return round_to_pow2(fp).delta_ee;
  };
  EXPECT_EQ(with(1.407L), -2);
  EXPECT_EQ(with(1.5L), -1);
  EXPECT_EQ(with(1.26L), -2);
  EXPECT_EQ(with(1.25L), -2);
  EXPECT_EQ(with(1.1L), -4);
  EXPECT_THROW(with(1.0L), std::domain_error);
  EXPECT_THROW(with(2.0L), std::domain_error);
}

TEST(RoundToPow2, BracketHoldsForFittedConfigs) {
  for (int n_ref : {6, 8, 10}) {
    for (int h = 2; h < n_ref; ++h) {
      const auto fp = calibrate(h, n_ref);
      ASSERT_GT(fp.alpha, 1.0L);
      ASSERT_LT(fp.alpha, 2.0L);
      const long double frac = fp.alpha - 1;
      EXPECT_LE(std::ldexp(1.0L, fp.delta_ee), frac);
      EXPECT_LT(frac, std::ldexp(1.0L, fp.delta_ee + 1));
    }
  }
}

TEST(Calibrate, DeterministicSerialization) {
  const auto a = format_alpha(calibrate(4, 8).alpha);
  const auto b = format_alpha(calibrate(4, 8).alpha);
  EXPECT_EQ(a, b);
  EXPECT_EQ(static_cast<double>(parse_alpha(a)), static_cast<double>(calibrate(4, 8).alpha));
}

}  // namespace
}  // namespace trimscale
