#pragma once

#include <algorithm>
#include <cstdint>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "trimscale/calibrate.hpp"
#include "trimscale/compensate.hpp"
#include "trimscale/mantissa.hpp"

namespace trimscale {

/// One scaleTRIM(h, M) instance.
struct ScaleTrimConfig {
  int h = 3;
  int m = 0;
  int delta_ee = -2;
  int n_ref = 8;
  CompTable comp;
  FitParams fit;

  /// Fraction width of the accumulator: exact for S, 2^delta_ee * S and C_i.
  int frac_bits() const { return std::max(h - delta_ee, kLutFracBits); }

  void validate() const {
    if (h < 2) throw std::invalid_argument("h must be >= 2");
    if (delta_ee > 0) throw std::invalid_argument("delta_ee must be <= 0");
    check_segment_count(m, h);
    if (comp.m != m || static_cast<int>(comp.entries.size()) != m) {
      throw std::invalid_argument("compensation table does not have M entries");
    }
    if (m > 0 && comp.h != h) throw std::invalid_argument("compensation table built for a different h");
    for (auto c : comp.entries) {
      if (c <= -(1 << kLutFracBits) || c >= (1 << kLutFracBits)) {
        throw std::invalid_argument("compensation entry out of (-1, 1)");
      }
    }
  }

  friend bool operator==(const ScaleTrimConfig& a, const ScaleTrimConfig& b) {
    return a.h == b.h && a.m == b.m && a.delta_ee == b.delta_ee && a.n_ref == b.n_ref && a.comp == b.comp;
  }
};

/// Runs the offline pre-processing for scaleTRIM(h, m).
inline ScaleTrimConfig make_config(int h, int m, int n_ref = 8) {
  ScaleTrimConfig cfg;
  cfg.fit = calibrate(h, n_ref);
  cfg.h = h;
  cfg.m = m;
  cfg.n_ref = n_ref;
  cfg.delta_ee = cfg.fit.delta_ee;
  cfg.comp = build_table(cfg.fit, m);
  cfg.validate();
  return cfg;
}

/// Uncompensated configuration with an explicit exponent; no fit metadata.
inline ScaleTrimConfig make_config_fixed(int h, int delta_ee) {
  ScaleTrimConfig cfg;
  cfg.h = h;
  cfg.m = 0;
  cfg.delta_ee = delta_ee;
  cfg.comp.h = h;
  cfg.validate();
  return cfg;
}

/// Fixed-point value of 1 + S + 2^delta_ee*S + C_i at frac_bits fractional bits.
struct FixedAccumulator {
  std::int64_t raw = 0;
  int frac_bits = 0;
  bool clamped = false;
};

inline FixedAccumulator accumulate(std::uint64_t k, const ScaleTrimConfig& cfg) {
  FixedAccumulator acc;
  acc.frac_bits = cfg.frac_bits();
  const int f = acc.frac_bits;
  const auto sum = static_cast<std::int64_t>(k) << (f - cfg.h);
  acc.raw = (std::int64_t{1} << f) + sum + (sum >> -cfg.delta_ee);
  if (cfg.m > 0) {
    const auto c = cfg.comp.entries[segment_index(k, cfg.h, cfg.m)];
    acc.raw += static_cast<std::int64_t>(c) * (std::int64_t{1} << (f - kLutFracBits));
  }
  if (acc.raw < 0) {
    acc.raw = 0;
    acc.clamped = true;
  }
  return acc;
}

// Final barrel shift by n_a + n_b, dropping shifted-out bits.
constexpr std::uint64_t scale_out(std::uint64_t acc, int shift, int frac_bits) {
  return shift >= frac_bits ? acc << (shift - frac_bits) : acc >> (frac_bits - shift);
}

/// The step-by-step pipeline: LOD, mantissa extraction, truncation, h-bit
/// add, shift-add, LUT, final shift.
inline std::uint64_t mul_scaletrim(Operand a, Operand b, const ScaleTrimConfig& cfg) {
  if (a.width != b.width) throw std::invalid_argument("operand widths differ");
  if (cfg.h > a.width - 1) throw std::invalid_argument("h exceeds operand mantissa width");
  const auto na = normalize(a);
  const auto nb = normalize(b);
  if (na.is_zero || nb.is_zero) return 0;
  const auto xa = truncate(na, cfg.h);
  const auto xb = truncate(nb, cfg.h);
  const std::uint64_t k = xa.bits + xb.bits;
  const auto acc = accumulate(k, cfg);
  return scale_out(static_cast<std::uint64_t>(acc.raw), na.lod + nb.lod, acc.frac_bits);
}

/// 2^(n_a + n_b).
inline std::uint64_t mul_pow2_trunc(Operand a, Operand b) {
  if (a.value == 0 || b.value == 0) return 0;
  return std::uint64_t{1} << (leading_one(a.value) + leading_one(b.value));
}

inline std::uint64_t mul_exact(Operand a, Operand b) { return a.value * b.value; }

/// Sign-magnitude wrapper around an unsigned multiplier callable
/// (uint64_t, uint64_t) -> uint64_t.
template <typename Mul>
std::int64_t mul_signed(std::int64_t a, std::int64_t b, int width, const Mul& mul) {
  if (a == std::numeric_limits<std::int64_t>::min() || b == std::numeric_limits<std::int64_t>::min()) {
    throw std::overflow_error("magnitude of the most negative value is not representable");
  }
  const auto ma = static_cast<std::uint64_t>(a < 0 ? -a : a);
  const auto mb = static_cast<std::uint64_t>(b < 0 ? -b : b);
  if ((ma >> width) || (mb >> width)) {
    throw std::out_of_range("signed operand magnitude exceeds " + std::to_string(width) + " bits");
  }
  const auto p = static_cast<std::int64_t>(mul(ma, mb));
  return ((a < 0) != (b < 0)) ? -p : p;
}

inline std::int64_t mul_signed(std::int64_t a, std::int64_t b, int width, const ScaleTrimConfig& cfg) {
  return mul_signed(a, b, width, [&](std::uint64_t x, std::uint64_t y) {
    return mul_scaletrim(Operand{x, width}, Operand{y, width}, cfg);
  });
}

/// Sweep-speed scaleTRIM: the accumulator depends only on the (h+1)-bit sum,
/// so all 2^(h+1) values are precomputed. Bit-identical to mul_scaletrim.
class ScaleTrim {
 public:
  ScaleTrim(ScaleTrimConfig cfg, int width) : cfg_(std::move(cfg)), width_(width) {
    cfg_.validate();
    if (width < kMinWidth || width > kMaxWidth) throw std::invalid_argument("unsupported width");
    if (cfg_.h > width - 1) throw std::invalid_argument("h exceeds operand mantissa width");
    frac_ = cfg_.frac_bits();
    acc_.resize(std::size_t{1} << (cfg_.h + 1));
    for (std::uint64_t k = 0; k < acc_.size(); ++k) {
      const auto a = accumulate(k, cfg_);
      acc_[k] = static_cast<std::uint64_t>(a.raw);
      clamps_ += a.clamped;
    }
  }

  std::uint64_t operator()(std::uint64_t a, std::uint64_t b) const {
    if (a == 0 || b == 0) return 0;
    const int la = leading_one(a);
    const int lb = leading_one(b);
    const int drop_a = la - cfg_.h;
    const int drop_b = lb - cfg_.h;
    const std::uint64_t ka = drop_a >= 0 ? (a >> drop_a) & mask() : (a << -drop_a) & mask();
    const std::uint64_t kb = drop_b >= 0 ? (b >> drop_b) & mask() : (b << -drop_b) & mask();
    return scale_out(acc_[ka + kb], la + lb, frac_);
  }

  const ScaleTrimConfig& config() const { return cfg_; }
  int width() const { return width_; }
  /// Number of sums whose accumulator hit the non-negative clamp.
  int clamp_count() const { return clamps_; }

 private:
  std::uint64_t mask() const { return (std::uint64_t{1} << cfg_.h) - 1; }

  ScaleTrimConfig cfg_;
  int width_;
  int frac_ = 0;
  int clamps_ = 0;
  std::vector<std::uint64_t> acc_;
};

}  // namespace trimscale
