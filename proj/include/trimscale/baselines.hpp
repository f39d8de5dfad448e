#pragma once

// Comparison multipliers, all with the same callable shape as ScaleTrim:
//   std::uint64_t operator()(std::uint64_t a, std::uint64_t b) const
// for operands below 2^width.

#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

#include "trimscale/datapath.hpp"
#include "trimscale/mantissa.hpp"

namespace trimscale {

namespace detail {

inline void check_width(int width) {
  if (width < kMinWidth || width > kMaxWidth) {
    throw std::invalid_argument("unsupported operand width " + std::to_string(width));
  }
}

// Top `bits` bits just below the leading one, zero-filled when the operand
// has fewer than `bits` bits under its leading one.
constexpr std::uint64_t bits_below_lod(std::uint64_t v, int lod, int bits) {
  if (bits == 0) return 0;
  const std::uint64_t mask = (std::uint64_t{1} << bits) - 1;
  const int drop = lod - bits;
  return drop >= 0 ? (v >> drop) & mask : (v << -drop) & mask;
}

}  // namespace detail

struct Exact {
  int bits = 8;
  int width() const { return bits; }
  std::uint64_t operator()(std::uint64_t a, std::uint64_t b) const { return a * b; }
};

/// Truncate-to-power-of-two reference: 2^(n_a + n_b).
struct Pow2 {
  int bits = 8;
  int width() const { return bits; }
  std::uint64_t operator()(std::uint64_t a, std::uint64_t b) const {
    if (a == 0 || b == 0) return 0;
    return std::uint64_t{1} << (leading_one(a) + leading_one(b));
  }
};

/// DRUM(m): m bits from the leading one down, LSB of the captured segment
/// forced to 1 when bits were dropped. Operands below 2^m pass unchanged.
class Drum {
 public:
  Drum(int m, int width) : m_(m), width_(width) {
    detail::check_width(width);
    if (m < 3 || m > width) throw std::invalid_argument("DRUM segment width must be in [3, N]");
  }

  std::uint64_t operator()(std::uint64_t a, std::uint64_t b) const {
    if (a == 0 || b == 0) return 0;
    int sa = 0, sb = 0;
    const std::uint64_t ca = capture(a, sa);
    const std::uint64_t cb = capture(b, sb);
    return (ca * cb) << (sa + sb);
  }

  int m() const { return m_; }
  int width() const { return width_; }

 private:
  std::uint64_t capture(std::uint64_t v, int& shift) const {
    const int lod = leading_one(v);
    if (lod < m_) {
      shift = 0;
      return v;
    }
    shift = lod - m_ + 1;
    return (v >> shift) | 1u;
  }

  int m_;
  int width_;
};

/// DSM(m): the m-bit segment starts at one of a few fixed positions
/// {0, m, 2m, ...} plus N-m for the top segment; the lowest position whose
/// segment still holds the leading one is used. The segment is truncated,
/// not rounded.
class Dsm {
 public:
  Dsm(int m, int width) : m_(m), width_(width) {
    detail::check_width(width);
    if (m < 3 || m > width) throw std::invalid_argument("DSM segment width must be in [3, N]");
    for (int p = 0; p + m <= width; p += m) starts_.push_back(p);
    if (starts_.back() != width - m) starts_.push_back(width - m);
  }

  /// Segment start chosen for an operand with the given leading-one index.
  int segment_start(int lod) const {
    for (int p : starts_) {
      if (lod < p + m_) return p;
    }
    return starts_.back();
  }

  std::uint64_t operator()(std::uint64_t a, std::uint64_t b) const {
    if (a == 0 || b == 0) return 0;
    const int pa = segment_start(leading_one(a));
    const int pb = segment_start(leading_one(b));
    const std::uint64_t mask = (std::uint64_t{1} << m_) - 1;
    return (((a >> pa) & mask) * ((b >> pb) & mask)) << (pa + pb);
  }

  const std::vector<int>& starts() const { return starts_; }
  int m() const { return m_; }
  int width() const { return width_; }

 private:
  int m_;
  int width_;
  std::vector<int> starts_;
};

/// TOSAM(t, h):
///   2^(n_a+n_b) * (1 + X_h' + Y_h' + X_t' * Y_t')
/// where X_h' is the top h mantissa bits with a '1' appended at weight
/// 2^-(h+1), feeding the adder, and X_t' the top t bits with a '1' appended
/// at 2^-(t+1), feeding the small (t+1)x(t+1) multiplier. The sum is held
/// at F = max(h+1, 2t+2) fractional bits and floored by the final shift.
class Tosam {
 public:
  Tosam(int t, int h, int width) : t_(t), h_(h), width_(width) {
    detail::check_width(width);
    if (t < 0 || t > 2) throw std::invalid_argument("TOSAM t must be in {0, 1, 2}");
    if (h < 3 || h > width - 1) throw std::invalid_argument("TOSAM h must be in [3, N-1]");
    if (t >= h) throw std::invalid_argument("TOSAM requires t < h");
    frac_ = std::max(h + 1, 2 * t + 2);
  }

  std::uint64_t operator()(std::uint64_t a, std::uint64_t b) const {
    if (a == 0 || b == 0) return 0;
    const int la = leading_one(a);
    const int lb = leading_one(b);
    const std::uint64_t ha = (detail::bits_below_lod(a, la, h_) << 1) | 1u;
    const std::uint64_t hb = (detail::bits_below_lod(b, lb, h_) << 1) | 1u;
    const std::uint64_t ta = (detail::bits_below_lod(a, la, t_) << 1) | 1u;
    const std::uint64_t tb = (detail::bits_below_lod(b, lb, t_) << 1) | 1u;
    const std::uint64_t acc = (std::uint64_t{1} << frac_) + ((ha + hb) << (frac_ - h_ - 1)) +
                              ((ta * tb) << (frac_ - 2 * t_ - 2));
    return scale_out(acc, la + lb, frac_);
  }

  int t() const { return t_; }
  int h() const { return h_; }
  int width() const { return width_; }

 private:
  int t_;
  int h_;
  int width_;
  int frac_ = 0;
};

}  // namespace trimscale
