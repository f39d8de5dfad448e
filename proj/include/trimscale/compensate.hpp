#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <stdexcept>
#include <string>
#include <vector>

#include "trimscale/calibrate.hpp"

namespace trimscale {

/// Fractional bits of each compensation constant.
inline constexpr int kLutFracBits = 8;
/// Hardwired entry width: sign + one integer bit + fraction.
inline constexpr int kLutEntryBits = kLutFracBits + 2;

struct CompTable {
  int h = 0;
  int m = 0;
  std::vector<std::int32_t> entries;  // C_i = entries[i] / 2^8

  bool enabled() const { return m > 0; }
  friend bool operator==(const CompTable&, const CompTable&) = default;
};

struct SegmentError {
  int segment = 0;
  long double mean_err = 0.0L;
  std::uint64_t count = 0;
};

inline void check_segment_count(int m, int h) {
  if (m == 0) return;
  if (m < 0 || !std::has_single_bit(static_cast<unsigned>(m))) {
    throw std::invalid_argument("segment count M=" + std::to_string(m) + " must be 0 or a power of two");
  }
  if (m < 4 || m > (1 << (h + 1))) {
    throw std::invalid_argument("segment count M=" + std::to_string(m) + " must be in [4, 2^(h+1)] for h=" +
                                std::to_string(h));
  }
}

/// Equal-width partition of S = k/2^h in [0, 2): the top log2(m) bits of the
/// (h+1)-bit sum select the mux input.
constexpr int segment_index(std::uint64_t k, int h, int m) {
  if (m <= 0 || !std::has_single_bit(static_cast<unsigned>(m))) {
    throw std::invalid_argument("segment count must be a power of two");
  }
  const int sel = std::countr_zero(static_cast<unsigned>(m));
  if (sel > h + 1) throw std::invalid_argument("segment count exceeds 2^(h+1)");
  if (k >> (h + 1)) throw std::out_of_range("sum exceeds h+1 bits");
  return static_cast<int>(k >> (h + 1 - sel));
}

namespace detail {

inline std::int32_t round_half_away(__int128 num, __int128 den) {
  // den > 0
  const bool neg = num < 0;
  const __int128 a = neg ? -num : num;
  const __int128 q = (2 * a + den) / (2 * den);
  return static_cast<std::int32_t>(neg ? -q : q);
}

// Per-segment exact sums of D * Q with Q = G^2 * 2^(h+e), e = -delta_ee:
//   D*Q = (G(x+y) + xy) * 2^(h+e) - (kx+ky) * (2^e + 1) * G^2.
// Pairs are grouped by (kx, ky); within a group x runs over a contiguous
// block of 2^(fb-h) values, so only block counts and sums are needed.
struct SegmentSums {
  std::vector<__int128> num;
  std::vector<std::uint64_t> count;
  __int128 q = 0;
};

inline SegmentSums segment_sums(int h, int delta_ee, int m, int n_ref) {
  const int fb = n_ref - 1;
  const int e = -delta_ee;
  const __int128 G = __int128{1} << fb;
  const __int128 block = __int128{1} << (fb - h);
  const int nk = 1 << h;

  SegmentSums out;
  out.num.assign(m, 0);
  out.count.assign(m, 0);
  out.q = G * G * (__int128{1} << (h + e));

  std::vector<__int128> bsum(nk);
  for (int k = 0; k < nk; ++k) {
    const __int128 lo = k * block;
    bsum[k] = block * lo + block * (block - 1) / 2;
  }
  const __int128 p2 = __int128{1} << (h + e);
  const __int128 lin = ((__int128{1} << e) + 1) * G * G;
  for (int ka = 0; ka < nk; ++ka) {
    for (int kb = 0; kb < nk; ++kb) {
      const int k = ka + kb;
      const int seg = segment_index(static_cast<std::uint64_t>(k), h, m);
      const __int128 t = G * (block * bsum[ka] + block * bsum[kb]) + bsum[ka] * bsum[kb];
      out.num[seg] += t * p2 - block * block * k * lin;
      out.count[seg] += static_cast<std::uint64_t>(block * block);
    }
  }
  return out;
}

}  // namespace detail

/// Mean normalized error per segment, at long double precision.
inline std::vector<SegmentError> segment_errors(const FitParams& fp, int m) {
  check_fit_widths(fp.h, fp.n_ref);
  check_segment_count(m, fp.h);
  std::vector<SegmentError> out;
  if (m == 0) return out;
  const auto sums = detail::segment_sums(fp.h, fp.delta_ee, m, fp.n_ref);
  for (int i = 0; i < m; ++i) {
    SegmentError se;
    se.segment = i;
    se.count = sums.count[i];
    if (se.count) {
      se.mean_err = static_cast<long double>(sums.num[i]) /
                    (static_cast<long double>(sums.q) * static_cast<long double>(se.count));
    }
    out.push_back(se);
  }
  return out;
}

/// Per-segment means of D = (X + Y + XY) - (1 + 2^delta_ee) * S, quantized to
/// 8 fractional bits with round-half-away-from-zero. Rounding is done on the
/// exact rational mean.
inline CompTable build_table(const FitParams& fp, int m) {
  check_fit_widths(fp.h, fp.n_ref);
  check_segment_count(m, fp.h);
  if (fp.delta_ee > 0) throw std::invalid_argument("delta_ee must be <= 0");
  CompTable tbl;
  tbl.h = fp.h;
  tbl.m = m;
  if (m == 0) return tbl;
  const auto sums = detail::segment_sums(fp.h, fp.delta_ee, m, fp.n_ref);
  for (int i = 0; i < m; ++i) {
    if (sums.count[i] == 0) {
      tbl.entries.push_back(0);
      continue;
    }
    const __int128 den = sums.q * static_cast<__int128>(sums.count[i]);
    tbl.entries.push_back(detail::round_half_away(sums.num[i] * (1 << kLutFracBits), den));
  }
  return tbl;
}

/// Two's-complement hex literal of one entry in a 10-bit field.
inline std::string entry_hex(std::int32_t c) {
  const std::uint32_t mask = (1u << kLutEntryBits) - 1;
  if (c >= (1 << (kLutEntryBits - 1)) || c < -(1 << (kLutEntryBits - 1))) {
    throw std::out_of_range("compensation entry " + std::to_string(c) + " does not fit in 10 bits");
  }
  char buf[16];
  std::snprintf(buf, sizeof buf, "0x%03X", static_cast<std::uint32_t>(c) & mask);
  return buf;
}

inline std::vector<std::string> export_hex(const CompTable& tbl) {
  std::vector<std::string> out;
  out.reserve(tbl.entries.size());
  for (auto c : tbl.entries) out.push_back(entry_hex(c));
  return out;
}

/// Inverse of entry_hex; accepts an optional 0x prefix.
inline std::int32_t parse_entry_hex(const std::string& s) {
  std::size_t pos = 0;
  const unsigned long raw = std::stoul(s, &pos, 16);
  if (pos != s.size() || raw >> kLutEntryBits) {
    throw std::invalid_argument("bad LUT literal '" + s + "'");
  }
  auto v = static_cast<std::int32_t>(raw);
  if (v & (1 << (kLutEntryBits - 1))) v -= (1 << kLutEntryBits);
  return v;
}

}  // namespace trimscale
