#pragma once

// Offline linearization: least-squares slope alpha for
//   X + Y + X*Y  ~  alpha * (X_h + Y_h)
// over the exhaustive grid of mantissa pairs at n_ref-1 fractional bits,
// then the power-of-two exponent delta_ee with 2^delta_ee <= alpha - 1.

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace trimscale {

using u128 = unsigned __int128;

struct FitParams {
  long double alpha = 0.0L;
  int delta_ee = 0;
  int h = 0;
  int n_ref = 8;
  long double residual_mse = 0.0L;
};

namespace detail {

// Power sums over the one-dimensional mantissa grid x in [0, G), with
// k(x) = x >> (G_bits - h) the truncated mantissa.
struct GridSums {
  u128 g = 0;    // G
  u128 sx = 0;   // sum x
  u128 sx2 = 0;  // sum x^2
  u128 sk = 0;   // sum k
  u128 sk2 = 0;  // sum k^2
  u128 sxk = 0;  // sum x*k
};

inline GridSums grid_sums(int h, int n_ref) {
  const int fb = n_ref - 1;
  GridSums s;
  s.g = u128{1} << fb;
  for (std::uint64_t x = 0; x < (std::uint64_t{1} << fb); ++x) {
    const u128 k = x >> (fb - h);
    s.sx += x;
    s.sx2 += u128{x} * x;
    s.sk += k;
    s.sk2 += k * k;
    s.sxk += u128{x} * k;
  }
  return s;
}

inline long double to_ld(u128 v) {
  const auto hi = static_cast<std::uint64_t>(v >> 64);
  const auto lo = static_cast<std::uint64_t>(v);
  return std::ldexp(static_cast<long double>(hi), 64) + static_cast<long double>(lo);
}

}  // namespace detail

inline void check_fit_widths(int h, int n_ref) {
  if (n_ref < 3 || n_ref > 16) {
    throw std::invalid_argument("n_ref must be in [3, 16], got " + std::to_string(n_ref));
  }
  if (h < 2 || h > n_ref - 1) {
    throw std::invalid_argument("h=" + std::to_string(h) + " must satisfy 2 <= h <= n_ref-1 (n_ref=" +
                                std::to_string(n_ref) + ")");
  }
}

/// Fits alpha without intercept. With integer grid coordinates x, y and
/// G = 2^(n_ref-1), T*G^2 = G(x+y) + xy and S*2^h = kx + ky, so both normal
/// equation sums are exact integers that separate into 1-D power sums.
inline FitParams fit_alpha(int h, int n_ref = 8) {
  check_fit_widths(h, n_ref);
  const auto s = detail::grid_sums(h, n_ref);
  const u128 G = s.g;

  // sum (G(x+y) + xy)(kx + ky)
  const u128 ts = G * (2 * G * s.sxk + 2 * s.sx * s.sk) + 2 * s.sxk * s.sx;
  // sum (kx + ky)^2
  const u128 ss = 2 * G * s.sk2 + 2 * s.sk * s.sk;
  // sum (G(x+y) + xy)^2
  const u128 tt = G * G * (2 * G * s.sx2 + 2 * s.sx * s.sx) + 4 * G * s.sx2 * s.sx + s.sx2 * s.sx2;

  const long double scale_t = std::ldexp(1.0L, -2 * (n_ref - 1));  // 1/G^2
  const long double scale_s = std::ldexp(1.0L, -h);
  const long double sum_ts = detail::to_ld(ts) * scale_t * scale_s;
  const long double sum_ss = detail::to_ld(ss) * scale_s * scale_s;
  const long double sum_tt = detail::to_ld(tt) * scale_t * scale_t;

  FitParams fp;
  fp.h = h;
  fp.n_ref = n_ref;
  fp.alpha = sum_ts / sum_ss;
  const long double pairs = detail::to_ld(G * G);
  fp.residual_mse = (sum_tt - 2 * fp.alpha * sum_ts + fp.alpha * fp.alpha * sum_ss) / pairs;
  return fp;
}

/// delta_ee = floor(log2(alpha - 1)).
inline FitParams round_to_pow2(FitParams fp) {
  if (!(fp.alpha > 1.0L && fp.alpha < 2.0L)) {
    throw std::domain_error("alpha must lie in (1, 2)");
  }
  const long double frac = fp.alpha - 1.0L;
  int e = 0;
  while (std::ldexp(1.0L, e) > frac) --e;
  fp.delta_ee = e;
  return fp;
}

inline FitParams calibrate(int h, int n_ref = 8) { return round_to_pow2(fit_alpha(h, n_ref)); }

}  // namespace trimscale
