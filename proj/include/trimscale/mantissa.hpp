#pragma once

#include <bit>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace trimscale {

inline constexpr int kMinWidth = 4;
inline constexpr int kMaxWidth = 32;

/// Unsigned N-bit operand.
struct Operand {
  std::uint64_t value = 0;
  int width = 8;

  constexpr Operand() = default;
  constexpr Operand(std::uint64_t v, int w) : value(v), width(w) {
    if (w < kMinWidth || w > kMaxWidth) {
      throw std::invalid_argument("operand width must be in [4, 32], got " + std::to_string(w));
    }
    if (v >> w) {
      throw std::out_of_range("operand " + std::to_string(v) + " does not fit in " +
                              std::to_string(w) + " bits");
    }
  }
};

/// An operand factored as 2^lod * (1 + X), with X = mantissa / 2^(width-1).
struct NormalizedOperand {
  int lod = 0;
  std::uint64_t mantissa = 0;
  int width = 8;
  bool is_zero = true;

  constexpr int frac_bits() const { return width - 1; }
  friend constexpr bool operator==(const NormalizedOperand&, const NormalizedOperand&) = default;
};

/// Top h fractional bits of a mantissa, X_h = bits / 2^h.
struct TruncatedMantissa {
  std::uint64_t bits = 0;
  int h = 0;
  friend constexpr bool operator==(const TruncatedMantissa&, const TruncatedMantissa&) = default;
};

// Index of the most significant set bit. The hardware block is a priority
// encoder, which is what bit_width compiles down to.
constexpr int leading_one(std::uint64_t v) { return static_cast<int>(std::bit_width(v)) - 1; }

constexpr NormalizedOperand normalize(Operand op) {
  NormalizedOperand nm;
  nm.width = op.width;
  if (op.value == 0) return nm;
  nm.is_zero = false;
  nm.lod = leading_one(op.value);
  const std::uint64_t rest = op.value ^ (std::uint64_t{1} << nm.lod);
  nm.mantissa = rest << (op.width - 1 - nm.lod);
  return nm;
}

constexpr TruncatedMantissa truncate(const NormalizedOperand& nm, int h) {
  if (h < 1 || h > nm.frac_bits()) {
    throw std::invalid_argument("truncation width h=" + std::to_string(h) +
                                " must be in [1, N-1] for N=" + std::to_string(nm.width));
  }
  return {nm.mantissa >> (nm.frac_bits() - h), h};
}

constexpr Operand reconstruct(const NormalizedOperand& nm) {
  if (nm.is_zero) return Operand{0, nm.width};
  const std::uint64_t rest = nm.mantissa >> (nm.frac_bits() - nm.lod);
  return Operand{(std::uint64_t{1} << nm.lod) | rest, nm.width};
}

}  // namespace trimscale
