#pragma once

// Unit-cost proxy for scaleTRIM hardware. The numbers are NOT synthesis
// results; they only order configurations by relative size and speed so
// that accuracy/cost trade-offs can be explored. Area and delay are in
// abstract units, energy_units = area * delay.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "trimscale/compensate.hpp"
#include "trimscale/datapath.hpp"
#include "trimscale/metrics.hpp"

namespace trimscale {

/// Every constant the model uses.
struct UnitCosts {
  double fa_area = 1.0;     // full adder, per bit
  double fa_delay = 1.0;    // ripple carry, per bit
  double mux2_area = 0.5;   // 2:1 mux, per bit per stage
  double mux2_delay = 0.5;  // per stage
  double lod_area = 0.75;   // priority encoder, per input bit
  double lod_delay = 0.5;   // per tree level
  double lut_bit_area = 0.25;  // hardwired constant bit
};

inline constexpr UnitCosts kDefaultUnits{};

enum class Block { Lod, MantissaShifters, SumAdder, ShiftAdd, MuxLut, FinalShifter };
inline constexpr std::array<std::string_view, 6> kBlockNames = {"lod", "mantissa_shifters", "sum_adder",
                                                               "shift_add", "mux_lut", "final_shifter"};

struct BlockCost {
  double area = 0;
  double delay = 0;
};

struct CostEstimate {
  std::array<BlockCost, 6> blocks{};
  double area_units = 0;
  double delay_units = 0;
  double energy_units = 0;

  const BlockCost& operator[](Block b) const { return blocks[static_cast<int>(b)]; }
};

namespace detail {
inline double ceil_log2(int v) { return v <= 1 ? 0.0 : std::ceil(std::log2(static_cast<double>(v))); }
}  // namespace detail

/// Delay is the critical path: LOD, extraction shift, h-bit add, shift-add,
/// compensation add, final shift. The LUT mux runs in parallel with the
/// shift-add and contributes only the part of its delay that is not hidden.
inline CostEstimate estimate(const ScaleTrimConfig& cfg, int width, const UnitCosts& u = kDefaultUnits) {
  if (cfg.h > width - 1) throw std::invalid_argument("h exceeds operand mantissa width");
  const int h = cfg.h;
  const int e = -cfg.delta_ee;
  const int f = cfg.frac_bits();
  const double stages_in = detail::ceil_log2(width);
  const double stages_out = detail::ceil_log2(2 * width - 1);

  CostEstimate c;
  auto& lod = c.blocks[static_cast<int>(Block::Lod)];
  lod.area = 2 * width * u.lod_area;
  lod.delay = stages_in * u.lod_delay;

  auto& shifters = c.blocks[static_cast<int>(Block::MantissaShifters)];
  shifters.area = 2 * h * stages_in * u.mux2_area;
  shifters.delay = stages_in * u.mux2_delay;

  auto& sum = c.blocks[static_cast<int>(Block::SumAdder)];
  sum.area = h * u.fa_area;
  sum.delay = h * u.fa_delay;

  auto& shift_add = c.blocks[static_cast<int>(Block::ShiftAdd)];
  shift_add.area = (h + 1 + e) * u.fa_area;
  shift_add.delay = (h + 1 + e) * u.fa_delay;

  auto& mux = c.blocks[static_cast<int>(Block::MuxLut)];
  if (cfg.m > 0) {
    const double mux_delay = detail::ceil_log2(cfg.m) * u.mux2_delay;
    mux.area = (cfg.m - 1) * kLutEntryBits * u.mux2_area + cfg.m * kLutEntryBits * u.lut_bit_area +
               (f + 2) * u.fa_area;
    mux.delay = std::max(0.0, mux_delay - shift_add.delay) + (f + 2) * u.fa_delay;
  }

  auto& out = c.blocks[static_cast<int>(Block::FinalShifter)];
  out.area = 2 * width * stages_out * u.mux2_area;
  out.delay = stages_out * u.mux2_delay;

  for (const auto& b : c.blocks) {
    c.area_units += b.area;
    c.delay_units += b.delay;
  }
  c.energy_units = c.area_units * c.delay_units;
  return c;
}

struct DesignPoint {
  std::string label;
  ScaleTrimConfig cfg;
  CostEstimate cost;
  ErrorReport error;
};

/// a dominates b: no worse in MARED and energy, strictly better in one.
inline bool dominates(const DesignPoint& a, const DesignPoint& b) {
  const double ea = a.cost.energy_units, eb = b.cost.energy_units;
  return a.error.mared <= b.error.mared && ea <= eb && (a.error.mared < b.error.mared || ea < eb);
}

/// Indices of the non-dominated points, ordered by energy then MARED
/// (ties keep input order).
inline std::vector<std::size_t> pareto(const std::vector<DesignPoint>& points) {
  if (points.empty()) throw std::invalid_argument("pareto front of an empty set");
  std::vector<std::size_t> order(points.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) {
    const auto &px = points[x], &py = points[y];
    if (px.cost.energy_units != py.cost.energy_units) return px.cost.energy_units < py.cost.energy_units;
    return px.error.mared < py.error.mared;
  });
  // In this order no point can be dominated by a later one, and domination
  // is transitive, so checking against the kept points suffices.
  std::vector<std::size_t> front;
  for (std::size_t i : order) {
    const auto& p = points[i];
    if (front.empty()) {
      front.push_back(i);
      continue;
    }
    bool dominated = false;
    for (std::size_t j : front) {
      if (dominates(points[j], p)) {
        dominated = true;
        break;
      }
    }
    if (!dominated) front.push_back(i);
  }
  return front;
}

}  // namespace trimscale
