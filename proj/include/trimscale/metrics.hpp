#pragma once

// Relative-error statistics over operand sweeps:
//   RE = (approx - exact) / exact,  ARE = |RE|,  pairs with exact == 0 skipped.
//
// Work is cut into fixed chunks (one operand row for exhaustive sweeps, a
// fixed block of draws for sampled sweeps). Each chunk is reduced with a
// two-pass mean/variance and chunks are merged in index order, so the report
// does not depend on how many workers ran.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <random>
#include <stdexcept>
#include <string>
#include <string_view>
#include <thread>
#include <variant>
#include <vector>

#include "trimscale/datapath.hpp"
#include "trimscale/design.hpp"

namespace trimscale {

inline constexpr std::string_view kPrngId = "mt19937_64";
inline constexpr std::uint64_t kSampledChunk = 4096;
inline constexpr std::uint64_t kDefaultSamples = 100000;

struct Exhaustive {};
struct Sampled {
  std::uint64_t count = kDefaultSamples;
  std::uint64_t seed = 42;
};
using SweepMode = std::variant<Exhaustive, Sampled>;

struct SweepSpec {
  int width = 8;
  SweepMode mode = Exhaustive{};
  bool include_signed = false;
  /// Exhaustive sweeps above 16 bits need an explicit opt-in.
  bool allow_huge = false;
  int jobs = 1;
};

struct ErrorReport {
  std::string design;
  int width = 8;
  std::string mode;
  std::uint64_t seed = 0;
  std::string prng;
  bool include_signed = false;

  double mared = 0;
  double stdared = 0;
  double mred = 0;
  double stdred = 0;
  double max_ared = 0;
  std::uint64_t pairs_total = 0;
  std::uint64_t pairs_excluded_zero = 0;
  int accumulator_clamps = 0;

  std::uint64_t pairs_used() const { return pairs_total - pairs_excluded_zero; }
  /// Standard error of MARED in percentage points.
  double mared_stderr() const {
    return pairs_used() ? stdared / std::sqrt(static_cast<double>(pairs_used())) : 0.0;
  }
};

/// Count, mean and sum of squared deviations; merged with Chan's formula.
struct Moments {
  std::uint64_t n = 0;
  double mean = 0;
  double m2 = 0;

  void merge(const Moments& o) {
    if (o.n == 0) return;
    if (n == 0) {
      *this = o;
      return;
    }
    const double total = static_cast<double>(n + o.n);
    const double delta = o.mean - mean;
    mean += delta * static_cast<double>(o.n) / total;
    m2 += o.m2 + delta * delta * static_cast<double>(n) * static_cast<double>(o.n) / total;
    n += o.n;
  }

  double variance() const { return n ? m2 / static_cast<double>(n) : 0.0; }
};

struct ChunkStats {
  Moments re;
  Moments are;
  double max_are = 0;
  std::uint64_t total = 0;
  std::uint64_t zero = 0;

  void merge(const ChunkStats& o) {
    re.merge(o.re);
    are.merge(o.are);
    max_are = std::max(max_are, o.max_are);
    total += o.total;
    zero += o.zero;
  }
};

namespace detail {

// Buffers the relative errors of one chunk and reduces them in two passes.
class ChunkReducer {
 public:
  void reset() {
    res_.clear();
    total_ = 0;
    zero_ = 0;
  }

  void add(std::int64_t approx, std::int64_t exact) {
    ++total_;
    if (exact == 0) {
      ++zero_;
      return;
    }
    res_.push_back(static_cast<double>(approx - exact) / static_cast<double>(exact));
  }

  // Unsigned overload: differences of products up to 2^64 need care.
  void add_unsigned(std::uint64_t approx, std::uint64_t exact) {
    ++total_;
    if (exact == 0) {
      ++zero_;
      return;
    }
    const double diff = approx >= exact ? static_cast<double>(approx - exact)
                                        : -static_cast<double>(exact - approx);
    res_.push_back(diff / static_cast<double>(exact));
  }

  ChunkStats finish() const {
    ChunkStats s;
    s.total = total_;
    s.zero = zero_;
    const auto n = res_.size();
    if (n == 0) return s;
    double sum_re = 0, sum_are = 0;
    for (double r : res_) {
      sum_re += r;
      sum_are += std::abs(r);
      s.max_are = std::max(s.max_are, std::abs(r));
    }
    s.re.n = s.are.n = n;
    s.re.mean = sum_re / static_cast<double>(n);
    s.are.mean = sum_are / static_cast<double>(n);
    for (double r : res_) {
      const double dr = r - s.re.mean;
      const double da = std::abs(r) - s.are.mean;
      s.re.m2 += dr * dr;
      s.are.m2 += da * da;
    }
    return s;
  }

 private:
  std::vector<double> res_;
  std::uint64_t total_ = 0;
  std::uint64_t zero_ = 0;
};

template <typename Fn>
void parallel_chunks(std::uint64_t chunks, int jobs, Fn&& fn) {
  jobs = std::max(1, jobs);
  std::atomic<std::uint64_t> next{0};
  auto worker = [&] {
    ChunkReducer red;
    for (std::uint64_t c = next++; c < chunks; c = next++) fn(c, red);
  };
  if (jobs == 1) {
    worker();
    return;
  }
  std::vector<std::jthread> pool;
  for (int j = 0; j < jobs; ++j) pool.emplace_back(worker);
}

inline std::string mode_name(const SweepMode& mode) {
  if (const auto* s = std::get_if<Sampled>(&mode)) {
    return "sampled:" + std::to_string(s->count) + ":seed" + std::to_string(s->seed);
  }
  return "exhaustive";
}

inline ErrorReport to_report(const ChunkStats& all, const SweepSpec& spec, std::string design) {
  ErrorReport r;
  r.design = std::move(design);
  r.width = spec.width;
  r.mode = mode_name(spec.mode);
  r.include_signed = spec.include_signed;
  if (const auto* s = std::get_if<Sampled>(&spec.mode)) {
    r.seed = s->seed;
    r.prng = std::string(kPrngId);
  }
  r.mared = 100.0 * all.are.mean;
  r.stdared = 100.0 * std::sqrt(all.are.variance());
  r.mred = 100.0 * all.re.mean;
  r.stdred = 100.0 * std::sqrt(all.re.variance());
  r.max_ared = 100.0 * all.max_are;
  r.pairs_total = all.total;
  r.pairs_excluded_zero = all.zero;
  return r;
}

}  // namespace detail

/// Draws operand pairs: two consecutive mt19937_64 outputs, each reduced to
/// its top `width` bits (top width+1 bits with a sign bit for signed sweeps).
class PairSampler {
 public:
  PairSampler(std::uint64_t seed, int width, bool is_signed)
      : rng_(seed), width_(width), signed_(is_signed) {}

  std::int64_t next() {
    const std::uint64_t r = rng_();
    if (!signed_) return static_cast<std::int64_t>(r >> (64 - width_));
    const auto mag = static_cast<std::int64_t>((r >> (63 - width_)) & ((std::uint64_t{1} << width_) - 1));
    return (r >> 63) ? -mag : mag;
  }

 private:
  std::mt19937_64 rng_;
  int width_;
  bool signed_;
};

/// Sweep of a concrete multiplier callable.
template <typename Mul>
ErrorReport sweep(const Mul& mul, const SweepSpec& spec, std::string design_name) {
  const int n = spec.width;
  if (n < kMinWidth || n > kMaxWidth) throw std::invalid_argument("unsupported sweep width");
  if (mul.width() != n) {
    throw std::invalid_argument("design width differs from sweep width");
  }

  std::vector<ChunkStats> chunks;
  auto eval = [&](std::int64_t a, std::int64_t b, detail::ChunkReducer& red) {
    if (spec.include_signed) {
      auto p = mul_signed(a, b, n, mul);
      red.add(p, a * b);
    } else {
      const auto ua = static_cast<std::uint64_t>(a);
      const auto ub = static_cast<std::uint64_t>(b);
      red.add_unsigned(mul(ua, ub), ua * ub);
    }
  };

  if (std::holds_alternative<Exhaustive>(spec.mode)) {
    if (n > 16 && !spec.allow_huge) {
      throw std::invalid_argument("exhaustive sweeps above 16 bits require an explicit opt-in");
    }
    const std::int64_t hi = (std::int64_t{1} << n) - 1;
    const std::int64_t lo = spec.include_signed ? -hi : 0;
    const auto rows = static_cast<std::uint64_t>(hi - lo + 1);
    chunks.resize(rows);
    detail::parallel_chunks(rows, spec.jobs, [&](std::uint64_t row, detail::ChunkReducer& red) {
      red.reset();
      const std::int64_t a = lo + static_cast<std::int64_t>(row);
      for (std::int64_t b = lo; b <= hi; ++b) eval(a, b, red);
      chunks[row] = red.finish();
    });
  } else {
    const auto& s = std::get<Sampled>(spec.mode);
    PairSampler sampler(s.seed, n, spec.include_signed);
    detail::ChunkReducer red;
    for (std::uint64_t done = 0; done < s.count;) {
      red.reset();
      const std::uint64_t take = std::min(kSampledChunk, s.count - done);
      for (std::uint64_t i = 0; i < take; ++i) {
        const auto a = sampler.next();
        const auto b = sampler.next();
        eval(a, b, red);
      }
      chunks.push_back(red.finish());
      done += take;
    }
  }

  ChunkStats all;
  for (const auto& c : chunks) all.merge(c);
  auto report = detail::to_report(all, spec, std::move(design_name));
  if constexpr (std::is_same_v<Mul, ScaleTrim>) report.accumulator_clamps = mul.clamp_count();
  return report;
}

inline ErrorReport sweep(const Design& d, const SweepSpec& spec) {
  if (d.width != spec.width) throw std::invalid_argument("design width differs from sweep width");
  return std::visit([&](const auto& mul) { return sweep(mul, spec, d.name); }, d.impl);
}

struct GridCell {
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  double ared = 0;  // percent
};

struct GridBin {
  std::uint64_t a = 0;
  double mean_ared = 0;  // percent, over all b with a*b != 0
};

inline constexpr int kMaxGridWidth = 12;

/// ARED for every nonzero pair, rows ordered by a then b. Pairs with a zero
/// exact product are omitted.
template <typename Mul>
std::vector<GridCell> error_grid(const Mul& mul, int width) {
  if (width > kMaxGridWidth) throw std::invalid_argument("error grids are limited to 12-bit operands");
  std::vector<GridCell> out;
  const std::uint64_t hi = std::uint64_t{1} << width;
  out.reserve((hi - 1) * (hi - 1));
  for (std::uint64_t a = 1; a < hi; ++a) {
    for (std::uint64_t b = 1; b < hi; ++b) {
      const std::uint64_t exact = a * b;
      const std::uint64_t approx = mul(a, b);
      const double diff = approx >= exact ? static_cast<double>(approx - exact)
                                          : static_cast<double>(exact - approx);
      out.push_back({a, b, diff / static_cast<double>(exact) * 100.0});
    }
  }
  return out;
}

inline std::vector<GridCell> error_grid(const Design& d) {
  return std::visit([&](const auto& mul) { return error_grid(mul, d.width); }, d.impl);
}

/// Mean ARED per operand A.
inline std::vector<GridBin> bin_by_a(const std::vector<GridCell>& grid) {
  std::vector<GridBin> out;
  std::size_t i = 0;
  while (i < grid.size()) {
    const auto a = grid[i].a;
    double sum = 0;
    std::size_t n = 0;
    for (; i < grid.size() && grid[i].a == a; ++i, ++n) sum += grid[i].ared;
    out.push_back({a, sum / static_cast<double>(n)});
  }
  return out;
}

inline double grid_max(const std::vector<GridCell>& grid) {
  double m = 0;
  for (const auto& c : grid) m = std::max(m, c.ared);
  return m;
}

inline SweepMode parse_mode(std::string_view s) {
  if (s == "exhaustive") return Exhaustive{};
  constexpr std::string_view prefix = "sampled";
  if (s.substr(0, prefix.size()) != prefix) throw std::invalid_argument("unknown sweep mode '" + std::string(s) + "'");
  Sampled out;
  s.remove_prefix(prefix.size());
  if (s.empty()) return out;
  if (s.front() != ':') throw std::invalid_argument("bad sampled mode");
  s.remove_prefix(1);
  const auto colon = s.find(':');
  auto num = [](std::string_view t) {
    if (t.empty()) throw std::invalid_argument("empty number in sweep mode");
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(t.data(), t.data() + t.size(), v);
    if (ec != std::errc{} || p != t.data() + t.size()) throw std::invalid_argument("bad number in sweep mode");
    return v;
  };
  out.count = num(s.substr(0, colon));
  if (out.count == 0) throw std::invalid_argument("sample count must be positive");
  if (colon != std::string_view::npos) {
    auto seed = s.substr(colon + 1);
    if (seed.substr(0, 4) == "seed") seed.remove_prefix(4);
    out.seed = num(seed);
  }
  return out;
}

}  // namespace trimscale
