#pragma once

// Design-under-test strings:
//   exact | pow2 | scaletrim:<h>,<m> | drum:<m> | dsm:<m> | tosam:<t>,<h>

#include <charconv>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <variant>
#include <vector>

#include "trimscale/baselines.hpp"
#include "trimscale/datapath.hpp"

namespace trimscale {

using DesignImpl = std::variant<Exact, Pow2, ScaleTrim, Drum, Dsm, Tosam>;

struct Design {
  std::string name;
  int width = 8;
  DesignImpl impl;

  std::uint64_t operator()(std::uint64_t a, std::uint64_t b) const {
    return std::visit([&](const auto& mul) { return mul(a, b); }, impl);
  }
};

namespace detail {

inline std::vector<int> parse_int_list(std::string_view s, std::string_view what) {
  std::vector<int> out;
  while (true) {
    const auto comma = s.find(',');
    const auto tok = s.substr(0, comma);
    int v = 0;
    const auto [p, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
    if (tok.empty() || ec != std::errc{} || p != tok.data() + tok.size()) {
      throw std::invalid_argument("bad integer '" + std::string(tok) + "' in " + std::string(what));
    }
    out.push_back(v);
    if (comma == std::string_view::npos) break;
    s.remove_prefix(comma + 1);
  }
  return out;
}

}  // namespace detail

inline std::string scaletrim_name(int h, int m) {
  return "scaletrim:" + std::to_string(h) + "," + std::to_string(m);
}

inline Design make_scaletrim_design(const ScaleTrimConfig& cfg, int width) {
  return Design{scaletrim_name(cfg.h, cfg.m), width, ScaleTrim(cfg, width)};
}

inline Design parse_design(std::string_view spec, int width, int n_ref = 8) {
  const std::string name(spec);
  if (spec == "exact") return Design{name, width, Exact{width}};
  if (spec == "pow2") return Design{name, width, Pow2{width}};
  const auto colon = spec.find(':');
  if (colon == std::string_view::npos) throw std::invalid_argument("unknown design '" + name + "'");
  const auto kind = spec.substr(0, colon);
  const auto args = detail::parse_int_list(spec.substr(colon + 1), name);
  auto want = [&](std::size_t n) {
    if (args.size() != n) {
      throw std::invalid_argument("design '" + name + "' expects " + std::to_string(n) + " parameter(s)");
    }
  };
  if (kind == "scaletrim") {
    want(2);
    return make_scaletrim_design(make_config(args[0], args[1], n_ref), width);
  }
  if (kind == "drum") {
    want(1);
    return Design{name, width, Drum(args[0], width)};
  }
  if (kind == "dsm") {
    want(1);
    return Design{name, width, Dsm(args[0], width)};
  }
  if (kind == "tosam") {
    want(2);
    return Design{name, width, Tosam(args[0], args[1], width)};
  }
  throw std::invalid_argument("unknown design '" + name + "'");
}

}  // namespace trimscale
