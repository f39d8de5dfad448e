#pragma once

// Small integer-quantized feedforward net with a pluggable scalar multiplier.
//
// Dense layers only. Weights int8, activations uint8, zero points 0,
// accumulators int32, power-of-two rescaling by an arithmetic right shift.
// Hidden layers apply ReLU and saturate to [0, 255]; the last layer's
// shifted accumulators are the logits.
//
// On-disk fixture: a JSON sidecar plus a flat little-endian binary. For each
// layer the binary holds out*in int8 weights (row-major, one row per output)
// at weight_offset and out int32 biases at bias_offset. Input sets are raw
// uint8 files, input_dim bytes per sample.

#include <algorithm>
#include <atomic>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <random>
#include <span>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include <json.hpp>

#include "trimscale/baselines.hpp"
#include "trimscale/datapath.hpp"

namespace trimscale {

inline constexpr int kActivationBits = 8;
inline constexpr int kWeightBits = 8;

struct DenseLayer {
  int in = 0;
  int out = 0;
  int shift = 0;
  bool relu = true;
  std::vector<std::int8_t> weights;  // [out][in]
  std::vector<std::int32_t> bias;

  std::int8_t w(int o, int i) const { return weights[static_cast<std::size_t>(o) * in + i]; }
};

struct QuantNet {
  int input_dim = 0;
  std::vector<DenseLayer> layers;

  int num_classes() const { return layers.empty() ? 0 : layers.back().out; }

  void validate() const {
    if (layers.empty()) throw std::invalid_argument("network has no layers");
    int dim = input_dim;
    for (const auto& l : layers) {
      if (l.in != dim) throw std::invalid_argument("layer input size does not match previous layer");
      if (l.out <= 0 || l.shift < 0 || l.shift > 31) throw std::invalid_argument("bad layer shape or shift");
      if (l.weights.size() != static_cast<std::size_t>(l.in) * l.out || l.bias.size() != static_cast<std::size_t>(l.out)) {
        throw std::invalid_argument("layer parameter count does not match its shape");
      }
      // Worst case |acc| must stay inside int32, even with an approximate
      // multiplier overshooting by up to 4x.
      const std::int64_t bound = std::int64_t{4} * l.in * 255 * 128 + std::numeric_limits<std::int16_t>::max();
      if (bound > std::numeric_limits<std::int32_t>::max()) throw std::invalid_argument("layer too wide for int32");
      dim = l.out;
    }
  }
};

struct Inference {
  int label = 0;
  std::vector<std::int32_t> logits;
};

inline int argmax(std::span<const std::int32_t> v) {
  return static_cast<int>(std::max_element(v.begin(), v.end()) - v.begin());
}

/// Every weight*activation product goes through mul_signed with `mul`.
template <typename Mul>
Inference infer(const QuantNet& net, std::span<const std::uint8_t> input, const Mul& mul) {
  if (static_cast<int>(input.size()) != net.input_dim) {
    throw std::invalid_argument("input has " + std::to_string(input.size()) + " values, network expects " +
                                std::to_string(net.input_dim));
  }
  std::vector<std::int32_t> act(input.begin(), input.end());
  std::vector<std::int32_t> next;
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const auto& l = net.layers[li];
    const bool last = li + 1 == net.layers.size();
    next.assign(l.out, 0);
    for (int o = 0; o < l.out; ++o) {
      std::int32_t acc = l.bias[o];
      for (int i = 0; i < l.in; ++i) {
        acc += static_cast<std::int32_t>(mul_signed(l.w(o, i), act[i], kActivationBits, mul));
      }
      std::int32_t y = acc >> l.shift;
      if (!last) y = std::clamp(y, 0, 255);
      next[o] = y;
    }
    act.swap(next);
  }
  Inference r;
  r.logits = std::move(act);
  r.label = argmax(r.logits);
  return r;
}

/// Plain integer multiply-accumulate, no multiplier plumbing.
inline Inference infer_reference(const QuantNet& net, std::span<const std::uint8_t> input) {
  if (static_cast<int>(input.size()) != net.input_dim) throw std::invalid_argument("input size mismatch");
  std::vector<std::int32_t> act(input.begin(), input.end());
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    const auto& l = net.layers[li];
    std::vector<std::int32_t> next(l.out);
    for (int o = 0; o < l.out; ++o) {
      std::int32_t acc = l.bias[o];
      for (int i = 0; i < l.in; ++i) acc += l.w(o, i) * act[i];
      acc >>= l.shift;
      if (li + 1 < net.layers.size()) acc = std::clamp(acc, 0, 255);
      next[o] = acc;
    }
    act = std::move(next);
  }
  return {argmax(act), act};
}

/// Samples stored back to back, input_dim bytes each.
struct InputSet {
  int dim = 0;
  std::vector<std::uint8_t> data;

  std::size_t size() const { return dim ? data.size() / dim : 0; }
  std::span<const std::uint8_t> operator[](std::size_t i) const {
    return {data.data() + i * dim, static_cast<std::size_t>(dim)};
  }
};

struct AgreementReport {
  std::string design;
  std::uint64_t samples = 0;
  double top1_agreement_percent = 0;
  std::int64_t max_logit_abs_diff = 0;
  double mean_logit_abs_diff = 0;
};

/// Exact vs. approximate inference on every sample. Per-sample results are
/// computed in parallel and reduced in sample order.
template <typename Mul>
AgreementReport compare(const QuantNet& net, const InputSet& inputs, const Mul& mul, std::string name, int jobs = 1) {
  const std::size_t n = inputs.size();
  struct PerSample {
    bool agree = false;
    std::int64_t max_diff = 0;
    std::int64_t sum_diff = 0;
  };
  std::vector<PerSample> res(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      const auto ref = infer(net, inputs[i], Exact{kActivationBits});
      const auto apx = infer(net, inputs[i], mul);
      auto& r = res[i];
      r.agree = ref.label == apx.label;
      for (std::size_t k = 0; k < ref.logits.size(); ++k) {
        const std::int64_t d = std::abs(std::int64_t{ref.logits[k]} - apx.logits[k]);
        r.max_diff = std::max(r.max_diff, d);
        r.sum_diff += d;
      }
    }
  };
  {
    std::vector<std::jthread> pool;
    for (int j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
  }
  AgreementReport rep;
  rep.design = std::move(name);
  rep.samples = n;
  std::uint64_t agree = 0;
  std::int64_t sum = 0;
  for (const auto& r : res) {
    agree += r.agree;
    sum += r.sum_diff;
    rep.max_logit_abs_diff = std::max(rep.max_logit_abs_diff, r.max_diff);
  }
  if (n) {
    rep.top1_agreement_percent = 100.0 * static_cast<double>(agree) / static_cast<double>(n);
    rep.mean_logit_abs_diff = static_cast<double>(sum) / static_cast<double>(n * net.num_classes());
  }
  return rep;
}

// ---------------------------------------------------------------------------
// Fixture I/O

namespace detail {

inline std::vector<char> read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + p.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

inline std::int32_t load_le32(const char* p) {
  std::uint32_t v = 0;
  for (int i = 3; i >= 0; --i) v = (v << 8) | static_cast<std::uint8_t>(p[i]);
  return static_cast<std::int32_t>(v);
}

inline void store_le32(std::vector<char>& out, std::int32_t v) {
  const auto u = static_cast<std::uint32_t>(v);
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((u >> (8 * i)) & 0xff));
}

}  // namespace detail

/// Reads `sidecar` (JSON) and the binary it names, relative to the sidecar.
inline QuantNet load_net(const std::filesystem::path& sidecar) {
  nlohmann::json j;
  {
    std::ifstream in(sidecar);
    if (!in) throw std::runtime_error("cannot open " + sidecar.string());
    in >> j;
  }
  if (j.value("format", "") != "trimscale-qnet" || j.value("version", 0) != 1) {
    throw std::invalid_argument("unsupported network fixture format");
  }
  if (j.value("byte_order", "") != "little-endian") throw std::invalid_argument("fixture must be little-endian");
  const auto blob = detail::read_file(sidecar.parent_path() / j.at("weights").get<std::string>());
  QuantNet net;
  net.input_dim = j.at("input_dim").get<int>();
  for (const auto& jl : j.at("layers")) {
    if (jl.at("type").get<std::string>() != "dense") throw std::invalid_argument("only dense layers are supported");
    DenseLayer l;
    l.in = jl.at("in").get<int>();
    l.out = jl.at("out").get<int>();
    l.shift = jl.at("shift").get<int>();
    l.relu = jl.at("relu").get<bool>();
    const auto wo = jl.at("weight_offset").get<std::size_t>();
    const auto bo = jl.at("bias_offset").get<std::size_t>();
    const std::size_t nw = static_cast<std::size_t>(l.in) * l.out;
    if (wo + nw > blob.size() || bo + 4 * static_cast<std::size_t>(l.out) > blob.size()) {
      throw std::invalid_argument("fixture binary is truncated");
    }
    for (std::size_t i = 0; i < nw; ++i) l.weights.push_back(static_cast<std::int8_t>(blob[wo + i]));
    for (int o = 0; o < l.out; ++o) l.bias.push_back(detail::load_le32(blob.data() + bo + 4 * o));
    net.layers.push_back(std::move(l));
  }
  net.validate();
  return net;
}

inline void save_net(const QuantNet& net, const std::filesystem::path& sidecar) {
  net.validate();
  const auto bin_name = sidecar.stem().string() + ".bin";
  std::vector<char> blob;
  nlohmann::ordered_json j;
  j["format"] = "trimscale-qnet";
  j["version"] = 1;
  j["byte_order"] = "little-endian";
  j["weights"] = bin_name;
  j["weight_bits"] = kWeightBits;
  j["activation_bits"] = kActivationBits;
  j["accumulator_bits"] = 32;
  j["zero_point"] = 0;
  j["input_dim"] = net.input_dim;
  j["layers"] = nlohmann::ordered_json::array();
  for (const auto& l : net.layers) {
    nlohmann::ordered_json jl;
    jl["type"] = "dense";
    jl["in"] = l.in;
    jl["out"] = l.out;
    jl["shift"] = l.shift;
    jl["relu"] = l.relu;
    jl["weight_offset"] = blob.size();
    for (auto w : l.weights) blob.push_back(static_cast<char>(w));
    jl["bias_offset"] = blob.size();
    for (auto b : l.bias) detail::store_le32(blob, b);
    j["layers"].push_back(jl);
  }
  std::ofstream(sidecar) << j.dump(2) << '\n';
  std::ofstream bin(sidecar.parent_path() / bin_name, std::ios::binary);
  bin.write(blob.data(), static_cast<std::streamsize>(blob.size()));
  if (!bin) throw std::runtime_error("cannot write " + bin_name);
}

inline InputSet load_inputs(const std::filesystem::path& p, int dim) {
  const auto raw = detail::read_file(p);
  if (dim <= 0 || raw.size() % dim) throw std::invalid_argument("input file size is not a multiple of input_dim");
  InputSet s;
  s.dim = dim;
  s.data.assign(raw.begin(), raw.end());
  return s;
}

inline void save_inputs(const InputSet& s, const std::filesystem::path& p) {
  std::ofstream out(p, std::ios::binary);
  out.write(reinterpret_cast<const char*>(s.data.data()), static_cast<std::streamsize>(s.data.size()));
  if (!out) throw std::runtime_error("cannot write " + p.string());
}

struct FixtureSpec {
  std::uint64_t seed = 2024;
  std::vector<int> dims = {64, 32, 32, 10};
  std::size_t samples = 1000;
  int classes = 10;
  int noise = 48;
};

/// Seeded synthetic fixture: uniform int8 weights, small biases, and inputs
/// drawn around per-class prototypes. Each shift is the smallest one that keeps
/// the exact-path activations of the generated inputs within 8 bits.
inline std::pair<QuantNet, InputSet> make_fixture(const FixtureSpec& spec) {
  if (spec.dims.size() < 2) throw std::invalid_argument("fixture needs at least one layer");
  std::mt19937_64 rng(spec.seed);
  auto uniform = [&](int lo, int hi) {
    return lo + static_cast<int>(rng() % static_cast<std::uint64_t>(hi - lo + 1));
  };

  InputSet inputs;
  inputs.dim = spec.dims.front();
  std::vector<std::vector<int>> protos(spec.classes, std::vector<int>(inputs.dim));
  for (auto& p : protos)
    for (auto& v : p) v = uniform(0, 255);
  for (std::size_t s = 0; s < spec.samples; ++s) {
    const auto& p = protos[s % spec.classes];
    for (int i = 0; i < inputs.dim; ++i) {
      inputs.data.push_back(static_cast<std::uint8_t>(std::clamp(p[i] + uniform(-spec.noise, spec.noise), 0, 255)));
    }
  }

  QuantNet net;
  net.input_dim = inputs.dim;
  for (std::size_t li = 1; li < spec.dims.size(); ++li) {
    DenseLayer l;
    l.in = spec.dims[li - 1];
    l.out = spec.dims[li];
    l.relu = li + 1 < spec.dims.size();
    for (int k = 0; k < l.in * l.out; ++k) l.weights.push_back(static_cast<std::int8_t>(uniform(-128, 127)));
    for (int o = 0; o < l.out; ++o) l.bias.push_back(uniform(-2048, 2048));
    net.layers.push_back(std::move(l));
  }

  // Calibrate shifts layer by layer on the generated inputs.
  std::vector<std::vector<std::int32_t>> acts(inputs.size());
  for (std::size_t s = 0; s < inputs.size(); ++s) acts[s].assign(inputs[s].begin(), inputs[s].end());
  for (std::size_t li = 0; li < net.layers.size(); ++li) {
    auto& l = net.layers[li];
    const bool last = li + 1 == net.layers.size();
    std::vector<std::vector<std::int32_t>> pre(acts.size(), std::vector<std::int32_t>(l.out));
    std::int32_t peak = 0;
    for (std::size_t s = 0; s < acts.size(); ++s) {
      for (int o = 0; o < l.out; ++o) {
        std::int32_t acc = l.bias[o];
        for (int i = 0; i < l.in; ++i) acc += l.w(o, i) * acts[s][i];
        pre[s][o] = acc;
        peak = std::max(peak, last ? std::abs(acc) : acc);
      }
    }
    l.shift = 0;
    while ((peak >> l.shift) > 255) ++l.shift;
    for (std::size_t s = 0; s < acts.size(); ++s) {
      acts[s].resize(l.out);
      for (int o = 0; o < l.out; ++o) {
        const std::int32_t y = pre[s][o] >> l.shift;
        acts[s][o] = last ? y : std::clamp(y, 0, 255);
      }
    }
  }
  net.validate();
  return {std::move(net), std::move(inputs)};
}

}  // namespace trimscale
