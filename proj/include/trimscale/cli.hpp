#pragma once

// Subcommand implementations behind tools/trimscale.cpp. Each takes a plain
// options struct and writes its artifacts; errors surface as exceptions and
// the driver turns them into a nonzero exit status.

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "trimscale/config_io.hpp"
#include "trimscale/costmodel.hpp"
#include "trimscale/design.hpp"
#include "trimscale/manifest.hpp"
#include "trimscale/metrics.hpp"
#include "trimscale/nnharness.hpp"

namespace trimscale::cli {

using ordered_json = nlohmann::ordered_json;

inline int default_jobs() {
  if (const char* env = std::getenv("TRIMSCALE_JOBS")) {
    const int v = std::atoi(env);
    if (v > 0) return v;
  }
  return 1;
}

inline std::string fmt2(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

/// RFC 4180 quoting; design names such as "scaletrim:4,4" contain commas.
inline std::string csv_field(const std::string& v) {
  if (v.find_first_of(",\"\n") == std::string::npos) return v;
  std::string q = "\"";
  for (char c : v) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + '"';
}

inline void write_text(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
  if (!out) throw std::runtime_error("cannot write " + path);
}

inline std::string read_text(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateOptions {
  int h = 3;
  int m = 0;
  int n_ref = 8;
  std::string out;
};

inline ordered_json calibrate_json(const ScaleTrimConfig& cfg, const RunManifest& man) {
  auto j = config_to_json(cfg);
  j["manifest"] = man.hash();
  return j;
}

inline ScaleTrimConfig cmd_calibrate(const CalibrateOptions& o) {
  const auto cfg = make_config(o.h, o.m, o.n_ref);
  RunManifest man{"calibrate", {{"h", o.h}, {"m", o.m}, {"n_ref", o.n_ref}}, hex64(config_hash(cfg))};
  write_text(o.out, calibrate_json(cfg, man).dump(2) + "\n");
  write_manifest_sidecar(man, o.out);
  return cfg;
}

// ---------------------------------------------------------------------------
// sweep

inline const char* kReportHeader =
    "design,width,mode,seed,prng,signed,pairs_total,pairs_excluded_zero,mared,stdared,mred,stdred,max_ared,"
    "accumulator_clamps";

inline std::string report_csv_row(const ErrorReport& r) {
  std::ostringstream os;
  os << csv_field(r.design) << ',' << r.width << ',' << r.mode << ',' << r.seed << ',' << r.prng << ','
     << (r.include_signed ? 1 : 0) << ',' << r.pairs_total << ',' << r.pairs_excluded_zero << ',' << fmt2(r.mared)
     << ',' << fmt2(r.stdared) << ',' << fmt2(r.mred) << ',' << fmt2(r.stdred) << ',' << fmt2(r.max_ared) << ','
     << r.accumulator_clamps;
  return os.str();
}

inline ordered_json report_json(const ErrorReport& r) {
  ordered_json j;
  j["design"] = r.design;
  j["width"] = r.width;
  j["mode"] = r.mode;
  j["seed"] = r.seed;
  j["prng"] = r.prng;
  j["signed"] = r.include_signed;
  j["pairs_total"] = r.pairs_total;
  j["pairs_excluded_zero"] = r.pairs_excluded_zero;
  j["mared"] = r.mared;
  j["stdared"] = r.stdared;
  j["mred"] = r.mred;
  j["stdred"] = r.stdred;
  j["max_ared"] = r.max_ared;
  j["accumulator_clamps"] = r.accumulator_clamps;
  return j;
}

struct SweepOptions {
  std::vector<std::string> designs;
  std::string config;  // optional calibrated config used instead of a design string
  int width = 8;
  std::string mode = "exhaustive";
  bool include_signed = false;
  bool allow_huge = false;
  int jobs = 1;
  int n_ref = 8;
  std::string out;       // CSV
  std::string json_out;  // optional JSON mirror
};

inline std::vector<ErrorReport> cmd_sweep(const SweepOptions& o) {
  if (o.designs.empty() && o.config.empty()) throw std::invalid_argument("sweep needs --design or --config");
  SweepSpec spec;
  spec.width = o.width;
  spec.mode = parse_mode(o.mode);
  spec.include_signed = o.include_signed;
  spec.allow_huge = o.allow_huge;
  spec.jobs = o.jobs;

  std::vector<Design> designs;
  std::string cfg_hash;
  if (!o.config.empty()) {
    const auto cfg = load_config(o.config);
    cfg_hash = hex64(config_hash(cfg));
    designs.push_back(make_scaletrim_design(cfg, o.width));
  }
  for (const auto& d : o.designs) designs.push_back(parse_design(d, o.width, o.n_ref));

  std::vector<ErrorReport> reports;
  for (const auto& d : designs) reports.push_back(sweep(d, spec));

  RunManifest man{"sweep",
                  {{"designs", o.designs}, {"config", o.config}, {"width", o.width}, {"mode", o.mode},
                   {"signed", o.include_signed}, {"n_ref", o.n_ref}},
                  cfg_hash};
  std::string csv = "# manifest " + man.hash() + "\n" + kReportHeader + "\n";
  ordered_json j;
  j["manifest"] = man.hash();
  j["reports"] = ordered_json::array();
  for (const auto& r : reports) {
    csv += report_csv_row(r) + "\n";
    j["reports"].push_back(report_json(r));
  }
  if (!o.out.empty()) {
    write_text(o.out, csv);
    write_manifest_sidecar(man, o.out);
  } else {
    std::cout << csv;
  }
  if (!o.json_out.empty()) write_text(o.json_out, j.dump(2) + "\n");
  return reports;
}

// ---------------------------------------------------------------------------
// grid

struct GridOptions {
  std::string design;
  int width = 8;
  bool binned = false;
  int n_ref = 8;
  std::string out;
};

inline std::string grid_csv(const std::vector<GridCell>& grid) {
  std::string s = "a,b,ared\n";
  for (const auto& c : grid) s += std::to_string(c.a) + ',' + std::to_string(c.b) + ',' + fmt2(c.ared) + '\n';
  return s;
}

inline std::string binned_csv(const std::vector<GridBin>& bins) {
  std::string s = "a,mean_ared\n";
  for (const auto& b : bins) s += std::to_string(b.a) + ',' + fmt2(b.mean_ared) + '\n';
  return s;
}

inline void cmd_grid(const GridOptions& o) {
  const auto d = parse_design(o.design, o.width, o.n_ref);
  const auto grid = error_grid(d);
  RunManifest man{"grid", {{"design", o.design}, {"width", o.width}, {"binned", o.binned}, {"n_ref", o.n_ref}}, ""};
  const std::string body = o.binned ? binned_csv(bin_by_a(grid)) : grid_csv(grid);
  write_text(o.out, "# manifest " + man.hash() + "\n" + body);
  write_manifest_sidecar(man, o.out);
}

// ---------------------------------------------------------------------------
// pareto

struct ConfigGrid {
  std::vector<int> h;
  std::vector<int> m;
};

/// "h=3..5,m=0,4,8": a key starts a new list; values are integers or a..b.
inline ConfigGrid parse_config_grid(std::string_view s) {
  ConfigGrid g;
  std::vector<int>* cur = nullptr;
  while (!s.empty()) {
    const auto comma = s.find(',');
    auto tok = s.substr(0, comma);
    s = comma == std::string_view::npos ? std::string_view{} : s.substr(comma + 1);
    if (const auto eq = tok.find('='); eq != std::string_view::npos) {
      const auto key = tok.substr(0, eq);
      if (key == "h") cur = &g.h;
      else if (key == "m") cur = &g.m;
      else throw std::invalid_argument("unknown grid key '" + std::string(key) + "'");
      tok = tok.substr(eq + 1);
    }
    if (!cur) throw std::invalid_argument("grid values must follow h= or m=");
    if (const auto dots = tok.find(".."); dots != std::string_view::npos) {
      const auto lo = detail::parse_int_list(tok.substr(0, dots), "grid");
      const auto hi = detail::parse_int_list(tok.substr(dots + 2), "grid");
      if (lo[0] > hi[0]) throw std::invalid_argument("empty grid range");
      for (int v = lo[0]; v <= hi[0]; ++v) cur->push_back(v);
    } else {
      cur->push_back(detail::parse_int_list(tok, "grid")[0]);
    }
  }
  if (g.h.empty() || g.m.empty()) throw std::invalid_argument("grid needs both h= and m=");
  return g;
}

struct ParetoOptions {
  std::string grid = "h=3..5,m=0,4,8";
  int width = 8;
  std::string mode = "exhaustive";
  int n_ref = 8;
  int jobs = 1;
  std::string out;
};

struct ParetoResult {
  std::vector<DesignPoint> points;
  std::vector<std::size_t> frontier;
};

inline ParetoResult evaluate_grid(const ConfigGrid& g, int width, const SweepSpec& spec, int n_ref) {
  ParetoResult res;
  for (int h : g.h) {
    for (int m : g.m) {
      DesignPoint p;
      p.cfg = make_config(h, m, n_ref);
      p.label = scaletrim_name(h, m);
      p.cost = estimate(p.cfg, width);
      p.error = sweep(ScaleTrim(p.cfg, width), spec, p.label);
      res.points.push_back(std::move(p));
    }
  }
  res.frontier = pareto(res.points);
  return res;
}

inline std::string pareto_csv(const ParetoResult& r) {
  std::string s = "design,h,m,delta_ee";
  for (auto name : kBlockNames) s += ",area_" + std::string(name);
  for (auto name : kBlockNames) s += ",delay_" + std::string(name);
  s += ",area_units,delay_units,energy_units,mared,stdared,mred,stdred,max_ared,frontier\n";
  std::vector<bool> on(r.points.size());
  for (auto i : r.frontier) on[i] = true;
  for (std::size_t i = 0; i < r.points.size(); ++i) {
    const auto& p = r.points[i];
    std::ostringstream os;
    os << csv_field(p.label) << ',' << p.cfg.h << ',' << p.cfg.m << ',' << p.cfg.delta_ee;
    for (const auto& b : p.cost.blocks) os << ',' << fmt2(b.area);
    for (const auto& b : p.cost.blocks) os << ',' << fmt2(b.delay);
    os << ',' << fmt2(p.cost.area_units) << ',' << fmt2(p.cost.delay_units) << ',' << fmt2(p.cost.energy_units)
       << ',' << fmt2(p.error.mared) << ',' << fmt2(p.error.stdared) << ',' << fmt2(p.error.mred) << ','
       << fmt2(p.error.stdred) << ',' << fmt2(p.error.max_ared) << ',' << (on[i] ? 1 : 0) << '\n';
    s += os.str();
  }
  return s;
}

inline ParetoResult cmd_pareto(const ParetoOptions& o) {
  SweepSpec spec;
  spec.width = o.width;
  spec.mode = parse_mode(o.mode);
  spec.jobs = o.jobs;
  auto res = evaluate_grid(parse_config_grid(o.grid), o.width, spec, o.n_ref);
  RunManifest man{"pareto", {{"grid", o.grid}, {"width", o.width}, {"mode", o.mode}, {"n_ref", o.n_ref}}, ""};
  write_text(o.out, "# manifest " + man.hash() + "\n" + pareto_csv(res));
  write_manifest_sidecar(man, o.out);
  return res;
}

// ---------------------------------------------------------------------------
// lut-export

struct LutExportOptions {
  std::string config;
  std::string out;
};

/// One literal per line, segment order.
inline std::string lut_hex_text(const CompTable& tbl) {
  std::string s;
  for (const auto& lit : export_hex(tbl)) s += lit + '\n';
  return s;
}

inline std::vector<std::int32_t> parse_lut_hex(std::string_view text) {
  std::vector<std::int32_t> out;
  std::istringstream in{std::string(text)};
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    out.push_back(parse_entry_hex(line));
  }
  return out;
}

/// Returns false (and warns) when the table is empty.
inline bool cmd_lut_export(const LutExportOptions& o, std::ostream& warn = std::cerr) {
  const auto cfg = load_config(o.config);
  RunManifest man{"lut-export", {{"config", o.config}}, hex64(config_hash(cfg))};
  write_text(o.out, lut_hex_text(cfg.comp));
  write_manifest_sidecar(man, o.out);
  if (cfg.m == 0) {
    warn << "warning: configuration has M = 0, compensation table is empty\n";
    return false;
  }
  return true;
}

// ---------------------------------------------------------------------------
// nn-compare / nn-fixture

struct NnCompareOptions {
  std::string net;
  std::string inputs;
  std::vector<std::string> designs;
  int n_ref = 8;
  int jobs = 1;
  std::string out;
};

inline ordered_json agreement_json(const AgreementReport& r) {
  ordered_json j;
  j["design"] = r.design;
  j["samples"] = r.samples;
  j["top1_agreement_percent"] = r.top1_agreement_percent;
  j["max_logit_abs_diff"] = r.max_logit_abs_diff;
  j["mean_logit_abs_diff"] = r.mean_logit_abs_diff;
  return j;
}

inline std::vector<AgreementReport> cmd_nn_compare(const NnCompareOptions& o) {
  const auto net = load_net(o.net);
  const auto inputs = load_inputs(o.inputs, net.input_dim);
  std::vector<AgreementReport> reps;
  for (const auto& name : o.designs) {
    const auto d = parse_design(name, kActivationBits, o.n_ref);
    reps.push_back(compare(net, inputs, d, d.name, o.jobs));
  }
  RunManifest man{"nn-compare",
                  {{"net", o.net}, {"inputs", o.inputs}, {"designs", o.designs}, {"n_ref", o.n_ref}},
                  ""};
  ordered_json j;
  j["manifest"] = man.hash();
  j["reports"] = ordered_json::array();
  for (const auto& r : reps) j["reports"].push_back(agreement_json(r));
  if (o.out.empty()) {
    std::cout << j.dump(2) << '\n';
  } else {
    write_text(o.out, j.dump(2) + "\n");
    write_manifest_sidecar(man, o.out);
  }
  return reps;
}

struct NnFixtureOptions {
  std::uint64_t seed = 2024;
  std::size_t samples = 1000;
  std::string out_dir = ".";
};

inline void cmd_nn_fixture(const NnFixtureOptions& o) {
  FixtureSpec spec;
  spec.seed = o.seed;
  spec.samples = o.samples;
  const auto [net, inputs] = make_fixture(spec);
  const std::filesystem::path dir(o.out_dir);
  std::filesystem::create_directories(dir);
  save_net(net, dir / "fixture.json");
  save_inputs(inputs, dir / "inputs.bin");
}

}  // namespace trimscale::cli
