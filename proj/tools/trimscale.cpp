#include <exception>
#include <iostream>

#include <CLI11.hpp>

#include "trimscale/cli.hpp"

namespace cli = trimscale::cli;

int main(int argc, char** argv) {
  CLI::App app{"scaleTRIM approximate multiplier toolkit"};
  app.require_subcommand(1);
  app.set_help_flag("--help", "print this help and exit");
  app.set_version_flag("--version", trimscale::kToolVersion);

  cli::CalibrateOptions cal;
  auto* c_cal = app.add_subcommand("calibrate", "fit alpha, delta_ee and the compensation table");
  c_cal->add_option("--h", cal.h, "truncation width")->required();
  c_cal->add_option("--m", cal.m, "compensation segments (0 or power of two)")->required();
  c_cal->add_option("--n-ref", cal.n_ref, "calibration grid resolution in bits");
  c_cal->add_option("--out", cal.out, "config JSON")->required();

  cli::SweepOptions sw;
  sw.jobs = cli::default_jobs();
  auto* c_sw = app.add_subcommand("sweep", "error statistics over an operand sweep");
  c_sw->add_option("--design", sw.designs, "design string, repeatable");
  c_sw->add_option("--config", sw.config, "calibrated scaleTRIM config JSON");
  c_sw->add_option("--width", sw.width, "operand width N");
  c_sw->add_option("--mode", sw.mode, "exhaustive | sampled:<count>:seed<seed>");
  c_sw->add_flag("--signed", sw.include_signed, "sweep signed operands through the sign-magnitude wrapper");
  c_sw->add_flag("--allow-huge", sw.allow_huge, "permit exhaustive sweeps above 16 bits");
  c_sw->add_option("--jobs", sw.jobs, "worker threads (default TRIMSCALE_JOBS)");
  c_sw->add_option("--n-ref", sw.n_ref, "calibration grid resolution for scaletrim designs");
  c_sw->add_option("--out", sw.out, "report CSV (stdout if omitted)");
  c_sw->add_option("--json", sw.json_out, "JSON mirror of the report");

  cli::GridOptions gr;
  auto* c_gr = app.add_subcommand("grid", "per-pair ARED grid");
  c_gr->add_option("--design", gr.design)->required();
  c_gr->add_option("--width", gr.width);
  c_gr->add_flag("--binned", gr.binned, "mean ARED per operand A");
  c_gr->add_option("--n-ref", gr.n_ref);
  c_gr->add_option("--out", gr.out)->required();

  cli::ParetoOptions pa;
  pa.jobs = cli::default_jobs();
  auto* c_pa = app.add_subcommand("pareto", "cost/error frontier over (h, M)");
  c_pa->add_option("--grid", pa.grid, "e.g. h=3..5,m=0,4,8");
  c_pa->add_option("--width", pa.width);
  c_pa->add_option("--mode", pa.mode);
  c_pa->add_option("--n-ref", pa.n_ref);
  c_pa->add_option("--jobs", pa.jobs);
  c_pa->add_option("--out", pa.out)->required();

  cli::LutExportOptions lut;
  auto* c_lut = app.add_subcommand("lut-export", "hardwired compensation constants as hex");
  c_lut->add_option("--config", lut.config)->required();
  c_lut->add_option("--out", lut.out)->required();

  cli::NnCompareOptions nn;
  nn.jobs = cli::default_jobs();
  auto* c_nn = app.add_subcommand("nn-compare", "exact vs approximate inference agreement");
  c_nn->add_option("--net", nn.net, "network fixture JSON")->required();
  c_nn->add_option("--inputs", nn.inputs, "raw uint8 input samples")->required();
  c_nn->add_option("--design", nn.designs, "design string, repeatable")->required();
  c_nn->add_option("--n-ref", nn.n_ref);
  c_nn->add_option("--jobs", nn.jobs);
  c_nn->add_option("--out", nn.out, "report JSON (stdout if omitted)");

  cli::NnFixtureOptions fx;
  auto* c_fx = app.add_subcommand("nn-fixture", "generate the seeded network fixture and inputs");
  c_fx->add_option("--seed", fx.seed);
  c_fx->add_option("--samples", fx.samples);
  c_fx->add_option("--out-dir", fx.out_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (c_cal->parsed()) cli::cmd_calibrate(cal);
    if (c_sw->parsed()) cli::cmd_sweep(sw);
    if (c_gr->parsed()) cli::cmd_grid(gr);
    if (c_pa->parsed()) cli::cmd_pareto(pa);
    if (c_lut->parsed()) cli::cmd_lut_export(lut);
    if (c_nn->parsed()) cli::cmd_nn_compare(nn);
    if (c_fx->parsed()) cli::cmd_nn_fixture(fx);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
