// parnms: run, generate, benchmark and plot matrix-based parallel NMS.
//
// Options may also come from a TOML/INI file given with --config; command
// line flags take precedence over file values, which take precedence over
// built-in defaults. Subcommand options live in a section named after the
// subcommand, e.g. [sweep-n].

#include <iostream>
#include <map>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "parnms/commands.hpp"

namespace {

using namespace pnms;

void add_workload_options(CLI::App* cmd, WorkloadSpec& spec) {
  cmd->add_option("--objects", spec.objects, "objects per frame")->capture_default_str();
  cmd->add_option("--per-object", spec.detections_per_object, "detections per object")->capture_default_str();
  cmd->add_option("--frame-w", spec.frame_w, "frame width in pixels")->capture_default_str();
  cmd->add_option("--frame-h", spec.frame_h, "frame height in pixels")->capture_default_str();
  cmd->add_option("--base-z", spec.base_z, "nominal box side in pixels")->capture_default_str();
  cmd->add_option("--jitter-xy", spec.jitter_xy, "max position jitter")->capture_default_str();
  cmd->add_option("--jitter-z", spec.jitter_z, "max side-length jitter")->capture_default_str();
  cmd->add_option("--seed", spec.seed, "generator seed")->capture_default_str();
}

void add_timing_options(CLI::App* cmd, TimingOptions& timing) {
  cmd->add_option("--repetitions,-r", timing.repetitions, "measured repetitions (median reported)")
      ->capture_default_str()
      ->check(CLI::PositiveNumber);
  cmd->add_option("--warmup", timing.warmup, "unmeasured warmup runs")->capture_default_str();
}

const std::map<std::string, TieBreak> kTieBreaks{{"paper_faithful", TieBreak::paper_faithful},
                                                 {"by_index", TieBreak::by_index}};
const std::map<std::string, Format> kFormats{{"csv", Format::csv}, {"json", Format::json}};
const std::map<std::string, ChartKind> kKinds{{"latency_vs_n", ChartKind::latency_vs_n},
                                              {"latency_vs_k", ChartKind::latency_vs_k},
                                              {"map_reduce_split", ChartKind::map_reduce_split}};

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Matrix-based parallel non-maximum suppression"};
  app.set_config("--config", "", "read options from a TOML/INI file");
  app.require_subcommand(1);

  // run
  RunOptions run;
  Format run_in_fmt{}, run_out_fmt{};
  auto* run_cmd = app.add_subcommand("run", "suppress one detection file");
  run_cmd->add_option("input", run.input, "detections (CSV or JSON)")->required()->check(CLI::ExistingFile);
  auto* run_in_opt = run_cmd->add_option("--format", run_in_fmt, "input format")->transform(CLI::CheckedTransformer(kFormats));
  run_cmd->add_option("--out,-o", run.output, "write survivors here");
  auto* run_out_opt =
      run_cmd->add_option("--out-format", run_out_fmt, "survivor format")->transform(CLI::CheckedTransformer(kFormats));
  run_cmd->add_option("--theta", run.config.theta, "overlap threshold")->capture_default_str();
  run_cmd->add_option("--d-max", run.config.d_max, "detection capacity")->capture_default_str();
  run_cmd->add_option("--k", run.config.k, "reduce partitions per row")->capture_default_str();
  run_cmd->add_option("--workers,-w", run.config.workers, "worker threads")->capture_default_str();
  run_cmd->add_option("--tie-break", run.config.tie_break, "paper_faithful or by_index")
      ->transform(CLI::CheckedTransformer(kTieBreaks));

  // gen
  GenOptions gen;
  Format gen_fmt{};
  auto* gen_cmd = app.add_subcommand("gen", "generate a synthetic frame");
  add_workload_options(gen_cmd, gen.spec);
  gen_cmd->add_option("--d-max", gen.d_max, "capacity check (0 = exact)");
  gen_cmd->add_option("--out,-o", gen.output, "output file (default stdout)");
  auto* gen_fmt_opt = gen_cmd->add_option("--format", gen_fmt, "output format")->transform(CLI::CheckedTransformer(kFormats));

  // sweep-n
  SweepNOptions sweep_n;
  sweep_n.spec.detections_per_object = 8;
  std::size_t fixed_dmax = 0;
  auto* sn_cmd = app.add_subcommand("sweep-n", "latency as the detection count grows");
  add_workload_options(sn_cmd, sweep_n.spec);
  add_timing_options(sn_cmd, sweep_n.timing);
  sn_cmd->add_option("--n", sweep_n.n_values, "detection counts")->delimiter(',')->capture_default_str();
  sn_cmd->add_option("--workers,-w", sweep_n.workers, "worker counts")->delimiter(',')->capture_default_str();
  sn_cmd->add_option("--k", sweep_n.k, "reduce partitions per row")->capture_default_str();
  sn_cmd->add_option("--theta", sweep_n.theta, "overlap threshold")->capture_default_str();
  sn_cmd->add_option("--tie-break", sweep_n.tie_break)->transform(CLI::CheckedTransformer(kTieBreaks));
  auto* fixed_opt = sn_cmd->add_option("--fixed-dmax", fixed_dmax, "keep d_max constant (e.g. 4096)");
  sn_cmd->add_option("--out,-o", sweep_n.output_csv, "CSV output (default stdout)");

  // sweep-k
  SweepKOptions sweep_k;
  sweep_k.spec.detections_per_object = 8;
  auto* sk_cmd = app.add_subcommand("sweep-k", "latency as the partition count varies");
  add_workload_options(sk_cmd, sweep_k.spec);
  add_timing_options(sk_cmd, sweep_k.timing);
  sk_cmd->add_option("--n", sweep_k.n, "detection count")->capture_default_str();
  sk_cmd->add_option("--d-max", sweep_k.d_max, "detection capacity")->capture_default_str();
  sk_cmd->add_option("--k", sweep_k.k_values, "partition counts")->delimiter(',')->capture_default_str();
  sk_cmd->add_option("--workers,-w", sweep_k.workers, "worker counts")->delimiter(',')->capture_default_str();
  sk_cmd->add_option("--theta", sweep_k.theta, "overlap threshold")->capture_default_str();
  sk_cmd->add_option("--tie-break", sweep_k.tie_break)->transform(CLI::CheckedTransformer(kTieBreaks));
  sk_cmd->add_option("--out,-o", sweep_k.output_csv, "CSV output (default stdout)");

  // sweep-workers
  SweepWorkersOptions sweep_w;
  sweep_w.spec.detections_per_object = 8;
  std::size_t sw_dmax = 0;
  auto* sw_cmd = app.add_subcommand("sweep-workers", "latency as the worker count varies");
  add_workload_options(sw_cmd, sweep_w.spec);
  add_timing_options(sw_cmd, sweep_w.timing);
  sw_cmd->add_option("--n", sweep_w.n, "detection count")->capture_default_str();
  auto* sw_dmax_opt = sw_cmd->add_option("--d-max", sw_dmax, "detection capacity (default: n rounded up to k)");
  sw_cmd->add_option("--k", sweep_w.k, "reduce partitions per row")->capture_default_str();
  sw_cmd->add_option("--workers,-w", sweep_w.workers, "worker counts")->delimiter(',')->capture_default_str();
  sw_cmd->add_option("--theta", sweep_w.theta, "overlap threshold")->capture_default_str();
  sw_cmd->add_option("--tie-break", sweep_w.tie_break)->transform(CLI::CheckedTransformer(kTieBreaks));
  sw_cmd->add_option("--out,-o", sweep_w.output_csv, "CSV output (default stdout)");

  // compare
  CompareOptions compare;
  auto* cmp_cmd = app.add_subcommand("compare", "agreement between matrix NMS and greedy NMS");
  add_workload_options(cmp_cmd, compare.spec);
  cmp_cmd->add_option("inputs", compare.inputs, "detection files (default: synthetic instances)")
      ->check(CLI::ExistingFile);
  cmp_cmd->add_option("--d-max", compare.d_max, "capacity for file inputs")->capture_default_str();
  cmp_cmd->add_option("--instances", compare.instances, "synthetic instance count")->capture_default_str();
  cmp_cmd->add_option("--theta", compare.theta, "overlap threshold")->capture_default_str();
  cmp_cmd->add_option("--workers,-w", compare.workers, "worker threads")->capture_default_str();

  // plot
  PlotOptions plot;
  auto* plot_cmd = app.add_subcommand("plot", "render a sweep CSV as SVG");
  plot_cmd->add_option("csv", plot.input_csv, "sweep CSV")->required()->check(CLI::ExistingFile);
  plot_cmd->add_option("--kind", plot.kind, "latency_vs_n, latency_vs_k or map_reduce_split")
      ->required()
      ->transform(CLI::CheckedTransformer(kKinds));
  plot_cmd->add_option("--out,-o", plot.output_svg, "SVG output (default stdout)");

  CLI11_PARSE(app, argc, argv);

  if (*run_cmd) {
    if (*run_in_opt) run.input_format = run_in_fmt;
    if (*run_out_opt) run.output_format = run_out_fmt;
    return cmd_run(run, std::cout, std::cerr);
  }
  if (*gen_cmd) {
    if (*gen_fmt_opt) gen.output_format = gen_fmt;
    return cmd_gen(gen, std::cout, std::cerr);
  }
  if (*sn_cmd) {
    if (*fixed_opt) sweep_n.fixed_dmax = fixed_dmax;
    return cmd_sweep_n(sweep_n, std::cout, std::cerr);
  }
  if (*sk_cmd) return cmd_sweep_k(sweep_k, std::cout, std::cerr);
  if (*sw_cmd) {
    if (*sw_dmax_opt) sweep_w.d_max = sw_dmax;
    return cmd_sweep_workers(sweep_w, std::cout, std::cerr);
  }
  if (*cmp_cmd) return cmd_compare(compare, std::cout, std::cerr);
  if (*plot_cmd) return cmd_plot(plot, std::cout, std::cerr);
  return kExitError;
}
