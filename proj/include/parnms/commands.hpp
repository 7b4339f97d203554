#pragma once

// Subcommand implementations behind the `parnms` CLI. Each returns a process
// exit status and reports diagnostics on `err`:
//   0  success
//   1  input, configuration or I/O error
//   3  internal invariant violated (engine bug)

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "parnms/bench.hpp"
#include "parnms/engine.hpp"
#include "parnms/svg_chart.hpp"
#include "parnms/workload.hpp"

namespace pnms {

inline constexpr int kExitOk = 0;
inline constexpr int kExitError = 1;
inline constexpr int kExitInternal = 3;

struct RunOptions {
  std::filesystem::path input;
  std::optional<Format> input_format;  // default: from extension
  std::filesystem::path output;        // empty: do not write survivors
  std::optional<Format> output_format;
  NmsConfig config;
  std::uint64_t seed = 0;  // recorded in the printed record only
};

struct GenOptions {
  WorkloadSpec spec;
  std::size_t d_max = 0;  // 0: exactly spec.total()
  std::filesystem::path output;
  std::optional<Format> output_format;
};

struct SweepNOptions {
  WorkloadSpec spec;  // objects is derived from each n
  std::vector<std::size_t> n_values{512, 1024, 2048, 4096};
  std::vector<std::size_t> workers{1};
  std::size_t k = 32;
  double theta = 0.3;
  TieBreak tie_break = TieBreak::paper_faithful;
  std::optional<std::size_t> fixed_dmax;  // unset: d_max = next multiple of k >= n
  TimingOptions timing;
  std::filesystem::path output_csv;
};

struct SweepKOptions {
  WorkloadSpec spec;
  std::size_t n = 2895;
  std::size_t d_max = 4096;
  std::vector<std::size_t> k_values{1, 2, 4, 8, 16, 32, 64};
  std::vector<std::size_t> workers{1};
  double theta = 0.3;
  TieBreak tie_break = TieBreak::paper_faithful;
  TimingOptions timing;
  std::filesystem::path output_csv;
};

struct SweepWorkersOptions {
  WorkloadSpec spec;
  std::size_t n = 4096;
  std::optional<std::size_t> d_max;  // unset: next multiple of k >= n
  std::size_t k = 32;
  std::vector<std::size_t> workers{1, 2, 4, 8};
  double theta = 0.3;
  TieBreak tie_break = TieBreak::paper_faithful;
  TimingOptions timing;
  std::filesystem::path output_csv;
};

struct CompareOptions {
  std::vector<std::filesystem::path> inputs;  // empty: synthetic instances
  std::size_t d_max = 4096;                   // capacity for file inputs
  WorkloadSpec spec;
  std::size_t instances = 100;
  double theta = 0.3;
  std::size_t workers = 1;
};

struct PlotOptions {
  std::filesystem::path input_csv;
  ChartKind kind = ChartKind::latency_vs_n;
  std::filesystem::path output_svg;
};

int cmd_run(const RunOptions& opts, std::ostream& out, std::ostream& err);
int cmd_gen(const GenOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep_n(const SweepNOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep_k(const SweepKOptions& opts, std::ostream& out, std::ostream& err);
int cmd_sweep_workers(const SweepWorkersOptions& opts, std::ostream& out, std::ostream& err);
int cmd_compare(const CompareOptions& opts, std::ostream& out, std::ostream& err);
int cmd_plot(const PlotOptions& opts, std::ostream& out, std::ostream& err);

}  // namespace pnms
