#pragma once

#include <span>
#include <string>
#include <utility>
#include <vector>

#include "parnms/bench.hpp"

namespace pnms {

enum class ChartKind { latency_vs_n, latency_vs_k, map_reduce_split };

ChartKind parse_chart_kind(const std::string& name);

struct Series {
  std::string name;
  std::vector<std::pair<double, double>> points;
  bool dashed = false;
};

struct ChartSpec {
  std::string title;
  std::string x_label;
  std::string y_label;
  bool log_x = false;
  bool log_y = false;
};

/// Static line chart. Points are drawn in x order; non-positive values are
/// dropped on log axes.
std::string render_line_chart(const ChartSpec& spec, std::span<const Series> series);

/// Groups benchmark records into one chart of the given kind. Throws
/// SchemaError if `records` is empty.
std::string render_bench_chart(std::span<const BenchRecord> records, ChartKind kind);

}  // namespace pnms
