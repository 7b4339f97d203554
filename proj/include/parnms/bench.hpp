#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "parnms/detections.hpp"
#include "parnms/engine.hpp"
#include "parnms/workload.hpp"

namespace pnms {

class SchemaError : public NmsError {
 public:
  using NmsError::NmsError;
};

/// One benchmark measurement. Latencies are medians over the measured
/// repetitions; warmup runs are excluded.
struct BenchRecord {
  std::size_t n = 0;
  std::size_t k = 0;
  std::size_t workers = 0;
  double theta = 0.0;
  double map_ms = 0.0;
  double reduce_ms = 0.0;
  double total_ms = 0.0;
  std::uint64_t map_cells = 0;
  std::uint64_t reduce_segments = 0;
  std::size_t survivors = 0;
  std::uint64_t seed = 0;

  friend bool operator==(const BenchRecord&, const BenchRecord&) = default;
};

inline constexpr const char* kBenchCsvHeader =
    "n,k,workers,theta,map_ms,reduce_ms,total_ms,map_cells,reduce_segments,survivors,seed";

std::string to_csv_row(const BenchRecord& r);
std::string to_csv(std::span<const BenchRecord> records);
std::vector<BenchRecord> parse_bench_csv(const std::string& text);
std::vector<BenchRecord> read_bench_csv(const std::filesystem::path& path);
void write_bench_csv(std::span<const BenchRecord> records, const std::filesystem::path& path);

struct TimingOptions {
  std::size_t repetitions = 5;
  std::size_t warmup = 3;
};

double median(std::vector<double> values);

/// Least-squares slope of log(y) against log(x).
double loglog_slope(std::span<const double> x, std::span<const double> y);

/// Times `engine` on `d`: warmup full runs, then `repetitions` runs each
/// split into map, reduce and masking. Throws InternalError if the work
/// counters deviate from d_max^2 / d_max*k or if survivors differ between
/// repetitions. `survivors_out` receives the survivors of the last run.
BenchRecord measure(NmsEngine& engine, const DetectionVector& d, const TimingOptions& timing, std::uint64_t seed,
                    NmsResult* survivors_out = nullptr);

/// Smallest multiple of k that is >= n (and >= k).
std::size_t round_up_to_multiple(std::size_t n, std::size_t k);

/// Synthetic frame with exactly n detections: ceil(n / per_object) objects
/// from `base`, growing the frame to a square that fits if needed, truncated
/// to the first n detections and padded to d_max.
DetectionVector workload_for_n(const WorkloadSpec& base, std::size_t n, std::size_t d_max);

}  // namespace pnms
