#include "parnms/bench.hpp"

#include <algorithm>
#include <array>
#include <charconv>
#include <chrono>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string_view>

namespace pnms {

namespace {

using Clock = std::chrono::steady_clock;

double ms_between(Clock::time_point a, Clock::time_point b) {
  return std::chrono::duration<double, std::milli>(b - a).count();
}

std::string fmt_real(double v) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  if (ec != std::errc{}) throw InternalError("cannot format number");
  return std::string(buf.data(), ptr);
}

template <typename T>
T parse_field(std::string_view field, const char* name, std::size_t line) {
  T v{};
  auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
  if (ec != std::errc{} || ptr != field.data() + field.size() || field.empty()) {
    throw SchemaError("line " + std::to_string(line) + ": bad value for '" + name + "'");
  }
  return v;
}

}  // namespace

std::string to_csv_row(const BenchRecord& r) {
  std::string out;
  out += std::to_string(r.n) + ',' + std::to_string(r.k) + ',' + std::to_string(r.workers) + ',';
  out += fmt_real(r.theta) + ',' + fmt_real(r.map_ms) + ',' + fmt_real(r.reduce_ms) + ',' + fmt_real(r.total_ms) + ',';
  out += std::to_string(r.map_cells) + ',' + std::to_string(r.reduce_segments) + ',';
  out += std::to_string(r.survivors) + ',' + std::to_string(r.seed);
  return out;
}

std::string to_csv(std::span<const BenchRecord> records) {
  std::string out = std::string(kBenchCsvHeader) + '\n';
  for (const auto& r : records) out += to_csv_row(r) + '\n';
  return out;
}

std::vector<BenchRecord> parse_bench_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  bool header = false;
  std::vector<BenchRecord> out;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (!header) {
      if (line != kBenchCsvHeader) throw SchemaError("unexpected CSV header: '" + line + "'");
      header = true;
      continue;
    }
    std::vector<std::string_view> f;
    std::string_view rest(line);
    for (std::size_t pos; (pos = rest.find(',')) != std::string_view::npos; rest.remove_prefix(pos + 1)) {
      f.push_back(rest.substr(0, pos));
    }
    f.push_back(rest);
    if (f.size() != 11) throw SchemaError("line " + std::to_string(lineno) + ": expected 11 columns");
    BenchRecord r;
    r.n = parse_field<std::size_t>(f[0], "n", lineno);
    r.k = parse_field<std::size_t>(f[1], "k", lineno);
    r.workers = parse_field<std::size_t>(f[2], "workers", lineno);
    r.theta = parse_field<double>(f[3], "theta", lineno);
    r.map_ms = parse_field<double>(f[4], "map_ms", lineno);
    r.reduce_ms = parse_field<double>(f[5], "reduce_ms", lineno);
    r.total_ms = parse_field<double>(f[6], "total_ms", lineno);
    r.map_cells = parse_field<std::uint64_t>(f[7], "map_cells", lineno);
    r.reduce_segments = parse_field<std::uint64_t>(f[8], "reduce_segments", lineno);
    r.survivors = parse_field<std::size_t>(f[9], "survivors", lineno);
    r.seed = parse_field<std::uint64_t>(f[10], "seed", lineno);
    out.push_back(r);
  }
  if (!header) throw SchemaError("empty benchmark CSV");
  return out;
}

std::vector<BenchRecord> read_bench_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_bench_csv(buf.str());
}

void write_bench_csv(std::span<const BenchRecord> records, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open '" + path.string() + "' for writing");
  out << to_csv(records);
  if (!out.flush()) throw IoError("write to '" + path.string() + "' failed");
}

double median(std::vector<double> values) {
  if (values.empty()) throw InternalError("median of an empty sample");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  if (values.size() % 2 == 1) return values[mid];
  const double upper = values[mid];
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double loglog_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw InternalError("slope needs >= 2 paired points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  return sxy / sxx;
}

BenchRecord measure(NmsEngine& engine, const DetectionVector& d, const TimingOptions& timing, std::uint64_t seed,
                    NmsResult* survivors_out) {
  if (timing.repetitions == 0) throw ConfigError("repetitions must be positive");
  const NmsConfig& cfg = engine.config();
  for (std::size_t w = 0; w < timing.warmup; ++w) (void)engine.run(d);

  std::vector<double> map_ms, reduce_ms, total_ms;
  NmsResult first;
  for (std::size_t r = 0; r < timing.repetitions; ++r) {
    WorkCounters counters;
    const auto t0 = Clock::now();
    const SuppressionMatrix& b = engine.map_phase(d, &counters);
    const auto t1 = Clock::now();
    const SurvivorMask v = engine.reduce_phase(b, &counters);
    const auto t2 = Clock::now();
    NmsResult result = mask_survivors(d, v);
    const auto t3 = Clock::now();

    const auto dim = static_cast<std::uint64_t>(cfg.d_max);
    if (counters.map_cells != dim * dim || counters.reduce_segments != dim * cfg.k) {
      throw InternalError("work counters deviate from d_max^2 / d_max*k");
    }
    if (r == 0) {
      first = std::move(result);
    } else if (result != first) {
      throw InternalError("survivors differ between repetitions");
    }
    map_ms.push_back(ms_between(t0, t1));
    reduce_ms.push_back(ms_between(t1, t2));
    total_ms.push_back(ms_between(t0, t3));
  }

  BenchRecord rec;
  rec.n = d.count();
  rec.k = cfg.k;
  rec.workers = cfg.workers;
  rec.theta = cfg.theta;
  rec.map_ms = median(map_ms);
  rec.reduce_ms = median(reduce_ms);
  rec.total_ms = median(total_ms);
  rec.map_cells = static_cast<std::uint64_t>(cfg.d_max) * cfg.d_max;
  rec.reduce_segments = static_cast<std::uint64_t>(cfg.d_max) * cfg.k;
  rec.survivors = first.survivors.size();
  rec.seed = seed;
  if (survivors_out) *survivors_out = std::move(first);
  return rec;
}

std::size_t round_up_to_multiple(std::size_t n, std::size_t k) {
  if (k == 0) throw ConfigError("k must be positive");
  const std::size_t m = (n + k - 1) / k * k;
  return m == 0 ? k : m;
}

DetectionVector workload_for_n(const WorkloadSpec& base, std::size_t n, std::size_t d_max) {
  if (n > d_max) throw CapacityError("n=" + std::to_string(n) + " exceeds d_max=" + std::to_string(d_max));
  if (base.detections_per_object == 0) throw SpecError("detections_per_object must be positive");
  WorkloadSpec spec = base;
  spec.objects = (n + spec.detections_per_object - 1) / spec.detections_per_object;
  if (lattice_capacity(spec) < spec.objects) {
    const std::int64_t side = square_frame_for(spec);
    spec.frame_w = std::max(spec.frame_w, side);
    spec.frame_h = std::max(spec.frame_h, side);
  }
  const DetectionVector full = generate_frame(spec);
  return DetectionVector::from_detections(full.valid().first(n), d_max);
}

}  // namespace pnms
