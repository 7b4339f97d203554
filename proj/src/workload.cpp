#include "parnms/workload.hpp"

#include <cmath>
#include <numeric>
#include <random>
#include <string>

namespace pnms {

namespace {

__extension__ using Uint128 = unsigned __int128;

class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t below(std::uint64_t n) {
    return static_cast<std::uint64_t>((static_cast<Uint128>(engine_()) * n) >> 64);
  }
  std::int64_t jitter(std::int64_t j) {
    return static_cast<std::int64_t>(below(static_cast<std::uint64_t>(2 * j + 1))) - j;
  }

 private:
  std::mt19937_64 engine_;
};

std::int64_t pitch(const WorkloadSpec& spec) { return 2 * spec.base_z; }

std::int64_t margin(const WorkloadSpec& spec) {
  return (spec.base_z + spec.jitter_z + 1) / 2 + spec.jitter_xy;
}

std::int64_t sites_along(std::int64_t extent, const WorkloadSpec& spec) {
  const std::int64_t usable = extent - 2 * margin(spec);
  return usable < 0 ? 0 : usable / pitch(spec) + 1;
}

struct Center {
  std::int64_t x, y;
};

std::vector<Center> place_centers(const WorkloadSpec& spec, Rng& rng) {
  const std::int64_t cols = sites_along(spec.frame_w, spec);
  const std::size_t sites = lattice_capacity(spec);
  std::vector<std::size_t> order(sites);
  std::iota(order.begin(), order.end(), std::size_t{0});
  for (std::size_t t = 0; t < spec.objects; ++t) {
    std::swap(order[t], order[t + rng.below(sites - t)]);
  }
  std::vector<Center> centers;
  centers.reserve(spec.objects);
  for (std::size_t t = 0; t < spec.objects; ++t) {
    const auto site = static_cast<std::int64_t>(order[t]);
    centers.push_back({margin(spec) + (site % cols) * pitch(spec), margin(spec) + (site / cols) * pitch(spec)});
  }
  return centers;
}

// Emits the full layout, object by object.
std::vector<Detection> layout(const WorkloadSpec& spec) {
  validate_spec(spec);
  Rng rng(spec.seed);
  const auto centers = place_centers(spec, rng);

  const double max_norm = std::sqrt(static_cast<double>(2 * spec.jitter_xy * spec.jitter_xy +
                                                        spec.jitter_z * spec.jitter_z));
  const double decay = 0.5 / (max_norm + 1.0);
  constexpr double kPeak = 1.0;
  constexpr double kOrdinalStep = 1e-9;
  const bool any_jitter = spec.jitter_xy > 0 || spec.jitter_z > 0;

  std::vector<Detection> out;
  out.reserve(spec.total());
  for (const Center& c : centers) {
    for (std::size_t p = 0; p < spec.detections_per_object; ++p) {
      std::int64_t dx = 0, dy = 0, dz = 0;
      if (p > 0 && any_jitter) {
        do {
          dx = rng.jitter(spec.jitter_xy);
          dy = rng.jitter(spec.jitter_xy);
          dz = rng.jitter(spec.jitter_z);
        } while (dx == 0 && dy == 0 && dz == 0);
      }
      const std::int64_t z = spec.base_z + dz;
      const double norm = std::sqrt(static_cast<double>(dx * dx + dy * dy + dz * dz));
      const double s = kPeak - decay * norm - kOrdinalStep * static_cast<double>(out.size());
      out.push_back({c.x - z / 2 + dx, c.y - z / 2 + dy, z, s});
    }
  }
  return out;
}

}  // namespace

void validate_spec(const WorkloadSpec& spec) {
  if (spec.base_z < 1) throw SpecError("base_z must be >= 1");
  if (spec.jitter_xy < 0 || spec.jitter_z < 0) throw SpecError("jitter must be non-negative");
  if (spec.frame_w < 1 || spec.frame_h < 1) throw SpecError("frame dimensions must be positive");
  if (spec.base_z < spec.jitter_z + 2 * spec.jitter_xy + 1) {
    throw SpecError("jitter too large: clusters 2*base_z apart could overlap "
                    "(need base_z >= jitter_z + 2*jitter_xy + 1)");
  }
  if (spec.frame_w > kMaxCoordinate || spec.frame_h > kMaxCoordinate) {
    throw SpecError("frame exceeds coordinate range");
  }
  if (spec.objects > lattice_capacity(spec)) {
    throw SpecError("cannot place " + std::to_string(spec.objects) + " objects 2*base_z apart in a " +
                    std::to_string(spec.frame_w) + "x" + std::to_string(spec.frame_h) + " frame (room for " +
                    std::to_string(lattice_capacity(spec)) + ")");
  }
}

std::size_t lattice_capacity(const WorkloadSpec& spec) {
  return static_cast<std::size_t>(sites_along(spec.frame_w, spec) * sites_along(spec.frame_h, spec));
}

std::int64_t square_frame_for(const WorkloadSpec& spec) {
  auto per_side = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(spec.objects))));
  while (per_side * per_side < static_cast<std::int64_t>(spec.objects)) ++per_side;
  return 2 * margin(spec) + std::max<std::int64_t>(per_side - 1, 0) * pitch(spec);
}

DetectionVector generate_frame(const WorkloadSpec& spec, std::size_t d_max) {
  const auto dets = layout(spec);
  return DetectionVector::from_detections(dets, d_max == 0 ? dets.size() : d_max);
}

std::vector<DetectionVector> coverage_sweep(const WorkloadSpec& spec, std::size_t steps) {
  if (steps > spec.objects) throw SpecError("steps must not exceed the object count");
  const auto dets = layout(spec);
  std::vector<DetectionVector> frames;
  frames.reserve(steps + 1);
  for (std::size_t t = 0; t <= steps; ++t) {
    const std::span<const Detection> prefix(dets.data(), t * spec.detections_per_object);
    frames.push_back(DetectionVector::from_detections(prefix, spec.total()));
  }
  return frames;
}

DetectionVector mosaic(std::span<const DetectionVector> frames, std::size_t rows, std::size_t cols,
                       std::int64_t frame_w, std::int64_t frame_h, std::size_t d_max) {
  if (frames.size() != rows * cols) {
    throw SpecError("mosaic needs rows*cols = " + std::to_string(rows * cols) + " frames, got " +
                    std::to_string(frames.size()));
  }
  std::vector<Detection> all;
  for (std::size_t f = 0; f < frames.size(); ++f) {
    const auto off_x = static_cast<std::int64_t>(f % cols) * frame_w;
    const auto off_y = static_cast<std::int64_t>(f / cols) * frame_h;
    for (Detection d : frames[f].valid()) {
      d.x += off_x;
      d.y += off_y;
      all.push_back(d);
    }
  }
  return DetectionVector::from_detections(all, d_max == 0 ? all.size() : d_max);
}

}  // namespace pnms
