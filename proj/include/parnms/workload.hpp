#pragma once

// Deterministic synthetic detection workloads.
//
// Generator algorithm (stable across platforms, so fixtures can be rebuilt
// from a seed in any language):
//
//   rng      = std::mt19937_64(seed), raw 64-bit outputs only
//   uniform  = below(n) = (uint128(rng()) * n) >> 64, an integer in [0, n)
//   jitter   = below(2 * j + 1) - j, an integer in [-j, j]
//
//   1. Object centers sit on a square lattice of pitch 2 * base_z, inset by
//      margin = ceil((base_z + jitter_z) / 2) + jitter_xy from each frame
//      edge, numbered row-major. The sites are shuffled with a partial
//      Fisher-Yates pass (for t in 0..objects: swap(site[t], site[t +
//      below(sites - t)])) and the first `objects` sites are taken in order.
//   2. For each object in order, detection 0 is the unjittered box. Every
//      further detection draws (dx, dy, dz) from the jitter ranges, redrawing
//      the all-zero offset whenever any jitter is nonzero.
//   3. Box: z = base_z + dz, x = cx - z / 2 + dx, y = cy - z / 2 + dy
//      (integer division).
//   4. Score (peak_decay): s = s_max - decay * |(dx, dy, dz)| - 1e-9 * ordinal,
//      s_max = 1, decay = 0.5 / (|(jitter_xy, jitter_xy, jitter_z)| + 1),
//      ordinal = global emission index. Each cluster peaks at its unjittered
//      box and all scores in a frame are distinct.

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

#include "parnms/detections.hpp"

namespace pnms {

class SpecError : public NmsError {
 public:
  using NmsError::NmsError;
};

enum class ScoreModel { peak_decay };

struct WorkloadSpec {
  std::size_t objects = 3;
  std::size_t detections_per_object = 3;
  std::int64_t frame_w = 1920;
  std::int64_t frame_h = 1080;
  std::int64_t base_z = 24;
  std::int64_t jitter_xy = 2;
  std::int64_t jitter_z = 2;
  ScoreModel score_model = ScoreModel::peak_decay;
  std::uint64_t seed = 1;

  std::size_t total() const noexcept { return objects * detections_per_object; }
};

/// Throws SpecError when the jitter could make neighbouring clusters touch
/// (requires base_z >= jitter_z + 2 * jitter_xy + 1), or when the lattice has
/// fewer sites than objects.
void validate_spec(const WorkloadSpec& spec);

/// Number of lattice sites available for object centers.
std::size_t lattice_capacity(const WorkloadSpec& spec);

/// Smallest square frame side whose lattice holds `objects` centers.
std::int64_t square_frame_for(const WorkloadSpec& spec);

/// All detections of one frame, grouped by object. d_max == 0 means exactly
/// spec.total(); otherwise CapacityError if the frame does not fit.
DetectionVector generate_frame(const WorkloadSpec& spec, std::size_t d_max = 0);

/// Frames 0..steps where frame t holds the detections of the first t objects
/// of one shared layout. Every frame has capacity spec.total().
std::vector<DetectionVector> coverage_sweep(const WorkloadSpec& spec, std::size_t steps);

/// Tiles rows x cols frames of size frame_w x frame_h into one vector,
/// frame f going to cell (f / cols, f % cols). d_max == 0 means the combined
/// count.
DetectionVector mosaic(std::span<const DetectionVector> frames, std::size_t rows, std::size_t cols,
                       std::int64_t frame_w, std::int64_t frame_h, std::size_t d_max = 0);

}  // namespace pnms
