#pragma once

// Matrix-based parallel non-maximum suppression.
//
// The map phase fills a D_max x D_max bit matrix B where bit (i, j) == 0 means
// "detection i is suppressed by detection j": it is cleared only when the
// score gate s_i < s_j passes and the overlap test fails. The reduce phase
// ANDs every row in k segments of width D_max / k into a survivor mask V, and
// masking the input with V yields the surviving detections in input order.
//
// Both phases run on a WorkerPool. Work is split by contiguous row blocks, so
// every 64-bit storage word has a single writer and results are bitwise
// identical for any worker count.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "parnms/detections.hpp"

namespace pnms {

class WorkerPool;

enum class TieBreak {
  paper_faithful,  // strict s_i < s_j: equal-score duplicates co-survive
  by_index,        // also gate s_i == s_j && i > j: duplicates collapse to the lowest index
};

TieBreak parse_tie_break(const std::string& name);
std::string to_string(TieBreak t);

struct NmsConfig {
  double theta = 0.3;
  std::size_t d_max = 4096;
  std::size_t k = 32;
  std::size_t workers = 1;
  TieBreak tie_break = TieBreak::paper_faithful;

  /// Throws ConfigError on theta outside [0, 1], zero sizes or d_max % k != 0.
  void validate() const;
};

struct WorkCounters {
  std::uint64_t map_cells = 0;
  std::uint64_t map_writes = 0;
  std::uint64_t reduce_segments = 0;

  friend bool operator==(const WorkCounters&, const WorkCounters&) = default;
};

/// Row-major bit matrix; every row starts on a 64-bit word boundary and the
/// unused tail bits of each row are kept at 1.
class SuppressionMatrix {
 public:
  static constexpr std::size_t kWordBits = 64;

  explicit SuppressionMatrix(std::size_t dim = 0);

  std::size_t dim() const noexcept { return dim_; }
  std::size_t words_per_row() const noexcept { return words_per_row_; }

  void fill_ones() noexcept;

  bool test(std::size_t row, std::size_t col) const noexcept {
    return (words_[row * words_per_row_ + col / kWordBits] >> (col % kWordBits)) & 1u;
  }
  void set(std::size_t row, std::size_t col, bool value) noexcept;

  std::span<std::uint64_t> row_words(std::size_t row) noexcept {
    return {words_.data() + row * words_per_row_, words_per_row_};
  }
  std::span<const std::uint64_t> row_words(std::size_t row) const noexcept {
    return {words_.data() + row * words_per_row_, words_per_row_};
  }

  /// True iff every bit in columns [lo, hi) of `row` is set.
  bool segment_all_set(std::size_t row, std::size_t lo, std::size_t hi) const noexcept;

  friend bool operator==(const SuppressionMatrix&, const SuppressionMatrix&) = default;

 private:
  std::size_t dim_ = 0;
  std::size_t words_per_row_ = 0;
  std::vector<std::uint64_t> words_;
};

/// Bit i set means detection i is a cluster representative.
class SurvivorMask {
 public:
  explicit SurvivorMask(std::size_t dim = 0) : dim_(dim), bits_(dim, 0) {}

  std::size_t size() const noexcept { return dim_; }
  bool test(std::size_t i) const noexcept { return bits_[i] != 0; }
  void set(std::size_t i, bool value) noexcept { bits_[i] = value ? 1 : 0; }

  friend bool operator==(const SurvivorMask&, const SurvivorMask&) = default;

 private:
  std::size_t dim_ = 0;
  // One byte per entry: neighbouring rows owned by different workers must
  // not share a storage unit.
  std::vector<std::uint8_t> bits_;
};

/// Reusable NMS pipeline bound to one configuration. Owns the worker pool and
/// the matrix buffer so repeated runs do not reallocate.
class NmsEngine {
 public:
  explicit NmsEngine(const NmsConfig& cfg);
  ~NmsEngine();

  NmsEngine(const NmsEngine&) = delete;
  NmsEngine& operator=(const NmsEngine&) = delete;

  const NmsConfig& config() const noexcept { return cfg_; }

  /// Resets the owned matrix to all ones, then evaluates every cell.
  /// Throws ConfigError if d.capacity() != d_max.
  const SuppressionMatrix& map_phase(const DetectionVector& d, WorkCounters* counters = nullptr);

  /// Folds each row of `b` in k segments. Throws ConfigError if b.dim() != d_max.
  SurvivorMask reduce_phase(const SuppressionMatrix& b, WorkCounters* counters = nullptr);

  NmsResult run(const DetectionVector& d, WorkCounters* counters = nullptr);

  const SuppressionMatrix& matrix() const noexcept { return matrix_; }

 private:
  NmsConfig cfg_;
  std::unique_ptr<WorkerPool> pool_;
  SuppressionMatrix matrix_;
  // Structure-of-arrays copy of the input, refreshed per map phase.
  std::vector<std::int64_t> lo_x_, lo_y_, hi_x_, hi_y_, side_;
  std::vector<double> score_, keep_limit_;
};

// One-shot conveniences that build a temporary engine.
SuppressionMatrix map_phase(const DetectionVector& d, const NmsConfig& cfg, WorkCounters* counters = nullptr);
SurvivorMask reduce_phase(const SuppressionMatrix& b, const NmsConfig& cfg, WorkCounters* counters = nullptr);
NmsResult mask_survivors(const DetectionVector& d, const SurvivorMask& v);
NmsResult run_nms(const DetectionVector& d, const NmsConfig& cfg, WorkCounters* counters = nullptr);

}  // namespace pnms
