#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace pnms {

// Error hierarchy shared by every module. All of them are recoverable input or
// configuration problems; internal invariant violations use InternalError.
class NmsError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};
class ParseError : public NmsError {
 public:
  using NmsError::NmsError;
};
class ValidationError : public NmsError {
 public:
  using NmsError::NmsError;
};
class CapacityError : public NmsError {
 public:
  using NmsError::NmsError;
};
class ConfigError : public NmsError {
 public:
  using NmsError::NmsError;
};
class IoError : public NmsError {
 public:
  using NmsError::NmsError;
};
class InternalError : public NmsError {
 public:
  using NmsError::NmsError;
};

/// Largest admissible value of x + z (and y + z). Keeps every overlap product
/// (w * h, (z + 1)^2) far below 2^53 so double comparisons stay exact.
inline constexpr std::int64_t kMaxCoordinate = std::int64_t{1} << 20;

/// One candidate window: a square box with top-left corner (x, y), side z and
/// confidence s. A slot with z == 0 and s == 0 is padding.
struct Detection {
  std::int64_t x = 0;
  std::int64_t y = 0;
  std::int64_t z = 0;
  double s = 0.0;

  bool is_padding() const noexcept { return z == 0 && s == 0.0; }
  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Throws ValidationError unless `d` is a valid (non-padding) detection.
void validate_detection(const Detection& d);

/// Fixed-capacity detection vector. Slots [0, count) hold valid detections,
/// slots [count, capacity) are zero padding.
class DetectionVector {
 public:
  explicit DetectionVector(std::size_t d_max) : slots_(d_max) {}

  /// Validates every detection; throws CapacityError if dets.size() > d_max.
  static DetectionVector from_detections(std::span<const Detection> dets, std::size_t d_max);

  void push_back(const Detection& d);

  /// Copy of this vector with the valid prefix rescored. Scores may be zero,
  /// so the result is a scoring artifact rather than an NMS input.
  DetectionVector with_scores(std::span<const double> scores) const;

  std::size_t capacity() const noexcept { return slots_.size(); }
  std::size_t count() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }

  std::span<const Detection> slots() const noexcept { return slots_; }
  std::span<const Detection> valid() const noexcept { return {slots_.data(), count_}; }
  const Detection& operator[](std::size_t i) const { return slots_[i]; }

  friend bool operator==(const DetectionVector&, const DetectionVector&) = default;

 private:
  std::vector<Detection> slots_;
  std::size_t count_ = 0;
};

/// Survivors of one NMS run, in input order.
struct NmsResult {
  std::vector<Detection> survivors;
  std::size_t suppressed_count = 0;

  friend bool operator==(const NmsResult&, const NmsResult&) = default;
};

enum class Format { csv, json };

/// ".json" selects JSON, anything else CSV.
Format format_from_path(const std::filesystem::path& path);
Format parse_format(const std::string& name);

DetectionVector parse_detections(const std::string& text, Format format, std::size_t d_max);
std::string format_detections(std::span<const Detection> dets, Format format);

DetectionVector load_detections(const std::filesystem::path& path, Format format, std::size_t d_max);
void store_detections(std::span<const Detection> dets, const std::filesystem::path& path, Format format);
void store_result(const NmsResult& result, const std::filesystem::path& path, Format format);

}  // namespace pnms
