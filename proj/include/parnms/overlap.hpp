#pragma once

#include <cstdint>

#include "parnms/detections.hpp"

namespace pnms {

/// Inclusive 1D overlap of [a_lo, a_lo + a_len] and [b_lo, b_lo + b_len],
/// clamped at zero: max(0, min(a_lo + a_len, b_lo + b_len) - max(a_lo, b_lo) + 1).
constexpr std::int64_t intersection_extent(std::int64_t a_lo, std::int64_t a_len, std::int64_t b_lo,
                                           std::int64_t b_len) noexcept {
  const std::int64_t hi = (a_lo + a_len < b_lo + b_len) ? a_lo + a_len : b_lo + b_len;
  const std::int64_t lo = a_lo > b_lo ? a_lo : b_lo;
  const std::int64_t ext = hi - lo + 1;
  return ext > 0 ? ext : 0;
}

struct OverlapOutcome {
  bool keep = true;     // d_i survives the comparison against d_j
  double ratio = 0.0;   // intersection / (z_j + 1)^2, in [0, 1]
};

/// Pairwise test for one matrix cell. The score gate (s_i < s_j) is the
/// caller's responsibility. keep = ratio < theta && z_j != 0.
OverlapOutcome suppression_test(const Detection& d_i, const Detection& d_j, double theta) noexcept;

/// Exact integer numerator w * h of the ratio above.
std::int64_t intersection_area(const Detection& a, const Detection& b) noexcept;

}  // namespace pnms
