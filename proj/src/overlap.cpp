#include "parnms/overlap.hpp"

namespace pnms {

std::int64_t intersection_area(const Detection& a, const Detection& b) noexcept {
  return intersection_extent(a.x, a.z, b.x, b.z) * intersection_extent(a.y, a.z, b.y, b.z);
}

OverlapOutcome suppression_test(const Detection& d_i, const Detection& d_j, double theta) noexcept {
  const std::int64_t area = (d_j.z + 1) * (d_j.z + 1);
  const std::int64_t inter = intersection_area(d_i, d_j);
  // Both operands are exact integers below 2^53; only theta * area rounds.
  const bool below = static_cast<double>(inter) < theta * static_cast<double>(area);
  return {below && d_j.z != 0, static_cast<double>(inter) / static_cast<double>(area)};
}

}  // namespace pnms
