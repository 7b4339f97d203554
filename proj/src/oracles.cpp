#include "parnms/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <tuple>
#include <vector>

#include "parnms/worker_pool.hpp"

namespace pnms {

namespace {

// Exact pixel-inclusive overlap, written out longhand.
std::int64_t overlap_pixels(const Detection& a, const Detection& b) {
  const std::int64_t left = std::max(a.x, b.x);
  const std::int64_t right = std::min(a.x + a.z, b.x + b.z);
  const std::int64_t top = std::max(a.y, b.y);
  const std::int64_t bottom = std::min(a.y + a.z, b.y + b.z);
  if (right < left || bottom < top) return 0;
  return (right - left + 1) * (bottom - top + 1);
}

std::int64_t window_area(const Detection& d) { return (d.z + 1) * (d.z + 1); }

// "ratio >= theta", using the same exact-integer form as the kernel contract.
bool overlaps_at_least(const Detection& lower, const Detection& upper, double theta) {
  return !(static_cast<double>(overlap_pixels(lower, upper)) < theta * static_cast<double>(window_area(upper)));
}

double ratio(const Detection& lower, const Detection& upper) {
  return static_cast<double>(overlap_pixels(lower, upper)) / static_cast<double>(window_area(upper));
}

// Index of the highest-scored unprocessed entry, lowest index on ties.
std::size_t pick_max(const std::vector<double>& scores, const std::vector<bool>& done) {
  std::size_t best = scores.size();
  for (std::size_t i = 0; i < scores.size(); ++i) {
    if (done[i]) continue;
    if (best == scores.size() || scores[i] > scores[best]) best = i;
  }
  return best;
}

using Key = std::tuple<std::int64_t, std::int64_t, std::int64_t, double>;

std::vector<Key> sorted_keys(std::span<const Detection> dets) {
  std::vector<Key> keys;
  keys.reserve(dets.size());
  for (const auto& d : dets) keys.emplace_back(d.x, d.y, d.z, d.s);
  std::sort(keys.begin(), keys.end());
  return keys;
}

std::size_t multiset_intersection(const std::vector<Key>& a, const std::vector<Key>& b) {
  std::vector<Key> common;
  std::set_intersection(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(common));
  return common.size();
}

}  // namespace

NmsResult brute_force_nms(const DetectionVector& d, double theta, TieBreak tie_break) {
  const auto dets = d.valid();
  NmsResult out;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    bool suppressed = false;
    for (std::size_t j = 0; j < dets.size() && !suppressed; ++j) {
      if (i == j) continue;
      bool higher = dets[j].s > dets[i].s;
      if (tie_break == TieBreak::by_index && dets[j].s == dets[i].s && j < i) higher = true;
      suppressed = higher && overlaps_at_least(dets[i], dets[j], theta);
    }
    if (suppressed) {
      ++out.suppressed_count;
    } else {
      out.survivors.push_back(dets[i]);
    }
  }
  return out;
}

NmsResult greedy_nms(const DetectionVector& d, double theta) {
  const auto dets = d.valid();
  std::vector<double> scores;
  for (const auto& det : dets) scores.push_back(det.s);
  std::vector<bool> done(dets.size(), false);
  std::vector<bool> kept(dets.size(), false);

  for (std::size_t sel = pick_max(scores, done); sel < dets.size(); sel = pick_max(scores, done)) {
    done[sel] = true;
    kept[sel] = true;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (!done[i] && overlaps_at_least(dets[i], dets[sel], theta)) done[i] = true;
    }
  }

  NmsResult out;
  for (std::size_t i = 0; i < dets.size(); ++i) {
    if (kept[i]) {
      out.survivors.push_back(dets[i]);
    } else {
      ++out.suppressed_count;
    }
  }
  return out;
}

DetectionVector soft_nms_rescore(const DetectionVector& d, SoftNmsMode mode, double theta, double sigma) {
  if (!(sigma > 0.0)) throw ConfigError("sigma must be positive");
  const auto dets = d.valid();
  std::vector<double> scores;
  for (const auto& det : dets) scores.push_back(det.s);
  std::vector<bool> done(dets.size(), false);

  for (std::size_t sel = pick_max(scores, done); sel < dets.size(); sel = pick_max(scores, done)) {
    done[sel] = true;
    for (std::size_t i = 0; i < dets.size(); ++i) {
      if (done[i]) continue;
      const double r = ratio(dets[i], dets[sel]);
      if (mode == SoftNmsMode::linear) {
        if (r >= theta) scores[i] *= 1.0 - r;
      } else {
        scores[i] *= std::exp(-(r * r) / sigma);
      }
    }
  }
  return d.with_scores(scores);
}

double survivor_jaccard(std::span<const Detection> a, std::span<const Detection> b) {
  if (a.empty() && b.empty()) return 1.0;
  const auto ka = sorted_keys(a);
  const auto kb = sorted_keys(b);
  const std::size_t common = multiset_intersection(ka, kb);
  return static_cast<double>(common) / static_cast<double>(ka.size() + kb.size() - common);
}

std::size_t survivor_symmetric_difference(std::span<const Detection> a, std::span<const Detection> b) {
  const auto ka = sorted_keys(a);
  const auto kb = sorted_keys(b);
  return ka.size() + kb.size() - 2 * multiset_intersection(ka, kb);
}

AgreementReport compare_methods(std::span<const DetectionVector> instances, double theta, std::size_t workers) {
  if (instances.empty()) throw ConfigError("compare_methods needs at least one instance");
  std::vector<double> jaccard(instances.size());
  std::vector<std::size_t> sym_diff(instances.size());

  WorkerPool pool(workers);
  pool.run([&](std::size_t worker) {
    const auto [begin, end] = block_range(instances.size(), pool.size(), worker);
    for (std::size_t t = begin; t < end; ++t) {
      const DetectionVector& inst = instances[t];
      NmsConfig cfg;
      cfg.theta = theta;
      cfg.d_max = std::max<std::size_t>(1, inst.capacity());
      cfg.k = 1;
      const NmsResult matrix_result = inst.capacity() == 0 ? NmsResult{} : run_nms(inst, cfg);
      const NmsResult greedy_result = greedy_nms(inst, theta);
      jaccard[t] = survivor_jaccard(matrix_result.survivors, greedy_result.survivors);
      sym_diff[t] = survivor_symmetric_difference(matrix_result.survivors, greedy_result.survivors);
    }
  });

  AgreementReport report;
  report.instances = instances.size();
  double sum = 0.0;
  for (std::size_t t = 0; t < instances.size(); ++t) {
    if (sym_diff[t] == 0) ++report.exact_matches;
    sum += jaccard[t];
    report.max_symmetric_diff = std::max(report.max_symmetric_diff, sym_diff[t]);
  }
  report.jaccard_mean = sum / static_cast<double>(instances.size());
  return report;
}

}  // namespace pnms
