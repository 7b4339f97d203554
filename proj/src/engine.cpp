#include "parnms/engine.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>

#include "parnms/worker_pool.hpp"

namespace pnms {

TieBreak parse_tie_break(const std::string& name) {
  if (name == "paper_faithful") return TieBreak::paper_faithful;
  if (name == "by_index") return TieBreak::by_index;
  throw ConfigError("unknown tie-break policy '" + name + "' (expected paper_faithful or by_index)");
}

std::string to_string(TieBreak t) { return t == TieBreak::paper_faithful ? "paper_faithful" : "by_index"; }

void NmsConfig::validate() const {
  if (!(theta >= 0.0 && theta <= 1.0)) throw ConfigError("theta must lie in [0, 1]");
  if (d_max == 0) throw ConfigError("d_max must be positive");
  if (k == 0) throw ConfigError("k must be positive");
  if (workers == 0) throw ConfigError("workers must be positive");
  if (d_max % k != 0) {
    throw ConfigError("k=" + std::to_string(k) + " does not divide d_max=" + std::to_string(d_max));
  }
}

// ---------------------------------------------------------------------------

SuppressionMatrix::SuppressionMatrix(std::size_t dim)
    : dim_(dim), words_per_row_((dim + kWordBits - 1) / kWordBits), words_(dim * words_per_row_) {
  fill_ones();
}

void SuppressionMatrix::fill_ones() noexcept { std::fill(words_.begin(), words_.end(), ~std::uint64_t{0}); }

void SuppressionMatrix::set(std::size_t row, std::size_t col, bool value) noexcept {
  std::uint64_t& w = words_[row * words_per_row_ + col / kWordBits];
  const std::uint64_t bit = std::uint64_t{1} << (col % kWordBits);
  w = value ? (w | bit) : (w & ~bit);
}

bool SuppressionMatrix::segment_all_set(std::size_t row, std::size_t lo, std::size_t hi) const noexcept {
  if (lo >= hi) return true;
  const auto words = row_words(row);
  const std::size_t first = lo / kWordBits;
  const std::size_t last = (hi - 1) / kWordBits;
  for (std::size_t w = first; w <= last; ++w) {
    std::uint64_t mask = ~std::uint64_t{0};
    if (w == first) mask &= ~std::uint64_t{0} << (lo % kWordBits);
    if (w == last && hi % kWordBits != 0) mask &= ~std::uint64_t{0} >> (kWordBits - hi % kWordBits);
    if ((words[w] & mask) != mask) return false;
  }
  return true;
}

// ---------------------------------------------------------------------------

NmsEngine::NmsEngine(const NmsConfig& cfg) : cfg_(cfg) {
  cfg_.validate();
  pool_ = std::make_unique<WorkerPool>(cfg_.workers);
  matrix_ = SuppressionMatrix(cfg_.d_max);
  const std::size_t n = cfg_.d_max;
  lo_x_.resize(n);
  lo_y_.resize(n);
  hi_x_.resize(n);
  hi_y_.resize(n);
  side_.resize(n);
  score_.resize(n);
  keep_limit_.resize(n);
}

NmsEngine::~NmsEngine() = default;

const SuppressionMatrix& NmsEngine::map_phase(const DetectionVector& d, WorkCounters* counters) {
  const std::size_t n = cfg_.d_max;
  if (d.capacity() != n) {
    throw ConfigError("detection vector capacity " + std::to_string(d.capacity()) + " != d_max " +
                      std::to_string(n));
  }
  matrix_.fill_ones();

  const auto slots = d.slots();
  for (std::size_t j = 0; j < n; ++j) {
    const Detection& s = slots[j];
    lo_x_[j] = s.x;
    lo_y_[j] = s.y;
    hi_x_[j] = s.x + s.z;
    hi_y_[j] = s.y + s.z;
    side_[j] = s.z;
    score_[j] = s.s;
    // theta * (z_j + 1)^2: the cell keeps its bit iff w * h is below this.
    keep_limit_[j] = cfg_.theta * static_cast<double>((s.z + 1) * (s.z + 1));
  }

  const bool by_index = cfg_.tie_break == TieBreak::by_index;
  std::atomic<std::uint64_t> writes{0};

  pool_->run([&](std::size_t worker) {
    const auto [row_begin, row_end] = block_range(n, pool_->size(), worker);
    std::uint64_t local_writes = 0;
    for (std::size_t i = row_begin; i < row_end; ++i) {
      const double si = score_[i];
      const std::int64_t lxi = lo_x_[i], lyi = lo_y_[i], hxi = hi_x_[i], hyi = hi_y_[i];
      auto row = matrix_.row_words(i);
      for (std::size_t w = 0; w < row.size(); ++w) {
        const std::size_t j0 = w * SuppressionMatrix::kWordBits;
        const std::size_t j1 = std::min(n, j0 + SuppressionMatrix::kWordBits);
        std::uint64_t cleared = 0;
        for (std::size_t j = j0; j < j1; ++j) {
          const bool gate = si < score_[j] || (by_index && si == score_[j] && i > j);
          const std::int64_t wx = std::max<std::int64_t>(0, std::min(hxi, hi_x_[j]) - std::max(lxi, lo_x_[j]) + 1);
          const std::int64_t wy = std::max<std::int64_t>(0, std::min(hyi, hi_y_[j]) - std::max(lyi, lo_y_[j]) + 1);
          const bool keep = static_cast<double>(wx * wy) < keep_limit_[j] && side_[j] != 0;
          cleared |= static_cast<std::uint64_t>(gate && !keep) << (j - j0);
          local_writes += gate;
        }
        row[w] &= ~cleared;
      }
    }
    writes.fetch_add(local_writes, std::memory_order_relaxed);
  });

  if (counters) {
    counters->map_cells += static_cast<std::uint64_t>(n) * n;
    counters->map_writes += writes.load();
  }
  return matrix_;
}

SurvivorMask NmsEngine::reduce_phase(const SuppressionMatrix& b, WorkCounters* counters) {
  const std::size_t n = cfg_.d_max;
  if (b.dim() != n) {
    throw ConfigError("matrix dimension " + std::to_string(b.dim()) + " != d_max " + std::to_string(n));
  }
  const std::size_t k = cfg_.k;
  const std::size_t width = n / k;
  SurvivorMask v(n);

  pool_->run([&](std::size_t worker) {
    const auto [row_begin, row_end] = block_range(n, pool_->size(), worker);
    for (std::size_t i = row_begin; i < row_end; ++i) {
      // First segment seeds V[i]; the remaining k - 1 fold into it.
      bool acc = b.segment_all_set(i, 0, width);
      for (std::size_t seg = 1; seg < k; ++seg) {
        const bool part = b.segment_all_set(i, seg * width, (seg + 1) * width);
        acc = acc && part;
      }
      v.set(i, acc);
    }
  });

  if (counters) counters->reduce_segments += static_cast<std::uint64_t>(n) * k;
  return v;
}

NmsResult NmsEngine::run(const DetectionVector& d, WorkCounters* counters) {
  const SuppressionMatrix& b = map_phase(d, counters);
  return mask_survivors(d, reduce_phase(b, counters));
}

// ---------------------------------------------------------------------------

SuppressionMatrix map_phase(const DetectionVector& d, const NmsConfig& cfg, WorkCounters* counters) {
  NmsEngine engine(cfg);
  return engine.map_phase(d, counters);
}

SurvivorMask reduce_phase(const SuppressionMatrix& b, const NmsConfig& cfg, WorkCounters* counters) {
  NmsEngine engine(cfg);
  return engine.reduce_phase(b, counters);
}

NmsResult mask_survivors(const DetectionVector& d, const SurvivorMask& v) {
  if (v.size() != d.capacity()) throw ConfigError("survivor mask size does not match detection capacity");
  NmsResult out;
  for (std::size_t i = 0; i < d.count(); ++i) {
    if (d[i].z != 0 && v.test(i)) {
      out.survivors.push_back(d[i]);
    } else {
      ++out.suppressed_count;
    }
  }
  return out;
}

NmsResult run_nms(const DetectionVector& d, const NmsConfig& cfg, WorkCounters* counters) {
  NmsEngine engine(cfg);
  return engine.run(d, counters);
}

}  // namespace pnms
