#include <algorithm>
#include <random>

#include "doctest.h"
#include "parnms/engine.hpp"
#include "parnms/worker_pool.hpp"
#include "test_support.hpp"

using namespace pnms;

namespace {

NmsConfig make_config(double theta, std::size_t d_max, std::size_t k = 1, std::size_t workers = 1,
                      TieBreak tie = TieBreak::paper_faithful) {
  NmsConfig cfg;
  cfg.theta = theta;
  cfg.d_max = d_max;
  cfg.k = k;
  cfg.workers = workers;
  cfg.tie_break = tie;
  return cfg;
}

bool row_and(const SuppressionMatrix& b, std::size_t row) {
  for (std::size_t j = 0; j < b.dim(); ++j) {
    if (!b.test(row, j)) return false;
  }
  return true;
}

std::vector<std::size_t> divisors(std::size_t n) {
  std::vector<std::size_t> out;
  for (std::size_t k = 1; k <= n; ++k) {
    if (n % k == 0) out.push_back(k);
  }
  return out;
}

}  // namespace

TEST_CASE("config validation") {
  CHECK_NOTHROW(make_config(0.3, 8, 4).validate());
  CHECK_THROWS_AS(make_config(0.3, 8, 3).validate(), ConfigError);
  CHECK_THROWS_AS(make_config(-0.1, 8).validate(), ConfigError);
  CHECK_THROWS_AS(make_config(1.5, 8).validate(), ConfigError);
  CHECK_THROWS_AS(make_config(0.3, 0).validate(), ConfigError);
  CHECK_THROWS_AS(make_config(0.3, 8, 0).validate(), ConfigError);
  CHECK_THROWS_AS(make_config(0.3, 8, 1, 0).validate(), ConfigError);
  CHECK_THROWS_AS(make_config(0.3, 4096, 3).validate(), ConfigError);
  CHECK(parse_tie_break("by_index") == TieBreak::by_index);
  CHECK_THROWS_AS(parse_tie_break("random"), ConfigError);
}

TEST_CASE("matrix starts all ones and segment folds match bit tests") {
  SuppressionMatrix b(130);
  for (std::size_t i = 0; i < b.dim(); ++i) CHECK(row_and(b, i));
  b.set(5, 64, false);
  b.set(7, 129, false);
  CHECK_FALSE(b.test(5, 64));
  CHECK(b.segment_all_set(5, 0, 64));
  CHECK_FALSE(b.segment_all_set(5, 60, 70));
  CHECK(b.segment_all_set(5, 65, 130));
  CHECK_FALSE(b.segment_all_set(7, 0, 130));
  CHECK(b.segment_all_set(7, 0, 129));
  b.fill_ones();
  CHECK(b.test(5, 64));
}

TEST_CASE("map_phase examples") {
  SUBCASE("disjoint detections leave the matrix all ones") {
    const auto d = DetectionVector::from_detections(std::vector<Detection>{{0, 0, 10, 0.9}, {100, 100, 10, 0.8}}, 4);
    const auto b = map_phase(d, make_config(0.3, 4));
    CHECK(b == SuppressionMatrix(4));
  }
  SUBCASE("identical boxes clear exactly (0,1)") {
    const auto d = DetectionVector::from_detections(std::vector<Detection>{{10, 10, 20, 0.8}, {10, 10, 20, 0.9}}, 4);
    const auto b = map_phase(d, make_config(0.5, 4));
    SuppressionMatrix expected(4);
    expected.set(0, 1, false);
    CHECK(b == expected);
  }
  SUBCASE("single detection among padding") {
    const auto d = DetectionVector::from_detections(std::vector<Detection>{{3, 3, 5, 0.4}}, 4);
    // Padding rows pass the score gate against the valid entry, so theta = 0
    // clears their column-0 bits; the survivor mask ignores them anyway.
    SuppressionMatrix expected(4);
    for (std::size_t i = 1; i < 4; ++i) expected.set(i, 0, false);
    CHECK(map_phase(d, make_config(0.0, 4)) == expected);
    CHECK(map_phase(d, make_config(0.3, 4)) == SuppressionMatrix(4));
    CHECK(run_nms(d, make_config(0.0, 4)).survivors == std::vector<Detection>{{3, 3, 5, 0.4}});
  }
  SUBCASE("capacity mismatch") {
    const DetectionVector d(3);
    CHECK_THROWS_AS(map_phase(d, make_config(0.3, 4)), ConfigError);
  }
}

TEST_CASE("reduce_phase examples") {
  SUBCASE("any zero in a row kills it") {
    SuppressionMatrix b(4);
    b.set(2, 2, false);
    const auto v = reduce_phase(b, make_config(0.3, 4, 2));
    CHECK(v.test(0));
    CHECK(v.test(1));
    CHECK_FALSE(v.test(2));
    CHECK(v.test(3));
  }
  SUBCASE("all ones for any k") {
    for (std::size_t k : {1, 2, 4}) {
      const auto v = reduce_phase(SuppressionMatrix(4), make_config(0.3, 4, k));
      for (std::size_t i = 0; i < 4; ++i) CHECK(v.test(i));
    }
  }
  SUBCASE("identical-boxes matrix folds to [0,1,1,1]") {
    SuppressionMatrix b(4);
    b.set(0, 1, false);
    const auto v = reduce_phase(b, make_config(0.5, 4, 2));
    CHECK_FALSE(v.test(0));
    CHECK(v.test(1));
    CHECK(v.test(2));
    CHECK(v.test(3));
  }
  SUBCASE("k must divide d_max, dimension must match") {
    CHECK_THROWS_AS(reduce_phase(SuppressionMatrix(4), make_config(0.3, 4, 3)), ConfigError);
    CHECK_THROWS_AS(reduce_phase(SuppressionMatrix(4), make_config(0.3, 8, 2)), ConfigError);
  }
}

TEST_CASE("mask_survivors examples") {
  const auto d = DetectionVector::from_detections(std::vector<Detection>{{10, 10, 20, 0.9}, {10, 10, 20, 0.8}}, 4);
  SurvivorMask v(4);
  v.set(0, true);
  v.set(2, true);  // padding slot: excluded regardless
  v.set(3, true);
  const auto r = mask_survivors(d, v);
  REQUIRE(r.survivors.size() == 1);
  CHECK(r.survivors[0] == Detection{10, 10, 20, 0.9});
  CHECK(r.suppressed_count == 1);

  const auto three = DetectionVector::from_detections(std::vector<Detection>{{0, 0, 1, 1}, {9, 9, 1, 2}, {20, 20, 1, 3}}, 3);
  SurvivorMask all(3);
  for (std::size_t i = 0; i < 3; ++i) all.set(i, true);
  CHECK(mask_survivors(three, all).survivors == std::vector<Detection>(three.valid().begin(), three.valid().end()));

  CHECK(mask_survivors(DetectionVector(3), all).survivors.empty());
}

TEST_CASE("run_nms examples") {
  SUBCASE("identical boxes keep the higher score") {
    const auto d = DetectionVector::from_detections(std::vector<Detection>{{10, 10, 20, 0.9}, {10, 10, 20, 0.8}}, 4);
    const auto r = run_nms(d, make_config(0.5, 4, 2));
    CHECK(r.survivors == std::vector<Detection>{{10, 10, 20, 0.9}});
  }
  SUBCASE("three clusters of three") {
    const auto d = DetectionVector::from_detections(testing::toy_fixture(), 16);
    CHECK(run_nms(d, make_config(0.3, 16, 4)).survivors == testing::toy_maxima());
  }
  SUBCASE("disjoint input is the identity") {
    std::vector<Detection> dets;
    for (std::int64_t i = 0; i < 10; ++i) dets.push_back({i * 20, 0, 10, 0.05 * static_cast<double>(i + 1)});
    const auto d = DetectionVector::from_detections(dets, 10);
    CHECK(run_nms(d, make_config(0.1, 10, 5)).survivors == dets);
  }
  SUBCASE("theta = 0 keeps only the global maximum") {
    std::mt19937_64 rng(3);
    const auto dets = testing::random_detections(rng, 50);
    const auto d = DetectionVector::from_detections(dets, 50);
    const auto best = *std::max_element(dets.begin(), dets.end(), [](auto& a, auto& b) { return a.s < b.s; });
    CHECK(run_nms(d, make_config(0.0, 50, 5)).survivors == std::vector<Detection>{best});
  }
  SUBCASE("empty input") {
    const auto r = run_nms(DetectionVector(8), make_config(0.3, 8, 2));
    CHECK(r.survivors.empty());
    CHECK(r.suppressed_count == 0);
  }
}

TEST_CASE("tie behaviour") {
  const auto d = DetectionVector::from_detections(std::vector<Detection>{{5, 5, 10, 0.7}, {5, 5, 10, 0.7}}, 2);
  SUBCASE("paper_faithful: equal scores never suppress each other") {
    CHECK(run_nms(d, make_config(0.1, 2)).survivors.size() == 2);
  }
  SUBCASE("by_index: duplicates collapse to the lowest index") {
    const auto b = map_phase(d, make_config(0.1, 2, 1, 1, TieBreak::by_index));
    CHECK(b.test(0, 1));
    CHECK_FALSE(b.test(1, 0));
    CHECK(run_nms(d, make_config(0.1, 2, 1, 1, TieBreak::by_index)).survivors.size() == 1);
  }
}

TEST_CASE("work counters are exact") {
  std::mt19937_64 rng(11);
  const auto d = DetectionVector::from_detections(testing::random_detections(rng, 40), 48);
  for (std::size_t k : {1, 3, 16, 48}) {
    WorkCounters c;
    (void)run_nms(d, make_config(0.3, 48, k, 2), &c);
    CHECK(c.map_cells == 48u * 48u);
    CHECK(c.reduce_segments == 48u * k);
    CHECK(c.map_writes <= c.map_cells);
  }
}

TEST_CASE("property: every matrix cell matches a scalar re-evaluation") {
  std::mt19937_64 rng(99);
  for (int iter = 0; iter < 60; ++iter) {
    const bool ties = iter % 2 == 0;
    std::uniform_int_distribution<std::size_t> len(0, 70);
    const auto dets = testing::random_detections(rng, len(rng), {.score_ties = ties});
    const std::size_t d_max = dets.size() + 1 + static_cast<std::size_t>(iter % 9);
    const auto d = DetectionVector::from_detections(dets, d_max);
    const double theta = std::array{0.0, 0.1, 0.3, 0.5, 0.9, 1.0}[static_cast<std::size_t>(iter) % 6];
    for (TieBreak tie : {TieBreak::paper_faithful, TieBreak::by_index}) {
      const auto b = map_phase(d, make_config(theta, d_max, 1, 3, tie));
      std::size_t mismatches = 0;
      for (std::size_t i = 0; i < d_max; ++i) {
        CHECK(b.test(i, i));
        for (std::size_t j = 0; j < d_max; ++j) {
          const bool gate = d[i].s < d[j].s || (tie == TieBreak::by_index && d[i].s == d[j].s && i > j);
          const bool expected = gate ? testing::kernel_cell(d[i], d[j], theta) : true;
          mismatches += b.test(i, j) != expected;
        }
      }
      CHECK(mismatches == 0);
    }
  }
}

TEST_CASE("property: reduce equals a direct row AND for every k") {
  std::mt19937_64 rng(5);
  for (int iter = 0; iter < 40; ++iter) {
    const std::size_t dim = std::array<std::size_t, 5>{12, 64, 96, 128, 200}[static_cast<std::size_t>(iter) % 5];
    SuppressionMatrix b(dim);
    std::bernoulli_distribution sparse_zero(0.002);
    for (std::size_t i = 0; i < dim; ++i) {
      for (std::size_t j = 0; j < dim; ++j) {
        if (sparse_zero(rng)) b.set(i, j, false);
      }
    }
    for (std::size_t k : divisors(dim)) {
      const auto v = reduce_phase(b, make_config(0.3, dim, k, 1 + k % 4));
      for (std::size_t i = 0; i < dim; ++i) CHECK(v.test(i) == row_and(b, i));
    }
  }
}

TEST_CASE("property: determinism across worker counts") {
  std::mt19937_64 rng(17);
  for (int iter = 0; iter < 20; ++iter) {
    const auto dets = testing::random_detections(rng, 120, {.extent = 200});
    const auto d = DetectionVector::from_detections(dets, 128);
    NmsEngine reference(make_config(0.3, 128, 8, 1));
    const auto ref_result = reference.run(d);
    const SuppressionMatrix ref_matrix = reference.matrix();
    for (std::size_t workers : {2, 4, 8}) {
      NmsEngine engine(make_config(0.3, 128, 8, workers));
      CHECK(engine.run(d) == ref_result);
      CHECK(engine.matrix() == ref_matrix);
    }
  }
}

TEST_CASE("property: permutation invariance with distinct scores") {
  std::mt19937_64 rng(23);
  for (int iter = 0; iter < 30; ++iter) {
    auto dets = testing::random_detections(rng, 60);
    const auto d = DetectionVector::from_detections(dets, 60);
    auto base = run_nms(d, make_config(0.3, 60, 3)).survivors;
    std::shuffle(dets.begin(), dets.end(), rng);
    auto permuted = run_nms(DetectionVector::from_detections(dets, 60), make_config(0.3, 60, 3)).survivors;
    auto key = [](const Detection& a, const Detection& b) { return a.s < b.s; };
    std::sort(base.begin(), base.end(), key);
    std::sort(permuted.begin(), permuted.end(), key);
    CHECK(base == permuted);
  }
}

TEST_CASE("property: extra padding never changes survivors") {
  std::mt19937_64 rng(29);
  for (int iter = 0; iter < 30; ++iter) {
    const auto dets = testing::random_detections(rng, 30, {.score_ties = iter % 2 == 0});
    const auto small = run_nms(DetectionVector::from_detections(dets, 30), make_config(0.5, 30, 3));
    for (std::size_t d_max : {32, 64, 257}) {
      CHECK(run_nms(DetectionVector::from_detections(dets, d_max), make_config(0.5, d_max)) == small);
    }
  }
}

TEST_CASE("engine reuse resets the matrix between runs") {
  NmsEngine engine(make_config(0.5, 4, 2));
  const auto dup = DetectionVector::from_detections(std::vector<Detection>{{10, 10, 20, 0.8}, {10, 10, 20, 0.9}}, 4);
  const auto apart = DetectionVector::from_detections(std::vector<Detection>{{0, 0, 5, 0.8}, {50, 50, 5, 0.9}}, 4);
  CHECK(engine.run(dup).survivors.size() == 1);
  CHECK(engine.run(apart).survivors.size() == 2);
}

TEST_CASE("block_range partitions exactly") {
  for (std::size_t total : {0, 1, 7, 64, 100}) {
    for (std::size_t parts : {1, 2, 3, 8}) {
      std::size_t expect = 0;
      for (std::size_t p = 0; p < parts; ++p) {
        const auto [b, e] = block_range(total, parts, p);
        CHECK(b == expect);
        CHECK(e >= b);
        expect = e;
      }
      CHECK(expect == total);
    }
  }
}

TEST_CASE("worker pool runs every id and propagates exceptions") {
  WorkerPool pool(4);
  std::vector<int> hits(4, 0);
  for (int round = 0; round < 10; ++round) pool.run([&](std::size_t id) { ++hits[id]; });
  CHECK(hits == std::vector<int>(4, 10));
  CHECK_THROWS_AS(pool.run([](std::size_t id) {
    if (id == 2) throw std::runtime_error("boom");
  }),
                  std::runtime_error);
  pool.run([&](std::size_t id) { ++hits[id]; });
  CHECK(hits == std::vector<int>(4, 11));
  CHECK_THROWS_AS(WorkerPool(0), std::invalid_argument);
}
