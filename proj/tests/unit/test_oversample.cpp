#include <cmath>

#include "../oracles/oracles.hpp"
#include "support.hpp"
#include "taxaug/error.hpp"
#include "taxaug/oversample.hpp"

using namespace taxaug;

namespace {

FeatureTable random_table(Rng& rng, const std::vector<int>& counts, int dims) {
  FeatureTable t(static_cast<std::size_t>(dims));
  for (std::size_t s = 0; s < counts.size(); ++s)
    for (int i = 0; i < counts[s]; ++i) {
      std::vector<double> v(static_cast<std::size_t>(dims));
      for (auto& x : v) x = 4.0 * rng.uniform01() - 2.0 + static_cast<double>(s);
      t.add({"s" + std::to_string(s) + "_" + std::to_string(i), {static_cast<int>(s), "sp" + std::to_string(s)}, v});
    }
  return t;
}

}  // namespace

TEST_SUITE("oversample") {
  TEST_CASE("knn agrees with brute force") {
    Rng rng(10);
    for (int trial = 0; trial < 20; ++trial) {
      const auto t = random_table(rng, {6, 9, 4}, 3);
      for (std::size_t q = 0; q < t.size(); q += 3) {
        CHECK(knn_indices(t, q, 3, true) == oracle::brute_knn(t, q, 3, true));
        CHECK(knn_indices(t, q, 5, false) == oracle::brute_knn(t, q, 5, false));
      }
    }
  }

  TEST_CASE("knn breaks distance ties by row index") {
    FeatureTable t(1);
    for (int i = 0; i < 4; ++i) t.add({"r" + std::to_string(i), {0, "a"}, {i == 0 ? 0.0 : (i % 2 ? 1.0 : -1.0)}});
    CHECK(knn_indices(t, 0, 3, true) == std::vector<std::size_t>{1, 2, 3});
    CHECK_THROWS_AS(knn_indices(t, 0, 4, true), Error);
  }

  TEST_CASE("synthetic rows lie on a segment between same-class neighbours") {
    Rng rng(20);
    const auto t = random_table(rng, {7, 2, 3}, 4);
    SmoteConfig cfg;
    cfg.seed = 5;
    std::vector<SmoteDraw> draws;
    const auto out = rebalance(t, cfg, &draws);
    REQUIRE(out.size() == t.size() + draws.size());
    for (std::size_t i = 0; i < draws.size(); ++i) {
      const auto& d = draws[i];
      const auto& row = out[t.size() + i];
      CHECK(row.provenance == Provenance::smote_synthetic);
      CHECK(t[d.base].label.species_id == row.label.species_id);
      CHECK(t[d.neighbor].label.species_id == row.label.species_id);
      CHECK(d.gap >= 0.0);
      CHECK(d.gap < 1.0);
      for (std::size_t j = 0; j < 4; ++j) {
        const double a = t[d.base].values[j], b = t[d.neighbor].values[j];
        CHECK(row.values[j] >= std::min(a, b) - 1e-9);
        CHECK(row.values[j] <= std::max(a, b) + 1e-9);
      }
    }
  }

  TEST_CASE("match_majority equalises classes; fixed tops up") {
    Rng rng(21);
    const auto t = random_table(rng, {7, 2, 3}, 2);
    SmoteConfig cfg;
    auto counts = [](const FeatureTable& ft) {
      std::vector<int> c(3, 0);
      for (const auto& r : ft.rows()) ++c[r.label.species_id];
      return c;
    };
    CHECK(counts(rebalance(t, cfg)) == std::vector<int>{7, 7, 7});
    cfg.target = SmoteTarget::fixed_per_class;
    cfg.per_class = 5;
    CHECK(counts(rebalance(t, cfg)) == std::vector<int>{7, 5, 5});
  }

  TEST_CASE("seeded runs are reproducible bit for bit") {
    Rng rng(22);
    const auto t = random_table(rng, {5, 2, 3}, 3);
    SmoteConfig cfg;
    cfg.seed = 99;
    CHECK(rebalance(t, cfg) == rebalance(t, cfg));
    SmoteConfig other = cfg;
    other.seed = 100;
    CHECK_FALSE(rebalance(t, cfg) == rebalance(t, other));
  }

  TEST_CASE("singleton classes follow the policy") {
    Rng rng(23);
    const auto t = random_table(rng, {4, 1}, 2);
    SmoteConfig cfg;
    CHECK_THROWS_AS(rebalance(t, cfg), Error);
    cfg.singletons = SingletonPolicy::skip;
    const auto out = rebalance(t, cfg);
    CHECK(out.size() == t.size());
  }

  TEST_CASE("k larger than the class is clamped") {
    Rng rng(24);
    const auto t = random_table(rng, {6, 2}, 2);
    SmoteConfig cfg;
    cfg.k_neighbors = 50;
    std::vector<SmoteDraw> draws;
    rebalance(t, cfg, &draws);
    CHECK(draws.size() == 4);
    for (const auto& d : draws) CHECK(d.base != d.neighbor);
  }
}
