#pragma once

#include <cstdint>
#include <vector>

#include "taxaug/features.hpp"

namespace taxaug {

enum class SmoteTarget { match_majority, fixed_per_class };
enum class SingletonPolicy { error, skip };

struct SmoteConfig {
  std::size_t k_neighbors = 5;
  SmoteTarget target = SmoteTarget::match_majority;
  std::size_t per_class = 0;  // fixed_per_class: every class is topped up to this many rows
  SingletonPolicy singletons = SingletonPolicy::error;
  std::uint64_t seed = 0;
};

/// k nearest rows to `query` by Euclidean distance, query excluded, ordered by
/// (distance, row index). With `same_class_only` the candidates are the rows
/// sharing the query's species id.
std::vector<std::size_t> knn_indices(const FeatureTable& t, std::size_t query, std::size_t k,
                                     bool same_class_only);

/// Where one synthetic row came from: row = base + gap * (neighbor - base).
struct SmoteDraw {
  std::size_t base = 0;      // table row index
  std::size_t neighbor = 0;  // table row index
  double gap = 0.0;
};

struct SmoteResult {
  std::vector<FeatureVector> rows;
  std::vector<SmoteDraw> draws;
};

/// Generates n_synthetic rows for one species. Bases cycle through the class
/// rows in table order; for each row the generator (seeded with
/// cfg.seed ^ species_id) first picks one of the k nearest same-class
/// neighbours uniformly, then the gap in [0, 1). k is clamped to class size - 1.
SmoteResult smote_class(const FeatureTable& t, const SampleLabel& species, std::size_t n_synthetic,
                        const SmoteConfig& cfg);

/// Appends synthetic rows per species (species-id order) until each class
/// reaches its target. Originals are kept in place.
FeatureTable rebalance(const FeatureTable& t, const SmoteConfig& cfg,
                       std::vector<SmoteDraw>* draws = nullptr);

}  // namespace taxaug
