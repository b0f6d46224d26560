#include "taxaug/oversample.hpp"

#include <algorithm>
#include <map>

#include "taxaug/error.hpp"
#include "taxaug/rng.hpp"

namespace taxaug {

namespace {

double squared_distance(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

std::vector<std::size_t> nearest(const FeatureTable& t, std::size_t query,
                                 const std::vector<std::size_t>& candidates, std::size_t k) {
  std::vector<std::pair<double, std::size_t>> scored;
  scored.reserve(candidates.size());
  for (std::size_t c : candidates)
    if (c != query) scored.emplace_back(squared_distance(t[query].values, t[c].values), c);
  if (k > scored.size())
    throw Error(ErrorCode::neighborhood, "asked for " + std::to_string(k) + " neighbours among " +
                                             std::to_string(scored.size()) + " candidates");
  std::partial_sort(scored.begin(), scored.begin() + static_cast<std::ptrdiff_t>(k), scored.end());
  std::vector<std::size_t> out(k);
  for (std::size_t i = 0; i < k; ++i) out[i] = scored[i].second;
  return out;
}

std::vector<std::size_t> class_rows(const FeatureTable& t, int species_id) {
  std::vector<std::size_t> rows;
  for (std::size_t i = 0; i < t.size(); ++i)
    if (t[i].label.species_id == species_id) rows.push_back(i);
  return rows;
}

}  // namespace

std::vector<std::size_t> knn_indices(const FeatureTable& t, std::size_t query, std::size_t k,
                                     bool same_class_only) {
  if (query >= t.size()) throw Error(ErrorCode::range, "query row out of range");
  std::vector<std::size_t> candidates;
  if (same_class_only) {
    candidates = class_rows(t, t[query].label.species_id);
  } else {
    candidates.resize(t.size());
    for (std::size_t i = 0; i < t.size(); ++i) candidates[i] = i;
  }
  return nearest(t, query, candidates, k);
}

SmoteResult smote_class(const FeatureTable& t, const SampleLabel& species, std::size_t n_synthetic,
                        const SmoteConfig& cfg) {
  if (cfg.k_neighbors < 1) throw Error(ErrorCode::range, "k_neighbors must be >= 1");
  SmoteResult result;
  if (n_synthetic == 0) return result;
  const auto members = class_rows(t, species.species_id);
  if (members.size() < 2)
    throw Error(ErrorCode::cannot_oversample, "species '" + species.species_name + "' has " +
                                                  std::to_string(members.size()) + " row(s); SMOTE needs 2");
  const std::size_t k = std::min(cfg.k_neighbors, members.size() - 1);
  std::vector<std::vector<std::size_t>> neighbors;
  neighbors.reserve(members.size());
  for (std::size_t m : members) neighbors.push_back(nearest(t, m, members, k));

  Rng rng(cfg.seed ^ static_cast<std::uint64_t>(species.species_id));
  result.rows.reserve(n_synthetic);
  result.draws.reserve(n_synthetic);
  for (std::size_t s = 0; s < n_synthetic; ++s) {
    const std::size_t slot = s % members.size();
    const std::size_t base = members[slot];
    const std::size_t nb = neighbors[slot][rng.below(k)];
    const double gap = rng.uniform01();
    const auto& x = t[base].values;
    const auto& y = t[nb].values;
    FeatureVector fv;
    fv.sample_id = "smote:" + species.species_name + ":" + std::to_string(s);
    fv.label = species;
    fv.provenance = Provenance::smote_synthetic;
    fv.values.resize(x.size());
    for (std::size_t d = 0; d < x.size(); ++d) fv.values[d] = x[d] + gap * (y[d] - x[d]);
    result.rows.push_back(std::move(fv));
    result.draws.push_back({base, nb, gap});
  }
  return result;
}

FeatureTable rebalance(const FeatureTable& t, const SmoteConfig& cfg, std::vector<SmoteDraw>* draws) {
  std::map<int, std::pair<SampleLabel, std::size_t>> classes;
  for (const auto& r : t.rows()) {
    auto& entry = classes.try_emplace(r.label.species_id, r.label, 0).first->second;
    ++entry.second;
  }
  std::size_t majority = 0;
  for (const auto& [id, entry] : classes) majority = std::max(majority, entry.second);
  const std::size_t target = cfg.target == SmoteTarget::match_majority ? majority : cfg.per_class;

  FeatureTable out = t;
  for (const auto& [id, entry] : classes) {
    const auto& [label, count] = entry;
    if (count >= target) continue;
    if (count < 2 && cfg.singletons == SingletonPolicy::skip) continue;
    SmoteResult res;
    try {
      res = smote_class(t, label, target - count, cfg);
    } catch (const Error& e) {
      throw Error(e.code(), "SMOTE for species '" + label.species_name + "': " + e.what());
    }
    for (auto& row : res.rows) out.add(std::move(row));
    if (draws) draws->insert(draws->end(), res.draws.begin(), res.draws.end());
  }
  return out;
}

}  // namespace taxaug
