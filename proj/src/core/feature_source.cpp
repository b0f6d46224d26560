#include "taxaug/feature_source.hpp"

#include "taxaug/augment.hpp"
#include "taxaug/error.hpp"

namespace taxaug {

std::optional<FeatureMaps> FeatureSource::maps(const SampleRecord&) const { return std::nullopt; }

RasterImage MockImageSource::image(const SampleRecord& r) const {
  RasterImage img = read_image(r.payload);
  if (r.provenance == Provenance::rotated) img = rotate_image(img, r.angle_deg);
  return img;
}

std::optional<FeatureMaps> MockImageSource::maps(const SampleRecord& r) const {
  return mock_extract(image(r), grid_, stats_);
}

std::vector<double> MockImageSource::pooled(const SampleRecord& r) const {
  return global_average_pool(*maps(r)).values;
}

std::string MockImageSource::describe() const {
  return "mock extractor (grid " + std::to_string(grid_) + ", " + std::to_string(mock_channel_count(stats_)) +
         " maps)";
}

TableSource::TableSource(FeatureTable table) : fixed_(std::move(table)) {}

const FeatureTable& TableSource::table_for(const std::string& path) const {
  if (fixed_) return *fixed_;
  std::lock_guard lock(mutex_);
  auto it = files_.find(path);
  if (it == files_.end())
    it = files_.emplace(path, std::make_shared<const FeatureTable>(read_feature_table(path))).first;
  return *it->second;
}

std::vector<double> TableSource::pooled(const SampleRecord& r) const {
  const auto& t = table_for(r.payload);
  const FeatureVector* fv = t.find(r.sample_id);
  if (!fv) throw Error(ErrorCode::data, "no feature row for sample '" + r.sample_id + "'");
  if (fv->label.species_name != r.label.species_name)
    throw Error(ErrorCode::data, "feature row '" + r.sample_id + "' is labelled '" + fv->label.species_name +
                                     "', manifest says '" + r.label.species_name + "'");
  return fv->values;
}

std::string TableSource::describe() const { return fixed_ ? "feature table" : "feature files"; }

std::vector<double> CachedSource::pooled(const SampleRecord& r) const {
  {
    std::lock_guard lock(mutex_);
    auto it = cache_.find(r.sample_id);
    if (it != cache_.end()) return it->second;
  }
  auto v = inner_.pooled(r);
  std::lock_guard lock(mutex_);
  return cache_.emplace(r.sample_id, std::move(v)).first->second;
}

}  // namespace taxaug
