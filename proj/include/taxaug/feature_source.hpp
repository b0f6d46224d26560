#pragma once

#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "taxaug/dataset.hpp"
#include "taxaug/features.hpp"

namespace taxaug {

/// Where pooled descriptors for manifest records come from.
class FeatureSource {
 public:
  virtual ~FeatureSource() = default;

  /// Pooled descriptor of a record. Rotated records are resolved through
  /// their own id and angle.
  virtual std::vector<double> pooled(const SampleRecord& r) const = 0;

  /// Spatial maps, when the source has them (image-backed sources only).
  virtual std::optional<FeatureMaps> maps(const SampleRecord& r) const;

  virtual std::string describe() const = 0;
};

/// Loads the record's image, rotates it for rotated records, runs the mock
/// extractor and pools.
class MockImageSource : public FeatureSource {
 public:
  explicit MockImageSource(int grid = 7, unsigned stats = kStatAll) : grid_(grid), stats_(stats) {}

  std::vector<double> pooled(const SampleRecord& r) const override;
  std::optional<FeatureMaps> maps(const SampleRecord& r) const override;
  std::string describe() const override;

  RasterImage image(const SampleRecord& r) const;

 private:
  int grid_;
  unsigned stats_;
};

/// Looks records up by sample id in one or more feature files. Files are
/// loaded on first use and shared.
class TableSource : public FeatureSource {
 public:
  /// Every record is resolved in this table regardless of its payload.
  explicit TableSource(FeatureTable table);
  /// Records resolve in the file named by their payload.
  TableSource() = default;

  std::vector<double> pooled(const SampleRecord& r) const override;
  std::string describe() const override;

 private:
  const FeatureTable& table_for(const std::string& path) const;

  std::optional<FeatureTable> fixed_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::shared_ptr<const FeatureTable>> files_;
};

/// Thread-safe memo over another source, keyed by sample id.
class CachedSource : public FeatureSource {
 public:
  explicit CachedSource(const FeatureSource& inner) : inner_(inner) {}

  std::vector<double> pooled(const SampleRecord& r) const override;
  std::optional<FeatureMaps> maps(const SampleRecord& r) const override { return inner_.maps(r); }
  std::string describe() const override { return inner_.describe(); }

 private:
  const FeatureSource& inner_;
  mutable std::mutex mutex_;
  mutable std::map<std::string, std::vector<double>> cache_;
};

}  // namespace taxaug
