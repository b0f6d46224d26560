#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <unordered_map>
#include <vector>

#include "taxaug/dataset.hpp"
#include "taxaug/image.hpp"

namespace taxaug {

/// C spatial activation maps of H x W, channel-major.
class FeatureMaps {
 public:
  FeatureMaps() = default;
  FeatureMaps(int channels, int height, int width, double value = 0.0);
  FeatureMaps(int channels, int height, int width, std::vector<double> values);

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }

  double at(int c, int h, int w) const { return values_[index(c, h, w)]; }
  double& at(int c, int h, int w) { return values_[index(c, h, w)]; }
  const std::vector<double>& values() const { return values_; }

  bool operator==(const FeatureMaps&) const = default;

 private:
  std::size_t index(int c, int h, int w) const {
    return (static_cast<std::size_t>(c) * height_ + h) * width_ + w;
  }
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<double> values_;
};

struct FeatureVector {
  std::string sample_id;
  SampleLabel label;
  std::vector<double> values;
  Provenance provenance = Provenance::original;

  std::size_t dims() const { return values.size(); }
  bool operator==(const FeatureVector&) const = default;
};

/// Rows sharing one dimensionality, unique sample ids.
class FeatureTable {
 public:
  FeatureTable() = default;
  explicit FeatureTable(std::size_t dims) : dims_(dims) {}
  FeatureTable(std::size_t dims, std::vector<FeatureVector> rows);

  std::size_t dims() const { return dims_; }
  std::size_t size() const { return rows_.size(); }
  const std::vector<FeatureVector>& rows() const { return rows_; }
  const FeatureVector& operator[](std::size_t i) const { return rows_[i]; }

  void add(FeatureVector row);
  const FeatureVector* find(const std::string& sample_id) const;

  bool operator==(const FeatureTable& o) const { return dims_ == o.dims_ && rows_ == o.rows_; }

 private:
  std::size_t dims_ = 0;
  std::vector<FeatureVector> rows_;
  std::unordered_map<std::string, std::size_t> index_;
};

FeatureVector global_average_pool(const FeatureMaps& maps);

/// Statistics computed per grid cell by the mock extractor.
enum MockStat : unsigned {
  kStatMean = 1u << 0,       // 1 map
  kStatStdDev = 1u << 1,     // 1 map
  kStatGradient = 1u << 2,   // 2 maps: mean |d/dx|, mean |d/dy|
  kStatEdges = 1u << 3,      // 4 maps: gradient magnitude binned at 0/45/90/135 deg
  kStatAll = kStatMean | kStatStdDev | kStatGradient | kStatEdges,
};

std::size_t mock_channel_count(unsigned stats);

/// Deterministic stand-in for a convolutional backbone: splits the grayscale
/// image into grid x grid cells (cell i spans rows [i*H/grid, (i+1)*H/grid))
/// and emits one map per selected statistic. Gradients are central
/// differences with clamped borders.
FeatureMaps mock_extract(const RasterImage& img, int grid, unsigned stats = kStatAll);

/// `.fvec`: "FVEC1\n", u32 dims, u32 rows, then per row u16 id length, id,
/// u16 name length, species name, dims x f64 (all little-endian).
/// Paths ending in `.csv` use the text fallback `sample_id,species_name,v0,...`.
void write_feature_table(const FeatureTable& t, const std::filesystem::path& path);
FeatureTable read_feature_table(const std::filesystem::path& path);

struct FeatureFileInfo {
  std::uint32_t dims = 0;
  std::uint32_t rows = 0;
};

/// Reads and fully validates a feature file, returning its header.
FeatureFileInfo validate_feature_file(const std::filesystem::path& path);

}  // namespace taxaug
