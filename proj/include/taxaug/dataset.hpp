#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace taxaug {

enum class Provenance { original, rotated, gan_ingested, smote_synthetic };

const char* to_string(Provenance p);

struct SampleLabel {
  int species_id = 0;
  std::string species_name;

  bool operator==(const SampleLabel&) const = default;
};

struct SampleRecord {
  std::string sample_id;
  SampleLabel label;
  std::string payload;  // image file or .fvec/.csv feature file, absolute or manifest-relative
  Provenance provenance = Provenance::original;
  double angle_deg = 0.0;   // rotated only
  std::string parent_id;    // rotated only

  bool operator==(const SampleRecord&) const = default;
};

/// Ordered sample catalog. Construction validates the invariants: unique ids,
/// dense species ids in first-appearance order, at least one original per
/// species, rotated records pointing at an original parent.
class DatasetManifest {
 public:
  DatasetManifest() = default;

  /// Re-derives species ids from first appearance of each species name.
  static DatasetManifest from_records(std::vector<SampleRecord> records);

  const std::vector<SampleRecord>& records() const { return records_; }
  const std::vector<std::size_t>& class_counts() const { return class_counts_; }
  const std::vector<std::string>& species_names() const { return species_names_; }
  std::size_t species_count() const { return species_names_.size(); }

  /// Count of `original` records per species.
  std::vector<std::size_t> original_counts() const;
  std::size_t count(Provenance p) const;

  std::optional<std::size_t> index_of(const std::string& sample_id) const;

 private:
  std::vector<SampleRecord> records_;
  std::vector<std::size_t> class_counts_;
  std::vector<std::string> species_names_;
  std::map<std::string, std::size_t> index_;
};

/// Reads the CSV manifest: header `sample_id,species_name,kind,path,parent_id,angle_deg`.
DatasetManifest load_manifest(const std::filesystem::path& path);
void write_manifest(const DatasetManifest& m, const std::filesystem::path& path);

DatasetManifest filter_min_count(const DatasetManifest& m, std::size_t min_per_class);

/// Records of the requested provenances, species ids re-densified.
DatasetManifest select(const DatasetManifest& m, bool keep_rotated, bool keep_gan);

struct FoldPlan {
  int repeats = 10;
  int k = 2;
  std::uint64_t seed = 0;
  bool gan_in_folds = false;
  /// assignments[r][i] = fold of manifest record i in repeat r; -1 for records
  /// that are never tested (rotated children, train-only GAN rows).
  std::vector<std::vector<int>> assignments;

  int fold_of(int repeat, std::size_t record) const { return assignments[repeat][record]; }
  std::size_t split_count() const { return static_cast<std::size_t>(repeats) * k; }
};

/// Stratified repeated k-fold. Per repeat and per class (species-id order),
/// the eligible records are taken in manifest order, shuffled with
/// Rng(derive_seed(seed, {repeat})) and dealt round-robin; the dealing offset
/// carries over between classes so fold sizes stay within one of each other.
FoldPlan plan_folds(const DatasetManifest& m, int repeats, int k, std::uint64_t seed,
                    bool gan_in_folds = false);

/// Indices of records in the train and test sides of one split. Rotated
/// records follow their parent's fold; train-only GAN rows are always train.
struct Split {
  int repeat = 0;
  int fold = 0;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;  // originals only
};

Split make_split(const DatasetManifest& m, const FoldPlan& plan, int repeat, int fold);

}  // namespace taxaug
