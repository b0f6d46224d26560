#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "taxaug/classify.hpp"
#include "taxaug/dataset.hpp"
#include "taxaug/feature_source.hpp"
#include "taxaug/oversample.hpp"
#include "taxaug/reduce.hpp"

namespace taxaug {

/// Fraction of positions where truth equals prediction.
double accuracy(std::span<const int> truth, std::span<const int> predicted);

/// counts(t, p): samples of true class t predicted as p.
class ConfusionMatrix {
 public:
  ConfusionMatrix() = default;
  explicit ConfusionMatrix(int n_classes);

  int classes() const { return n_; }
  void add(int truth, int predicted, std::size_t count = 1);
  void merge(const ConfusionMatrix& other);
  std::size_t count(int truth, int predicted) const { return counts_[static_cast<std::size_t>(truth) * n_ + predicted]; }

  std::size_t total() const;
  std::size_t correct() const;
  std::size_t tp(int s) const { return count(s, s); }
  std::size_t fp(int s) const;
  std::size_t fn(int s) const;
  std::size_t tn(int s) const { return total() - tp(s) - fp(s) - fn(s); }
  double accuracy() const;

  bool operator==(const ConfusionMatrix&) const = default;

 private:
  int n_ = 0;
  std::vector<std::size_t> counts_;
};

enum class Stage { augment, extract, pca_fit, smote, standardize, svm_train, predict };
const char* to_string(Stage s);

/// Receives every sample id a split touches, per stage. Implementations must
/// be thread-safe when the harness runs splits in parallel.
class StageTracer {
 public:
  virtual ~StageTracer() = default;
  virtual void touch(int repeat, int fold, Stage stage, const std::vector<std::string>& sample_ids) = 0;
};

class RecordingTracer : public StageTracer {
 public:
  void touch(int repeat, int fold, Stage stage, const std::vector<std::string>& sample_ids) override;
  std::set<std::string> touched(int repeat, int fold, Stage stage) const;

 private:
  mutable std::mutex mutex_;
  std::map<std::tuple<int, int, Stage>, std::set<std::string>> seen_;
};

enum class PcaFitMode { per_fold, global };

struct CvConfig {
  bool rotation = false;
  std::vector<double> angles;  // used when the manifest carries no rotated rows
  bool smote = false;
  SmoteConfig smote_config;    // seed is replaced per split and CTV
  MulticlassOptions svm;
  std::vector<int> ctv_grid = taxaug::ctv_grid();
  PcaFitMode pca_fit = PcaFitMode::per_fold;
  std::uint64_t seed = 0;
  int threads = 1;
};

struct SplitOutcome {
  int repeat = 0;
  int fold = 0;
  bool ok = false;
  std::string error;               // stage-qualified message when !ok
  std::size_t train_records = 0;   // after rotation, before SMOTE
  std::size_t test_records = 0;
  std::vector<double> accuracy;    // per CTV grid entry
  std::vector<std::size_t> retained;
  std::vector<std::size_t> smote_rows;
  std::vector<ConfusionMatrix> confusion;
  int convergence_warnings = 0;
};

struct CtvRow {
  int ctv_percent = 0;
  double mean_retained = 0;
  double mean_accuracy = 0;
  double std_accuracy = 0;
};

struct DatasetSummary {
  std::size_t species = 0;
  std::size_t originals = 0;
  std::size_t rotated = 0;  // children produced by the configured rotation over all originals
  std::size_t gan = 0;
  std::size_t min_class = 0;
  std::size_t max_class = 0;
};

struct EvalReport {
  std::string label;
  std::map<std::string, std::string> config;  // echo, sorted by key
  DatasetSummary dataset;
  std::vector<SplitOutcome> splits;            // repeat-major, fold-minor
  std::vector<CtvRow> ctv_rows;
  int best_ctv = 0;
  std::vector<double> split_accuracies;        // successful splits at best_ctv
  double mean_accuracy = 0;
  double std_accuracy = 0;
  ConfusionMatrix confusion;                   // summed over splits at best_ctv
  int convergence_warnings = 0;
  std::vector<std::string> notices;
};

/// Mean and sample standard deviation (n - 1; 0 for a single value).
std::pair<double, double> mean_std(std::span<const double> values);

/// Repeated stratified cross-validation. Per split: train records (plus
/// rotations of the train originals) -> pooled features -> PCA fit on train
/// -> per CTV: truncate, optional SMOTE, standardize + OvR SVM -> predict the
/// test originals. The harness checks on every split that no test sample
/// reaches augmentation, PCA fitting (per-fold mode), SMOTE, standardization
/// or training, and fails the split otherwise.
EvalReport cross_validate(const CvConfig& cfg, const DatasetManifest& m, const FoldPlan& plan,
                          const FeatureSource& features, StageTracer* tracer = nullptr);

}  // namespace taxaug
