#include "taxaug/evaluate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <numeric>
#include <thread>
#include <unordered_set>

#include "taxaug/augment.hpp"
#include "taxaug/error.hpp"
#include "taxaug/rng.hpp"

namespace taxaug {

double accuracy(std::span<const int> truth, std::span<const int> predicted) {
  if (truth.size() != predicted.size()) throw Error(ErrorCode::shape, "truth and prediction lengths differ");
  if (truth.empty()) throw Error(ErrorCode::shape, "accuracy of an empty prediction set");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hits += truth[i] == predicted[i];
  return static_cast<double>(hits) / static_cast<double>(truth.size());
}

ConfusionMatrix::ConfusionMatrix(int n_classes) : n_(n_classes) {
  if (n_classes < 1) throw Error(ErrorCode::range, "confusion matrix needs >= 1 class");
  counts_.assign(static_cast<std::size_t>(n_classes) * n_classes, 0);
}

void ConfusionMatrix::add(int truth, int predicted, std::size_t count) {
  if (truth < 0 || truth >= n_ || predicted < 0 || predicted >= n_)
    throw Error(ErrorCode::range, "class index outside confusion matrix");
  counts_[static_cast<std::size_t>(truth) * n_ + predicted] += count;
}

void ConfusionMatrix::merge(const ConfusionMatrix& other) {
  if (n_ == 0) {
    *this = other;
    return;
  }
  if (other.n_ != n_) throw Error(ErrorCode::shape, "confusion matrices differ in size");
  for (std::size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
}

std::size_t ConfusionMatrix::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::size_t{0}); }

std::size_t ConfusionMatrix::correct() const {
  std::size_t c = 0;
  for (int s = 0; s < n_; ++s) c += count(s, s);
  return c;
}

std::size_t ConfusionMatrix::fp(int s) const {
  std::size_t c = 0;
  for (int t = 0; t < n_; ++t)
    if (t != s) c += count(t, s);
  return c;
}

std::size_t ConfusionMatrix::fn(int s) const {
  std::size_t c = 0;
  for (int p = 0; p < n_; ++p)
    if (p != s) c += count(s, p);
  return c;
}

double ConfusionMatrix::accuracy() const {
  const auto t = total();
  return t == 0 ? 0.0 : static_cast<double>(correct()) / static_cast<double>(t);
}

const char* to_string(Stage s) {
  switch (s) {
    case Stage::augment: return "augment";
    case Stage::extract: return "extract";
    case Stage::pca_fit: return "pca_fit";
    case Stage::smote: return "smote";
    case Stage::standardize: return "standardize";
    case Stage::svm_train: return "svm_train";
    case Stage::predict: return "predict";
  }
  return "?";
}

void RecordingTracer::touch(int repeat, int fold, Stage stage, const std::vector<std::string>& ids) {
  std::lock_guard lock(mutex_);
  seen_[{repeat, fold, stage}].insert(ids.begin(), ids.end());
}

std::set<std::string> RecordingTracer::touched(int repeat, int fold, Stage stage) const {
  std::lock_guard lock(mutex_);
  auto it = seen_.find({repeat, fold, stage});
  return it == seen_.end() ? std::set<std::string>{} : it->second;
}

std::pair<double, double> mean_std(std::span<const double> values) {
  if (values.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(values.begin(), values.end(), 0.0) / static_cast<double>(values.size());
  if (values.size() < 2) return {mean, 0.0};
  double ss = 0.0;
  for (double v : values) ss += (v - mean) * (v - mean);
  return {mean, std::sqrt(ss / static_cast<double>(values.size() - 1))};
}

namespace {

// Collects what one split touched and refuses any overlap with its test set.
class SplitLedger {
 public:
  SplitLedger(int repeat, int fold, StageTracer* external, std::unordered_set<std::string> test_ids,
              bool pca_exempt)
      : repeat_(repeat), fold_(fold), external_(external), test_(std::move(test_ids)), pca_exempt_(pca_exempt) {}

  void touch(Stage stage, const std::vector<std::string>& ids) {
    if (external_) external_->touch(repeat_, fold_, stage, ids);
    const bool guarded = stage == Stage::augment || stage == Stage::smote || stage == Stage::standardize ||
                         stage == Stage::svm_train || (stage == Stage::pca_fit && !pca_exempt_);
    if (!guarded) return;
    for (const auto& id : ids)
      if (test_.count(id))
        throw Error(ErrorCode::data, std::string("leakage: test sample '") + id + "' reached stage " + to_string(stage));
  }

 private:
  int repeat_, fold_;
  StageTracer* external_;
  std::unordered_set<std::string> test_;
  bool pca_exempt_;
};

std::vector<std::string> ids_of(const std::vector<SampleRecord>& recs) {
  std::vector<std::string> ids;
  ids.reserve(recs.size());
  for (const auto& r : recs) ids.push_back(r.sample_id);
  return ids;
}

Matrix stack(const std::vector<SampleRecord>& recs, const FeatureSource& features) {
  Matrix x;
  for (std::size_t i = 0; i < recs.size(); ++i) {
    const auto v = features.pooled(recs[i]);
    if (i == 0) x.resize(static_cast<Eigen::Index>(recs.size()), static_cast<Eigen::Index>(v.size()));
    if (static_cast<Eigen::Index>(v.size()) != x.cols())
      throw Error(ErrorCode::shape, "sample '" + recs[i].sample_id + "' has " + std::to_string(v.size()) +
                                        " features, expected " + std::to_string(x.cols()));
    for (std::size_t d = 0; d < v.size(); ++d) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = v[d];
  }
  return x;
}

// Train side of one split: the split's train records, plus rotations of its
// train originals when rotation is on and the manifest has none of its own.
std::vector<SampleRecord> train_side(const CvConfig& cfg, const DatasetManifest& m, const Split& split,
                                     bool premade_rotations, std::vector<std::string>& augmented_parents) {
  std::vector<SampleRecord> out;
  std::vector<SampleRecord> originals;
  for (std::size_t i : split.train) {
    const auto& r = m.records()[i];
    if (r.provenance == Provenance::rotated) {
      if (!cfg.rotation) continue;
      augmented_parents.push_back(r.parent_id);
    }
    out.push_back(r);
    if (r.provenance == Provenance::original) originals.push_back(r);
  }
  if (cfg.rotation && !premade_rotations && !originals.empty()) {
    for (const auto& r : originals) augmented_parents.push_back(r.sample_id);
    std::map<std::string, SampleLabel> parent_label;
    for (const auto& r : originals) parent_label[r.sample_id] = r.label;
    const auto augmented = augment_dataset(DatasetManifest::from_records(originals), cfg.angles);
    for (auto r : augmented.records()) {
      if (r.provenance != Provenance::rotated) continue;
      // The subset manifest numbers species on its own; keep the full manifest's ids.
      r.label = parent_label.at(r.parent_id);
      out.push_back(std::move(r));
    }
  }
  return out;
}

struct GlobalPca {
  std::optional<PcaModel> model;
};

SplitOutcome run_split(const CvConfig& cfg, const DatasetManifest& m, const FoldPlan& plan, int repeat, int fold,
                       const FeatureSource& features, StageTracer* tracer, const GlobalPca& global,
                       bool premade_rotations) {
  SplitOutcome out;
  out.repeat = repeat;
  out.fold = fold;
  const int S = static_cast<int>(m.species_count());
  const std::string where = "repeat " + std::to_string(repeat) + " fold " + std::to_string(fold);
  std::string stage = "assemble";
  try {
    const Split split = make_split(m, plan, repeat, fold);
    std::vector<SampleRecord> test;
    std::unordered_set<std::string> test_ids;
    for (std::size_t i : split.test) {
      test.push_back(m.records()[i]);
      test_ids.insert(m.records()[i].sample_id);
    }
    SplitLedger ledger(repeat, fold, tracer, test_ids, cfg.pca_fit == PcaFitMode::global);

    stage = "augment";
    std::vector<std::string> parents;
    const auto train = train_side(cfg, m, split, premade_rotations, parents);
    if (!parents.empty()) ledger.touch(Stage::augment, parents);
    for (const auto& r : train)
      if (test_ids.count(r.sample_id) || (r.provenance == Provenance::rotated && test_ids.count(r.parent_id)))
        throw Error(ErrorCode::data, "leakage: '" + r.sample_id + "' is on both sides of the split");

    stage = "extract";
    auto train_ids = ids_of(train);
    ledger.touch(Stage::extract, train_ids);
    ledger.touch(Stage::extract, ids_of(test));
    const Matrix x_train = stack(train, features);
    const Matrix x_test = stack(test, features);
    std::vector<int> y_train, y_test;
    for (const auto& r : train) y_train.push_back(r.label.species_id);
    for (const auto& r : test) y_test.push_back(r.label.species_id);
    out.train_records = train.size();
    out.test_records = test.size();

    stage = "pca";
    PcaModel local;
    const PcaModel* pca = global.model ? &*global.model : nullptr;
    if (!pca) {
      ledger.touch(Stage::pca_fit, train_ids);
      local = fit_pca(x_train);
      pca = &local;
    }

    const std::uint64_t split_seed =
        derive_seed(cfg.seed, {static_cast<std::uint64_t>(repeat), static_cast<std::uint64_t>(fold)});
    for (int ctv : cfg.ctv_grid) {
      stage = "ctv " + std::to_string(ctv);
      const std::size_t n = components_for_ctv(*pca, ctv);
      Matrix z_train = transform(*pca, x_train, n);
      const Matrix z_test = transform(*pca, x_test, n);
      std::vector<int> labels = y_train;
      std::vector<std::string> fit_ids = train_ids;
      std::size_t synthetic = 0;
      if (cfg.smote) {
        stage = "smote at ctv " + std::to_string(ctv);
        ledger.touch(Stage::smote, train_ids);
        FeatureTable t(n);
        for (std::size_t i = 0; i < train.size(); ++i) {
          FeatureVector fv;
          fv.sample_id = train[i].sample_id;
          fv.label = train[i].label;
          fv.provenance = train[i].provenance;
          fv.values.assign(z_train.row(static_cast<Eigen::Index>(i)).data(),
                           z_train.row(static_cast<Eigen::Index>(i)).data() + n);
          t.add(std::move(fv));
        }
        SmoteConfig sc = cfg.smote_config;
        sc.seed = derive_seed(split_seed, {static_cast<std::uint64_t>(ctv)});
        const FeatureTable balanced = rebalance(t, sc);
        synthetic = balanced.size() - t.size();
        z_train = to_matrix(balanced);
        labels.clear();
        fit_ids.clear();
        for (const auto& r : balanced.rows()) {
          labels.push_back(r.label.species_id);
          fit_ids.push_back(r.sample_id);
        }
      }
      stage = "svm at ctv " + std::to_string(ctv);
      ledger.touch(Stage::standardize, fit_ids);
      ledger.touch(Stage::svm_train, fit_ids);
      const SvmModel model = train_multiclass(z_train, labels, S, cfg.svm);
      out.convergence_warnings += model.convergence_warnings;

      ledger.touch(Stage::predict, ids_of(test));
      std::vector<int> predicted(test.size());
      ConfusionMatrix cm(S);
      for (std::size_t i = 0; i < test.size(); ++i) {
        const auto row = z_test.row(static_cast<Eigen::Index>(i));
        predicted[i] = predict(model, std::span<const double>(row.data(), static_cast<std::size_t>(row.size())));
        cm.add(y_test[i], predicted[i]);
      }
      out.accuracy.push_back(accuracy(y_test, predicted));
      out.retained.push_back(n);
      out.smote_rows.push_back(synthetic);
      out.confusion.push_back(std::move(cm));
    }
    out.ok = true;
  } catch (const std::exception& e) {
    out = SplitOutcome{};
    out.repeat = repeat;
    out.fold = fold;
    out.error = where + ", " + stage + ": " + e.what();
  }
  return out;
}

}  // namespace

EvalReport cross_validate(const CvConfig& cfg, const DatasetManifest& m, const FoldPlan& plan,
                          const FeatureSource& features, StageTracer* tracer) {
  if (plan.assignments.size() != static_cast<std::size_t>(plan.repeats))
    throw Error(ErrorCode::shape, "fold plan is incomplete");
  for (const auto& a : plan.assignments)
    if (a.size() != m.records().size()) throw Error(ErrorCode::shape, "fold plan does not match manifest");
  if (cfg.ctv_grid.empty()) throw Error(ErrorCode::config, "empty CTV grid");
  for (int ctv : cfg.ctv_grid)
    if (ctv < 10 || ctv > 100 || ctv % 10 != 0)
      throw Error(ErrorCode::config, "CTV grid values must come from {10, 20, ..., 100}");
  if (cfg.rotation && m.count(Provenance::rotated) == 0 && cfg.angles.empty())
    throw Error(ErrorCode::config, "rotation enabled without angles");

  const bool premade = m.count(Provenance::rotated) > 0;
  GlobalPca global;
  if (cfg.pca_fit == PcaFitMode::global) {
    // Every record the run could train on, test originals included.
    std::vector<SampleRecord> all;
    for (const auto& r : m.records())
      if (r.provenance != Provenance::rotated || cfg.rotation) all.push_back(r);
    if (cfg.rotation && !premade) {
      const auto aug = augment_dataset(m, cfg.angles);
      for (const auto& r : aug.records())
        if (r.provenance == Provenance::rotated) all.push_back(r);
    }
    global.model = fit_pca(stack(all, features));
  }

  const std::size_t n_splits = plan.split_count();
  std::vector<SplitOutcome> outcomes(n_splits);
  auto work = [&](std::size_t idx) {
    const int repeat = static_cast<int>(idx) / plan.k;
    const int fold = static_cast<int>(idx) % plan.k;
    outcomes[idx] = run_split(cfg, m, plan, repeat, fold, features, tracer, global, premade);
  };
  const int threads = std::max(1, std::min<int>(cfg.threads, static_cast<int>(n_splits)));
  if (threads == 1) {
    for (std::size_t i = 0; i < n_splits; ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    for (int t = 0; t < threads; ++t)
      pool.emplace_back([&] {
        for (std::size_t i; (i = next.fetch_add(1)) < n_splits;) work(i);
      });
  }

  EvalReport report;
  report.splits = std::move(outcomes);
  std::vector<const SplitOutcome*> good;
  for (const auto& s : report.splits) {
    if (s.ok) {
      good.push_back(&s);
      report.convergence_warnings += s.convergence_warnings;
    } else {
      report.notices.push_back("split failed: " + s.error);
    }
  }
  if (good.empty())
    throw Error(ErrorCode::data, "no split succeeded" +
                                     (report.splits.empty() ? std::string() : "; first failure: " + report.splits[0].error));

  for (std::size_t c = 0; c < cfg.ctv_grid.size(); ++c) {
    std::vector<double> acc;
    double retained = 0;
    for (const auto* s : good) {
      acc.push_back(s->accuracy[c]);
      retained += static_cast<double>(s->retained[c]);
    }
    const auto [mean, sd] = mean_std(acc);
    report.ctv_rows.push_back({cfg.ctv_grid[c], retained / static_cast<double>(good.size()), mean, sd});
  }
  const auto sweep = ctv_sweep(
      [&](int ctv) {
        const auto it = std::find_if(report.ctv_rows.begin(), report.ctv_rows.end(),
                                     [ctv](const CtvRow& r) { return r.ctv_percent == ctv; });
        return CtvSweepEntry{ctv, it->mean_retained, it->mean_accuracy};
      },
      cfg.ctv_grid);
  report.best_ctv = sweep.best.ctv_percent;
  const auto best_index = static_cast<std::size_t>(
      std::find(cfg.ctv_grid.begin(), cfg.ctv_grid.end(), report.best_ctv) - cfg.ctv_grid.begin());
  for (const auto* s : good) {
    report.split_accuracies.push_back(s->accuracy[best_index]);
    report.confusion.merge(s->confusion[best_index]);
  }
  std::tie(report.mean_accuracy, report.std_accuracy) = mean_std(report.split_accuracies);

  const auto originals = m.original_counts();
  report.dataset.species = m.species_count();
  report.dataset.originals = m.count(Provenance::original);
  report.dataset.gan = m.count(Provenance::gan_ingested);
  report.dataset.rotated = !cfg.rotation ? 0
                           : premade     ? m.count(Provenance::rotated)
                                         : report.dataset.originals * cfg.angles.size();
  report.dataset.min_class = *std::min_element(originals.begin(), originals.end());
  report.dataset.max_class = *std::max_element(originals.begin(), originals.end());
  return report;
}

}  // namespace taxaug
