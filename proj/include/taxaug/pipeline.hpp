#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "taxaug/evaluate.hpp"

namespace taxaug {

enum class FeatureSourceKind { mock, file };

/// Everything a run needs. Mirrors the `key = value` config file one to one;
/// see docs/config.md for the keys.
struct PipelineConfig {
  std::filesystem::path manifest;
  FeatureSourceKind feature_source = FeatureSourceKind::mock;
  std::filesystem::path feature_file;  // empty: each record's payload names its feature file
  int mock_grid = 7;

  bool rotation = false;
  bool gan_ingest = false;
  bool smote = false;
  bool gan_in_folds = false;
  double rotation_max = 20.0;
  double rotation_step = 5.0;

  SmoteConfig smote_config{5, SmoteTarget::match_majority, 0, SingletonPolicy::skip, 0};
  TrainOptions svm{1.0, 1e-4, 5000};
  bool standardize = true;
  std::vector<int> ctv_grid = taxaug::ctv_grid();
  PcaFitMode pca_fit = PcaFitMode::per_fold;

  int repeats = 10;
  int folds = 2;
  std::optional<std::uint64_t> seed;
  std::size_t min_per_class = 0;  // 0: use `folds`
  int threads = 1;

  std::filesystem::path output_dir = "out";

  std::string heatmap_mode = "sample";  // sample | class
  int heatmap_ctv = 90;
  double heatmap_alpha = 0.5;
  bool heatmap_raw_csv = false;
};

/// Parses `key = value` lines ('#' starts a comment). Relative paths are
/// resolved against the config file's directory.
PipelineConfig load_config(const std::filesystem::path& path);

/// Applies one setting; throws Error(config) for unknown keys or bad values.
void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& value,
                   const std::filesystem::path& base = {});

/// Rejects contradictory or incomplete configurations.
void validate(const PipelineConfig& cfg);

/// Canonical key/value echo of the configuration.
std::map<std::string, std::string> echo(const PipelineConfig& cfg);

/// ingest -> fold plan -> cross_validate. Errors carry the failing stage
/// ("ingest: ...", "features: ...", "evaluate: ...").
EvalReport run_experiment(const PipelineConfig& cfg, StageTracer* tracer = nullptr);

/// Baseline, +rotation, +gan_ingest, +rotation+gan+smote with the same seeds.
/// The GAN rung is skipped (with a notice on the baseline report) when the
/// manifest has no GAN rows.
std::vector<EvalReport> run_ablation(const PipelineConfig& cfg);

/// Trains on every original (plus the configured augmentation) at
/// cfg.heatmap_ctv and writes class-activation overlays under
/// `out_dir/heatmaps`. Returns the number of PNG files written.
std::size_t render_heatmaps(const PipelineConfig& cfg, const std::filesystem::path& out_dir);

/// Pooled mock features for every record of an image manifest, plus the
/// rotated children for `angles`, written as a feature file.
std::size_t extract_mock_features(const std::filesystem::path& manifest, const std::filesystem::path& out,
                                  int grid, const std::vector<double>& angles);

/// Writes report.json, table.txt and ctv_curve.csv.
void write_outputs(const std::vector<EvalReport>& reports, const std::filesystem::path& out_dir);

}  // namespace taxaug
