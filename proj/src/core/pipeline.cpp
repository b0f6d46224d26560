#include "taxaug/pipeline.hpp"

#include <fstream>
#include <memory>

#include "taxaug/augment.hpp"
#include "taxaug/error.hpp"
#include "taxaug/explain.hpp"
#include "taxaug/report.hpp"

namespace taxaug {

namespace {

// Re-throws with the pipeline stage prefixed, keeping the error code.
template <typename F>
auto staged(const char* stage, F&& f) -> decltype(f()) {
  try {
    return f();
  } catch (const Error& e) {
    throw Error(e.code(), std::string(stage) + ": " + e.what());
  } catch (const std::bad_alloc&) {
    throw;
  } catch (const std::exception& e) {
    throw Error(ErrorCode::data, std::string(stage) + ": " + e.what());
  }
}

std::string label_for(const PipelineConfig& c, bool has_gan) {
  std::string s;
  if (c.rotation) s += "+rotation";
  if (c.gan_ingest && has_gan) s += "+gan";
  if (c.smote) s += "+smote";
  return s.empty() ? "baseline" : s;
}

DatasetManifest ingest(const PipelineConfig& c) {
  const DatasetManifest full = load_manifest(c.manifest);
  const DatasetManifest picked = select(full, c.rotation, c.gan_ingest);
  return filter_min_count(picked, c.min_per_class ? c.min_per_class : static_cast<std::size_t>(c.folds));
}

std::unique_ptr<FeatureSource> make_source(const PipelineConfig& c) {
  if (c.feature_source == FeatureSourceKind::mock) return std::make_unique<MockImageSource>(c.mock_grid);
  if (!c.feature_file.empty()) return std::make_unique<TableSource>(read_feature_table(c.feature_file));
  return std::make_unique<TableSource>();
}

std::vector<double> angles_for(const PipelineConfig& c) {
  return c.rotation ? rotation_set(c.rotation_max, c.rotation_step) : std::vector<double>{};
}

std::string safe_name(std::string s) {
  for (char& ch : s)
    if (!(std::isalnum(static_cast<unsigned char>(ch)) || ch == '_' || ch == '-' || ch == '.')) ch = '_';
  return s;
}

void write_text(const std::filesystem::path& p, const std::string& text) {
  std::ofstream out(p, std::ios::binary);
  if (!out) throw Error(ErrorCode::io, "cannot write '" + p.string() + "'");
  out << text;
  if (!out) throw Error(ErrorCode::io, "write failed for '" + p.string() + "'");
}

}  // namespace

EvalReport run_experiment(const PipelineConfig& cfg, StageTracer* tracer) {
  validate(cfg);
  const DatasetManifest m = staged("ingest", [&] { return ingest(cfg); });
  const auto source = staged("features", [&] { return make_source(cfg); });
  const CachedSource cached(*source);

  CvConfig cv;
  cv.rotation = cfg.rotation;
  cv.angles = angles_for(cfg);
  cv.smote = cfg.smote;
  cv.smote_config = cfg.smote_config;
  cv.svm = MulticlassOptions{cfg.svm, cfg.standardize};
  cv.ctv_grid = cfg.ctv_grid;
  cv.pca_fit = cfg.pca_fit;
  cv.seed = *cfg.seed;
  cv.threads = cfg.threads;

  EvalReport report = staged("evaluate", [&] {
    const FoldPlan plan = plan_folds(m, cfg.repeats, cfg.folds, *cfg.seed, cfg.gan_in_folds);
    return cross_validate(cv, m, plan, cached, tracer);
  });
  report.label = label_for(cfg, m.count(Provenance::gan_ingested) > 0);
  report.config = echo(cfg);
  return report;
}

std::vector<EvalReport> run_ablation(const PipelineConfig& cfg) {
  validate(cfg);
  const bool has_gan =
      staged("ingest", [&] { return load_manifest(cfg.manifest).count(Provenance::gan_ingested) > 0; });

  auto rung = [&](bool rot, bool gan, bool smote) {
    PipelineConfig c = cfg;
    c.rotation = rot;
    c.gan_ingest = gan && has_gan;
    c.gan_in_folds = c.gan_ingest && cfg.gan_in_folds;
    c.smote = smote;
    return c;
  };

  std::vector<EvalReport> out;
  out.push_back(run_experiment(rung(false, false, false)));
  out.push_back(run_experiment(rung(true, false, false)));
  if (has_gan)
    out.push_back(run_experiment(rung(false, true, false)));
  else
    out.front().notices.push_back("manifest has no GAN rows; the +gan rung was skipped");
  out.push_back(run_experiment(rung(true, true, true)));
  return out;
}

std::size_t render_heatmaps(const PipelineConfig& cfg, const std::filesystem::path& out_dir) {
  validate(cfg);
  if (cfg.feature_source != FeatureSourceKind::mock)
    throw Error(ErrorCode::config, "heatmaps need spatial feature maps (feature_source = mock)");
  const DatasetManifest m = staged("ingest", [&] { return ingest(cfg); });
  const MockImageSource source(cfg.mock_grid);

  return staged("explain", [&] {
    std::vector<SampleRecord> train;
    for (const auto& r : m.records()) train.push_back(r);
    if (cfg.rotation && m.count(Provenance::rotated) == 0) {
      const DatasetManifest aug = augment_dataset(m, angles_for(cfg));
      for (const auto& r : aug.records())
        if (r.provenance == Provenance::rotated) train.push_back(r);
    }
    const CachedSource cached(source);
    Matrix x;
    for (std::size_t i = 0; i < train.size(); ++i) {
      const auto v = cached.pooled(train[i]);
      if (i == 0) x.resize(static_cast<Eigen::Index>(train.size()), static_cast<Eigen::Index>(v.size()));
      for (std::size_t d = 0; d < v.size(); ++d) x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(d)) = v[d];
    }
    std::vector<int> labels;
    for (const auto& r : train) labels.push_back(r.label.species_id);

    const PcaModel pca = fit_pca(x);
    const std::size_t n = components_for_ctv(pca, cfg.heatmap_ctv);
    Matrix z = transform(pca, x, n);
    if (cfg.smote) {
      FeatureTable t(n);
      for (std::size_t i = 0; i < train.size(); ++i) {
        const auto row = z.row(static_cast<Eigen::Index>(i));
        t.add({train[i].sample_id, train[i].label, std::vector<double>(row.data(), row.data() + n),
               train[i].provenance});
      }
      SmoteConfig sc = cfg.smote_config;
      sc.seed = *cfg.seed;
      const FeatureTable balanced = rebalance(t, sc);
      z = to_matrix(balanced);
      labels.clear();
      for (const auto& r : balanced.rows()) labels.push_back(r.label.species_id);
    }
    const SvmModel svm =
        train_multiclass(z, labels, static_cast<int>(m.species_count()), MulticlassOptions{cfg.svm, cfg.standardize});
    const Matrix w = backproject_weights(pca, svm);

    const auto dir = out_dir / "heatmaps";
    std::filesystem::create_directories(dir);
    std::vector<bool> done(m.species_count(), false);
    std::size_t written = 0;
    for (const auto& r : m.records()) {
      if (r.provenance != Provenance::original) continue;
      int cls = r.label.species_id;
      std::string name;
      if (cfg.heatmap_mode == "class") {
        if (done[cls]) continue;
        done[cls] = true;
        name = r.label.species_name;
      } else {
        // Per sample, explain the class the model picks.
        const auto pooled = cached.pooled(r);
        const Vector zr = transform(pca, Eigen::Map<const Matrix>(pooled.data(), 1, static_cast<Eigen::Index>(pooled.size())), n).row(0);
        cls = predict(svm, std::span<const double>(zr.data(), static_cast<std::size_t>(zr.size())));
        name = r.sample_id;
      }
      const RasterImage img = source.image(r);
      const auto maps = source.maps(r);
      const Vector wc = w.row(cls);
      Heatmap hm;
      const RasterImage overlay =
          explain_image(img, *maps, std::span<const double>(wc.data(), static_cast<std::size_t>(wc.size())),
                        cfg.heatmap_alpha, &hm);
      write_image(overlay, dir / (safe_name(name) + ".png"));
      ++written;
      if (cfg.heatmap_raw_csv) {
        const ScalarMap raw = compute_cam(*maps, std::span<const double>(wc.data(), static_cast<std::size_t>(wc.size())));
        std::string text;
        char buf[64];
        for (int y = 0; y < raw.height; ++y) {
          for (int xx = 0; xx < raw.width; ++xx) {
            std::snprintf(buf, sizeof buf, "%s%.9g", xx ? "," : "", raw.at(xx, y));
            text += buf;
          }
          text += '\n';
        }
        write_text(dir / (safe_name(name) + ".csv"), text);
      }
    }
    return written;
  });
}

std::size_t extract_mock_features(const std::filesystem::path& manifest, const std::filesystem::path& out,
                                  int grid, const std::vector<double>& angles) {
  const DatasetManifest m = staged("ingest", [&] { return load_manifest(manifest); });
  return staged("features", [&] {
    const MockImageSource source(grid);
    std::vector<SampleRecord> recs = m.records();
    if (!angles.empty() && m.count(Provenance::rotated) == 0) {
      const DatasetManifest aug = augment_dataset(m, angles);
      for (const auto& r : aug.records())
        if (r.provenance == Provenance::rotated) recs.push_back(r);
    }
    FeatureTable t(mock_channel_count(kStatAll));
    for (const auto& r : recs) t.add({r.sample_id, r.label, source.pooled(r), r.provenance});
    write_feature_table(t, out);
    return t.size();
  });
}

void write_outputs(const std::vector<EvalReport>& reports, const std::filesystem::path& out_dir) {
  std::filesystem::create_directories(out_dir);
  write_text(out_dir / "report.json", reports_json(reports));
  write_text(out_dir / "table.txt", accuracy_table(reports));
  write_text(out_dir / "ctv_curve.csv", ctv_curve_csv(reports));
}

}  // namespace taxaug
