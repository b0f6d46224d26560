// Command-line front end. Talks to the library only through taxaug.h.
#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "taxaug/taxaug.h"

namespace {

// 0 ok, 2 config, 3 data, 4 convergence warning; 1 for anything else.
int exit_code(taxaug_status s) {
  switch (s) {
    case TAXAUG_OK: return 0;
    case TAXAUG_E_CONFIG: return 2;
    case TAXAUG_E_DATA:
    case TAXAUG_E_IO: return 3;
    case TAXAUG_W_CONVERGENCE: return 4;
    default: return 1;
  }
}

int report_failure(taxaug_status s, const char* what) {
  std::cerr << "taxaug-cli: " << what << ": " << taxaug_last_error() << "\n";
  return exit_code(s);
}

using ConfigPtr = std::unique_ptr<taxaug_config, decltype(&taxaug_config_destroy)>;
using ResultPtr = std::unique_ptr<taxaug_result, decltype(&taxaug_result_destroy)>;

struct RunArgs {
  std::string config;
  std::vector<std::string> sets;
  std::optional<unsigned long long> seed;
  std::optional<int> threads;
  std::string out;
};

void add_run_args(CLI::App* cmd, RunArgs& a) {
  cmd->add_option("-c,--config", a.config, "key = value config file");
  cmd->add_option("-s,--set", a.sets, "override, key=value (repeatable)");
  cmd->add_option("--seed", a.seed, "base seed");
  cmd->add_option("--threads", a.threads, "parallel splits");
  cmd->add_option("-o,--out", a.out, "output directory (default: output_dir from config)");
}

// Loads the config file (or starts empty) and applies overrides.
taxaug_status build_config(const RunArgs& a, ConfigPtr& cfg) {
  taxaug_config* raw = nullptr;
  taxaug_status s = a.config.empty() ? taxaug_config_create(&raw) : taxaug_config_load(a.config.c_str(), &raw);
  if (s != TAXAUG_OK) return s;
  cfg.reset(raw);
  for (const auto& kv : a.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) {
      std::cerr << "taxaug-cli: --set expects key=value, got '" << kv << "'\n";
      return TAXAUG_E_CONFIG;
    }
    s = taxaug_config_set(cfg.get(), kv.substr(0, eq).c_str(), kv.substr(eq + 1).c_str());
    if (s != TAXAUG_OK) return s;
  }
  if (a.seed && (s = taxaug_config_set(cfg.get(), "seed", std::to_string(*a.seed).c_str())) != TAXAUG_OK) return s;
  if (a.threads && (s = taxaug_config_set(cfg.get(), "threads", std::to_string(*a.threads).c_str())) != TAXAUG_OK)
    return s;
  return taxaug_config_validate(cfg.get());
}

std::string output_dir(const RunArgs& a, const taxaug_config* cfg) {
  if (!a.out.empty()) return a.out;
  char* v = nullptr;
  std::string dir = "out";
  if (taxaug_config_get(cfg, "output_dir", &v) == TAXAUG_OK) {
    dir = v;
    taxaug_string_free(v);
  }
  return dir;
}

std::string take(char* s) {
  std::string out = s ? s : "";
  taxaug_string_free(s);
  return out;
}

int evaluate(const RunArgs& a, bool ablation, bool print_curve) {
  ConfigPtr cfg(nullptr, taxaug_config_destroy);
  if (taxaug_status s = build_config(a, cfg); s != TAXAUG_OK) return report_failure(s, "configuration");

  taxaug_result* raw = nullptr;
  const taxaug_status run = ablation ? taxaug_run_ablation(cfg.get(), &raw) : taxaug_run_experiment(cfg.get(), &raw);
  if (run != TAXAUG_OK && run != TAXAUG_W_CONVERGENCE) return report_failure(run, "run failed");
  ResultPtr result(raw, taxaug_result_destroy);
  if (run == TAXAUG_W_CONVERGENCE) std::cerr << "taxaug-cli: warning: " << taxaug_last_error() << "\n";

  const std::string dir = output_dir(a, cfg.get());
  if (taxaug_status s = taxaug_result_write(result.get(), dir.c_str()); s != TAXAUG_OK)
    return report_failure(s, "writing outputs");

  char* text = nullptr;
  if (print_curve) {
    if (taxaug_result_ctv_csv(result.get(), &text) == TAXAUG_OK) std::cout << take(text);
  } else if (taxaug_result_table(result.get(), &text) == TAXAUG_OK) {
    std::cout << take(text);
  }
  std::cout << "outputs written to " << dir << "\n";
  return exit_code(run);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"taxaug: augmentation ablations for few-shot specimen classification"};
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(taxaug_version()));

  RunArgs run_args, ablate_args, sweep_args, heat_args;
  auto* run = app.add_subcommand("run", "one cross-validated experiment");
  add_run_args(run, run_args);
  auto* ablate = app.add_subcommand("ablate", "baseline, +rotation, +gan, +rotation+gan+smote");
  add_run_args(ablate, ablate_args);
  auto* sweep = app.add_subcommand("sweep-ctv", "accuracy against retained variance");
  add_run_args(sweep, sweep_args);
  auto* heat = app.add_subcommand("heatmap", "class-activation overlays");
  add_run_args(heat, heat_args);

  auto* fixture = app.add_subcommand("make-fixture", "seeded synthetic dataset");
  taxaug_fixture_options fx;
  taxaug_fixture_defaults(&fx);
  std::string fixture_out;
  bool fixture_images = false;
  unsigned long long fixture_seed = fx.seed;
  fixture->add_option("-o,--out", fixture_out, "output directory")->required();
  fixture->add_option("--seed", fixture_seed, "generator seed");
  fixture->add_option("--classes", fx.classes, "species count");
  fixture->add_option("--min", fx.min_count, "smallest class");
  fixture->add_option("--max", fx.max_count, "largest class");
  fixture->add_option("--dims", fx.dims, "feature dimensionality");
  fixture->add_option("--gan", fx.gan_per_class, "GAN rows per species");
  fixture->add_flag("--images", fixture_images, "write PGM images instead of features");
  fixture->add_option("--image-size", fx.image_size, "image side in pixels");

  auto* extract = app.add_subcommand("extract-mock", "mock backbone features for an image manifest");
  std::string ex_manifest, ex_out;
  int ex_grid = 7;
  double ex_max = 0, ex_step = 5;
  extract->add_option("-m,--manifest", ex_manifest, "manifest.csv")->required();
  extract->add_option("-o,--out", ex_out, "feature file (.fvec or .csv)")->required();
  extract->add_option("--grid", ex_grid, "cells per side");
  extract->add_option("--rotation-max", ex_max, "also extract rotated children up to this angle");
  extract->add_option("--rotation-step", ex_step, "angle step");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }

  if (*run) return evaluate(run_args, false, false);
  if (*ablate) return evaluate(ablate_args, true, false);
  if (*sweep) return evaluate(sweep_args, false, true);

  if (*heat) {
    ConfigPtr cfg(nullptr, taxaug_config_destroy);
    if (taxaug_status s = build_config(heat_args, cfg); s != TAXAUG_OK) return report_failure(s, "configuration");
    const std::string dir = output_dir(heat_args, cfg.get());
    size_t written = 0;
    if (taxaug_status s = taxaug_render_heatmaps(cfg.get(), dir.c_str(), &written); s != TAXAUG_OK)
      return report_failure(s, "heatmaps");
    std::cout << written << " heatmaps written to " << dir << "/heatmaps\n";
    return 0;
  }

  if (*fixture) {
    fx.images = fixture_images ? 1 : 0;
    fx.seed = fixture_seed;
    size_t records = 0;
    if (taxaug_status s = taxaug_make_fixture(&fx, fixture_out.c_str(), &records); s != TAXAUG_OK)
      return report_failure(s, "make-fixture");
    std::cout << records << " manifest records written to " << fixture_out << "\n";
    return 0;
  }

  if (*extract) {
    size_t rows = 0;
    if (taxaug_status s = taxaug_extract_mock(ex_manifest.c_str(), ex_out.c_str(), ex_grid, ex_max, ex_step, &rows);
        s != TAXAUG_OK)
      return report_failure(s, "extract-mock");
    std::cout << rows << " feature rows written to " << ex_out << "\n";
    return 0;
  }
  return 1;
}
