#include "taxaug/taxaug.h"

#include <cstdlib>
#include <cstring>
#include <new>
#include <string>

#include "taxaug/augment.hpp"
#include "taxaug/error.hpp"
#include "taxaug/fixture.hpp"
#include "taxaug/pipeline.hpp"
#include "taxaug/report.hpp"

struct taxaug_config {
  taxaug::PipelineConfig cfg;
};

struct taxaug_result {
  std::vector<taxaug::EvalReport> reports;
};

namespace {

thread_local std::string last_error;

taxaug_status fail(taxaug_status s, const std::string& msg) {
  last_error = msg;
  return s;
}

taxaug_status status_of(taxaug::ErrorCode c) {
  switch (c) {
    case taxaug::ErrorCode::config: return TAXAUG_E_CONFIG;
    case taxaug::ErrorCode::io: return TAXAUG_E_IO;
    default: return TAXAUG_E_DATA;
  }
}

// Runs f, translating exceptions into status codes.
template <typename F>
taxaug_status guard(F&& f) {
  try {
    last_error.clear();
    return f();
  } catch (const taxaug::Error& e) {
    return fail(status_of(e.code()), e.what());
  } catch (const std::bad_alloc&) {
    return fail(TAXAUG_E_INTERNAL, "out of memory");
  } catch (const std::exception& e) {
    return fail(TAXAUG_E_INTERNAL, e.what());
  } catch (...) {
    return fail(TAXAUG_E_INTERNAL, "unknown error");
  }
}

char* dup(const std::string& s) {
  char* p = static_cast<char*>(std::malloc(s.size() + 1));
  if (!p) throw std::bad_alloc();
  std::memcpy(p, s.c_str(), s.size() + 1);
  return p;
}

taxaug_status finish_run(std::vector<taxaug::EvalReport> reports, taxaug_result** out) {
  int warnings = 0;
  for (const auto& r : reports) warnings += r.convergence_warnings;
  *out = new taxaug_result{std::move(reports)};
  if (warnings > 0)
    return fail(TAXAUG_W_CONVERGENCE, std::to_string(warnings) + " SVM fits stopped at the iteration limit");
  return TAXAUG_OK;
}

const taxaug::EvalReport* at(const taxaug_result* r, size_t i) {
  if (!r || i >= r->reports.size()) return nullptr;
  return &r->reports[i];
}

}  // namespace

extern "C" {

const char* taxaug_version(void) { return "0.1.0"; }
const char* taxaug_last_error(void) { return last_error.c_str(); }
void taxaug_string_free(char* s) { std::free(s); }

taxaug_status taxaug_config_create(taxaug_config** out) {
  if (!out) return fail(TAXAUG_E_ARGUMENT, "out is null");
  return guard([&] {
    *out = new taxaug_config{};
    return TAXAUG_OK;
  });
}

taxaug_status taxaug_config_load(const char* path, taxaug_config** out) {
  if (!path || !out) return fail(TAXAUG_E_ARGUMENT, "null argument");
  return guard([&] {
    *out = new taxaug_config{taxaug::load_config(path)};
    return TAXAUG_OK;
  });
}

taxaug_status taxaug_config_set(taxaug_config* cfg, const char* key, const char* value) {
  if (!cfg || !key || !value) return fail(TAXAUG_E_ARGUMENT, "null argument");
  return guard([&] {
    taxaug::apply_setting(cfg->cfg, key, value);
    return TAXAUG_OK;
  });
}

taxaug_status taxaug_config_get(const taxaug_config* cfg, const char* key, char** value) {
  if (!cfg || !key || !value) return fail(TAXAUG_E_ARGUMENT, "null argument");
  return guard([&] {
    auto e = taxaug::echo(cfg->cfg);
    // Keys that do not change results stay out of the report echo.
    e["output_dir"] = cfg->cfg.output_dir.string();
    e["threads"] = std::to_string(cfg->cfg.threads);
    e["heatmap_mode"] = cfg->cfg.heatmap_mode;
    e["heatmap_ctv"] = std::to_string(cfg->cfg.heatmap_ctv);
    const auto it = e.find(key);
    if (it == e.end()) return fail(TAXAUG_E_CONFIG, std::string("unknown config key '") + key + "'");
    *value = dup(it->second);
    return TAXAUG_OK;
  });
}

taxaug_status taxaug_config_validate(const taxaug_config* cfg) {
  if (!cfg) return fail(TAXAUG_E_ARGUMENT, "null config");
  return guard([&] {
    taxaug::validate(cfg->cfg);
    return TAXAUG_OK;
  });
}

void taxaug_config_destroy(taxaug_config* cfg) { delete cfg; }

taxaug_status taxaug_run_experiment(const taxaug_config* cfg, taxaug_result** out) {
  if (!cfg || !out) return fail(TAXAUG_E_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] { return finish_run({taxaug::run_experiment(cfg->cfg)}, out); });
}

taxaug_status taxaug_run_ablation(const taxaug_config* cfg, taxaug_result** out) {
  if (!cfg || !out) return fail(TAXAUG_E_ARGUMENT, "null argument");
  *out = nullptr;
  return guard([&] { return finish_run(taxaug::run_ablation(cfg->cfg), out); });
}

size_t taxaug_result_count(const taxaug_result* r) { return r ? r->reports.size() : 0; }

taxaug_status taxaug_result_label(const taxaug_result* r, size_t i, const char** label) {
  const auto* e = at(r, i);
  if (!e || !label) return fail(TAXAUG_E_ARGUMENT, "bad result or index");
  *label = e->label.c_str();
  return TAXAUG_OK;
}

taxaug_status taxaug_result_accuracy(const taxaug_result* r, size_t i, double* mean, double* std) {
  const auto* e = at(r, i);
  if (!e || !mean || !std) return fail(TAXAUG_E_ARGUMENT, "bad result or index");
  *mean = e->mean_accuracy;
  *std = e->std_accuracy;
  return TAXAUG_OK;
}

taxaug_status taxaug_result_best_ctv(const taxaug_result* r, size_t i, int* ctv) {
  const auto* e = at(r, i);
  if (!e || !ctv) return fail(TAXAUG_E_ARGUMENT, "bad result or index");
  *ctv = e->best_ctv;
  return TAXAUG_OK;
}

taxaug_status taxaug_result_split_count(const taxaug_result* r, size_t i, size_t* splits) {
  const auto* e = at(r, i);
  if (!e || !splits) return fail(TAXAUG_E_ARGUMENT, "bad result or index");
  *splits = e->splits.size();
  return TAXAUG_OK;
}

int taxaug_result_convergence_warnings(const taxaug_result* r) {
  int n = 0;
  if (r)
    for (const auto& e : r->reports) n += e.convergence_warnings;
  return n;
}

taxaug_status taxaug_result_json(const taxaug_result* r, char** out) {
  if (!r || !out) return fail(TAXAUG_E_ARGUMENT, "null argument");
  return guard([&] {
    *out = dup(taxaug::reports_json(r->reports));
    return TAXAUG_OK;
  });
}

taxaug_status taxaug_result_table(const taxaug_result* r, char** out) {
  if (!r || !out) return fail(TAXAUG_E_ARGUMENT, "null argument");
  return guard([&] {
    *out = dup(taxaug::accuracy_table(r->reports));
    return TAXAUG_OK;
  });
}

taxaug_status taxaug_result_ctv_csv(const taxaug_result* r, char** out) {
  if (!r || !out) return fail(TAXAUG_E_ARGUMENT, "null argument");
  return guard([&] {
    *out = dup(taxaug::ctv_curve_csv(r->reports));
    return TAXAUG_OK;
  });
}

taxaug_status taxaug_result_write(const taxaug_result* r, const char* dir) {
  if (!r || !dir) return fail(TAXAUG_E_ARGUMENT, "null argument");
  return guard([&] {
    taxaug::write_outputs(r->reports, dir);
    return TAXAUG_OK;
  });
}

void taxaug_result_destroy(taxaug_result* r) { delete r; }

taxaug_status taxaug_render_heatmaps(const taxaug_config* cfg, const char* out_dir, size_t* written) {
  if (!cfg || !out_dir) return fail(TAXAUG_E_ARGUMENT, "null argument");
  return guard([&] {
    const auto n = taxaug::render_heatmaps(cfg->cfg, out_dir);
    if (written) *written = n;
    return TAXAUG_OK;
  });
}

void taxaug_fixture_defaults(taxaug_fixture_options* opts) {
  if (!opts) return;
  const taxaug::FixtureOptions d;
  opts->classes = d.classes;
  opts->min_count = d.min_count;
  opts->max_count = d.max_count;
  opts->dims = d.dims;
  opts->gan_per_class = d.gan_per_class;
  opts->images = d.images ? 1 : 0;
  opts->image_size = d.image_size;
  opts->seed = d.seed;
}

taxaug_status taxaug_make_fixture(const taxaug_fixture_options* opts, const char* out_dir, size_t* records) {
  if (!opts || !out_dir) return fail(TAXAUG_E_ARGUMENT, "null argument");
  return guard([&] {
    taxaug::FixtureOptions o;
    o.classes = opts->classes;
    o.min_count = opts->min_count;
    o.max_count = opts->max_count;
    o.dims = opts->dims;
    o.gan_per_class = opts->gan_per_class;
    o.images = opts->images != 0;
    o.image_size = opts->image_size;
    o.seed = opts->seed;
    const auto fx = taxaug::write_fixture(o, out_dir);
    if (records) *records = fx.manifest.records().size();
    return TAXAUG_OK;
  });
}

taxaug_status taxaug_extract_mock(const char* manifest, const char* out_path, int grid, double rotation_max,
                                  double rotation_step, size_t* rows) {
  if (!manifest || !out_path) return fail(TAXAUG_E_ARGUMENT, "null argument");
  return guard([&] {
    if (grid < 1) return fail(TAXAUG_E_CONFIG, "grid must be >= 1");
    std::vector<double> angles;
    if (rotation_max > 0) {
      if (rotation_max > taxaug::kMaxRotationDeg)
        return fail(TAXAUG_E_CONFIG, "rotation_max must be <= 20");
      try {
        angles = taxaug::rotation_set(rotation_max, rotation_step);
      } catch (const taxaug::Error& e) {
        return fail(TAXAUG_E_CONFIG, e.what());
      }
    }
    const auto n = taxaug::extract_mock_features(manifest, out_path, grid, angles);
    if (rows) *rows = n;
    return TAXAUG_OK;
  });
}

taxaug_status taxaug_fvec_validate(const char* path, uint32_t* dims, uint32_t* rows) {
  if (!path) return fail(TAXAUG_E_ARGUMENT, "null argument");
  return guard([&] {
    const auto info = taxaug::validate_feature_file(path);
    if (dims) *dims = info.dims;
    if (rows) *rows = info.rows;
    return TAXAUG_OK;
  });
}

}  // extern "C"
