#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "taxaug/augment.hpp"
#include "taxaug/error.hpp"
#include "taxaug/pipeline.hpp"

namespace taxaug {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  std::string out = s.substr(b, e - b + 1);
  if (out.size() >= 2 && out.front() == '"' && out.back() == '"') out = out.substr(1, out.size() - 2);
  return out;
}

[[noreturn]] void bad(const std::string& key, const std::string& value, const std::string& why) {
  throw Error(ErrorCode::config, "config key '" + key + "' = '" + value + "': " + why);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  bad(key, v, "expected true or false");
}

template <typename T>
T to_number(const std::string& key, const std::string& v) {
  T out{};
  auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (ec != std::errc() || ptr != v.data() + v.size()) bad(key, v, "expected a number");
  if constexpr (std::is_floating_point_v<T>)
    if (!std::isfinite(out)) bad(key, v, "expected a finite number");
  return out;
}

std::filesystem::path to_path(const std::string& v, const std::filesystem::path& base) {
  std::filesystem::path p = v;
  if (p.is_relative() && !base.empty()) p = base / p;
  return p.lexically_normal();
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

std::string join(const std::vector<int>& v) {
  std::string s;
  for (std::size_t i = 0; i < v.size(); ++i) s += (i ? "," : "") + std::to_string(v[i]);
  return s;
}

}  // namespace

void apply_setting(PipelineConfig& c, const std::string& key, const std::string& value,
                   const std::filesystem::path& base) {
  const std::string& v = value;
  if (key == "manifest") {
    c.manifest = to_path(v, base);
  } else if (key == "feature_source") {
    if (v == "mock") c.feature_source = FeatureSourceKind::mock;
    else if (v == "file" || v == "fvec") c.feature_source = FeatureSourceKind::file;
    else bad(key, v, "expected mock or file");
  } else if (key == "feature_file") {
    c.feature_file = v.empty() ? std::filesystem::path() : to_path(v, base);
    if (!v.empty()) c.feature_source = FeatureSourceKind::file;
  } else if (key == "mock_grid") {
    c.mock_grid = to_number<int>(key, v);
  } else if (key == "rotation") {
    c.rotation = to_bool(key, v);
  } else if (key == "gan_ingest") {
    c.gan_ingest = to_bool(key, v);
  } else if (key == "smote") {
    c.smote = to_bool(key, v);
  } else if (key == "gan_in_folds") {
    c.gan_in_folds = to_bool(key, v);
  } else if (key == "rotation_max") {
    c.rotation_max = to_number<double>(key, v);
  } else if (key == "rotation_step") {
    c.rotation_step = to_number<double>(key, v);
  } else if (key == "smote_k") {
    c.smote_config.k_neighbors = to_number<std::size_t>(key, v);
  } else if (key == "smote_target") {
    if (v == "match_majority") {
      c.smote_config.target = SmoteTarget::match_majority;
    } else if (v.rfind("fixed:", 0) == 0) {
      c.smote_config.target = SmoteTarget::fixed_per_class;
      c.smote_config.per_class = to_number<std::size_t>(key, v.substr(6));
    } else {
      bad(key, v, "expected match_majority or fixed:<count>");
    }
  } else if (key == "smote_singletons") {
    if (v == "skip") c.smote_config.singletons = SingletonPolicy::skip;
    else if (v == "error") c.smote_config.singletons = SingletonPolicy::error;
    else bad(key, v, "expected skip or error");
  } else if (key == "svm_c") {
    c.svm.C = to_number<double>(key, v);
  } else if (key == "svm_tol") {
    c.svm.tol = to_number<double>(key, v);
  } else if (key == "svm_max_iter") {
    c.svm.max_iter = to_number<int>(key, v);
  } else if (key == "standardize") {
    c.standardize = to_bool(key, v);
  } else if (key == "ctv_grid") {
    std::vector<int> grid;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) grid.push_back(to_number<int>(key, trim(item)));
    c.ctv_grid = grid;
  } else if (key == "pca_fit") {
    if (v == "fold") c.pca_fit = PcaFitMode::per_fold;
    else if (v == "global") c.pca_fit = PcaFitMode::global;
    else bad(key, v, "expected fold or global");
  } else if (key == "repeats") {
    c.repeats = to_number<int>(key, v);
  } else if (key == "folds" || key == "k") {
    c.folds = to_number<int>(key, v);
  } else if (key == "seed") {
    c.seed = to_number<std::uint64_t>(key, v);
  } else if (key == "min_per_class") {
    c.min_per_class = to_number<std::size_t>(key, v);
  } else if (key == "threads") {
    c.threads = to_number<int>(key, v);
  } else if (key == "output_dir") {
    c.output_dir = to_path(v, base);
  } else if (key == "heatmap_mode") {
    if (v != "sample" && v != "class") bad(key, v, "expected sample or class");
    c.heatmap_mode = v;
  } else if (key == "heatmap_ctv") {
    c.heatmap_ctv = to_number<int>(key, v);
  } else if (key == "heatmap_alpha") {
    c.heatmap_alpha = to_number<double>(key, v);
  } else if (key == "heatmap_raw_csv") {
    c.heatmap_raw_csv = to_bool(key, v);
  } else {
    throw Error(ErrorCode::config, "unknown config key '" + key + "'");
  }
}

PipelineConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::config, "cannot open config '" + path.string() + "'");
  PipelineConfig cfg;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw Error(ErrorCode::config, path.string() + ":" + std::to_string(line_no) + ": expected key = value");
    apply_setting(cfg, trim(line.substr(0, eq)), trim(line.substr(eq + 1)), path.parent_path());
  }
  return cfg;
}

void validate(const PipelineConfig& c) {
  auto fail = [](const std::string& why) { throw Error(ErrorCode::config, why); };
  if (c.manifest.empty()) fail("no manifest configured");
  if (!c.seed) fail("no seed configured");
  if (c.repeats < 1) fail("repeats must be >= 1");
  if (c.folds < 2) fail("folds must be >= 2");
  if (c.threads < 1) fail("threads must be >= 1");
  if (c.mock_grid < 1) fail("mock_grid must be >= 1");
  if (c.ctv_grid.empty()) fail("ctv_grid is empty");
  for (int v : c.ctv_grid)
    if (v < 10 || v > 100 || v % 10 != 0) fail("ctv_grid values must come from {10, 20, ..., 100}");
  if (std::adjacent_find(c.ctv_grid.begin(), c.ctv_grid.end(), std::greater_equal<int>()) != c.ctv_grid.end())
    fail("ctv_grid must be strictly ascending");
  if (!(c.svm.C > 0)) fail("svm_c must be > 0");
  if (!(c.svm.tol > 0)) fail("svm_tol must be > 0");
  if (c.svm.max_iter < 1) fail("svm_max_iter must be >= 1");
  if (c.smote_config.k_neighbors < 1) fail("smote_k must be >= 1");
  if (c.smote_config.target == SmoteTarget::fixed_per_class && c.smote_config.per_class < 1)
    fail("smote_target fixed:<count> needs count >= 1");
  if (c.rotation && (c.rotation_max > 20.0 || c.rotation_step <= 0.0))
    fail("rotation needs 0 < rotation_step and rotation_max <= 20");
  if (c.rotation) {
    try {
      rotation_set(c.rotation_max, c.rotation_step);
    } catch (const Error& e) {
      fail(e.what());
    }
  }
  if (c.gan_in_folds && !c.gan_ingest) fail("gan_in_folds requires gan_ingest");
  if (c.heatmap_ctv < 10 || c.heatmap_ctv > 100 || c.heatmap_ctv % 10 != 0)
    fail("heatmap_ctv must come from {10, 20, ..., 100}");
  if (!(c.heatmap_alpha >= 0 && c.heatmap_alpha <= 1)) fail("heatmap_alpha must lie in [0, 1]");
}

std::map<std::string, std::string> echo(const PipelineConfig& c) {
  std::map<std::string, std::string> e;
  e["manifest"] = c.manifest.string();
  e["feature_source"] = c.feature_source == FeatureSourceKind::mock ? "mock" : "file";
  e["feature_file"] = c.feature_file.string();
  e["mock_grid"] = std::to_string(c.mock_grid);
  e["rotation"] = c.rotation ? "true" : "false";
  e["gan_ingest"] = c.gan_ingest ? "true" : "false";
  e["smote"] = c.smote ? "true" : "false";
  e["gan_in_folds"] = c.gan_in_folds ? "true" : "false";
  e["rotation_max"] = fmt(c.rotation_max);
  e["rotation_step"] = fmt(c.rotation_step);
  e["smote_k"] = std::to_string(c.smote_config.k_neighbors);
  e["smote_target"] = c.smote_config.target == SmoteTarget::match_majority
                          ? "match_majority"
                          : "fixed:" + std::to_string(c.smote_config.per_class);
  e["smote_singletons"] = c.smote_config.singletons == SingletonPolicy::skip ? "skip" : "error";
  e["svm_c"] = fmt(c.svm.C);
  e["svm_tol"] = fmt(c.svm.tol);
  e["svm_max_iter"] = std::to_string(c.svm.max_iter);
  e["standardize"] = c.standardize ? "true" : "false";
  e["ctv_grid"] = join(c.ctv_grid);
  e["pca_fit"] = c.pca_fit == PcaFitMode::per_fold ? "fold" : "global";
  e["repeats"] = std::to_string(c.repeats);
  e["folds"] = std::to_string(c.folds);
  e["seed"] = c.seed ? std::to_string(*c.seed) : "";
  e["min_per_class"] = std::to_string(c.min_per_class ? c.min_per_class : static_cast<std::size_t>(c.folds));
  return e;
}

}  // namespace taxaug
