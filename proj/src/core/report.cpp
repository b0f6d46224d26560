#include "taxaug/report.hpp"

#include <algorithm>
#include <array>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace taxaug {

namespace {

// Fixed precision keeps reruns byte-identical across platforms.
double round6(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6f", v);
  return std::strtod(buf, nullptr);
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

nlohmann::json confusion_json(const ConfusionMatrix& cm) {
  nlohmann::json rows = nlohmann::json::array();
  for (int t = 0; t < cm.classes(); ++t) {
    nlohmann::json row = nlohmann::json::array();
    for (int p = 0; p < cm.classes(); ++p) row.push_back(cm.count(t, p));
    rows.push_back(row);
  }
  return rows;
}

}  // namespace

nlohmann::json to_json(const EvalReport& r) {
  nlohmann::json j;
  j["label"] = r.label;
  j["config"] = r.config;
  j["dataset"] = {{"species", r.dataset.species}, {"originals", r.dataset.originals},
                  {"rotated", r.dataset.rotated}, {"gan", r.dataset.gan},
                  {"min_class", r.dataset.min_class}, {"max_class", r.dataset.max_class}};
  j["best_ctv"] = r.best_ctv;
  j["mean_accuracy"] = round6(r.mean_accuracy);
  j["std_accuracy"] = round6(r.std_accuracy);
  j["convergence_warnings"] = r.convergence_warnings;

  nlohmann::json accs = nlohmann::json::array();
  for (double a : r.split_accuracies) accs.push_back(round6(a));
  j["split_accuracies"] = accs;

  nlohmann::json curve = nlohmann::json::array();
  for (const auto& c : r.ctv_rows)
    curve.push_back({{"ctv_percent", c.ctv_percent}, {"mean_components", round6(c.mean_retained)},
                     {"mean_accuracy", round6(c.mean_accuracy)}, {"std_accuracy", round6(c.std_accuracy)}});
  j["ctv_curve"] = curve;

  nlohmann::json splits = nlohmann::json::array();
  for (const auto& s : r.splits) {
    nlohmann::json sj = {{"repeat", s.repeat}, {"fold", s.fold}, {"ok", s.ok},
                         {"train_records", s.train_records}, {"test_records", s.test_records}};
    if (!s.ok) sj["error"] = s.error;
    nlohmann::json a = nlohmann::json::array();
    for (double v : s.accuracy) a.push_back(round6(v));
    sj["accuracy"] = a;
    sj["components"] = s.retained;
    sj["smote_rows"] = s.smote_rows;
    sj["convergence_warnings"] = s.convergence_warnings;
    splits.push_back(sj);
  }
  j["splits"] = splits;
  j["confusion"] = confusion_json(r.confusion);
  j["notices"] = r.notices;
  return j;
}

std::string reports_json(const std::vector<EvalReport>& reports) {
  nlohmann::json j;
  j["schema"] = "taxaug-report/1";
  j["reports"] = nlohmann::json::array();
  for (const auto& r : reports) j["reports"].push_back(to_json(r));
  return j.dump(2) + "\n";
}

std::string accuracy_table(const std::vector<EvalReport>& reports) {
  std::vector<std::array<std::string, 5>> rows;
  rows.push_back({"Method", "Accuracy (%)", "Delta (pp)", "CTV (%)", "Seed"});
  for (const auto& r : reports) {
    const double delta = 100.0 * (r.mean_accuracy - reports.front().mean_accuracy);
    const auto seed = r.config.find("seed");
    rows.push_back({r.label,
                    fixed(100.0 * r.mean_accuracy, 2) + " +/- " + fixed(100.0 * r.std_accuracy, 2),
                    (delta >= 0 ? "+" : "") + fixed(delta, 2), std::to_string(r.best_ctv),
                    seed == r.config.end() ? "" : seed->second});
  }
  std::array<std::size_t, 5> width{};
  for (const auto& row : rows)
    for (std::size_t c = 0; c < row.size(); ++c) width[c] = std::max(width[c], row[c].size());

  std::ostringstream os;
  auto line = [&](const std::array<std::string, 5>& row) {
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) os << "  ";
      const std::string pad(width[c] - row[c].size(), ' ');
      os << (c == 0 ? row[c] + pad : pad + row[c]);
    }
    os << '\n';
  };
  line(rows[0]);
  std::size_t total = 2 * (width.size() - 1);
  for (auto w : width) total += w;
  os << std::string(total, '-') << '\n';
  for (std::size_t i = 1; i < rows.size(); ++i) line(rows[i]);
  return os.str();
}

std::string ctv_curve_csv(const std::vector<EvalReport>& reports) {
  std::ostringstream os;
  os << "label,ctv_percent,mean_components,mean_accuracy,std_accuracy\n";
  for (const auto& r : reports)
    for (const auto& c : r.ctv_rows)
      os << r.label << ',' << c.ctv_percent << ',' << fixed(c.mean_retained, 3) << ','
         << fixed(c.mean_accuracy, 6) << ',' << fixed(c.std_accuracy, 6) << '\n';
  return os.str();
}

}  // namespace taxaug
