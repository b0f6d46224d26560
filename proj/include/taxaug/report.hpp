#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "taxaug/evaluate.hpp"

namespace taxaug {

nlohmann::json to_json(const EvalReport& r);

/// {"schema": "taxaug-report/1", "reports": [...]}, dumped with 2-space indent.
std::string reports_json(const std::vector<EvalReport>& reports);

/// Aligned text table, one row per report: Method, Accuracy (%), delta
/// against the first report (percentage points), CTV (%), seed.
std::string accuracy_table(const std::vector<EvalReport>& reports);

/// label,ctv_percent,mean_components,mean_accuracy,std_accuracy
std::string ctv_curve_csv(const std::vector<EvalReport>& reports);

}  // namespace taxaug
