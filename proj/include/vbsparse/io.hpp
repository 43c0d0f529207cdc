#pragma once

#include <json.hpp>
#include <string>
#include <vector>

#include "vbsparse/data.hpp"
#include "vbsparse/metrics.hpp"
#include "vbsparse/posterior.hpp"
#include "vbsparse/seqmodel.hpp"

namespace vbsparse {

struct CsvData {
  Eigen::MatrixXd X;
  Eigen::VectorXd y;
  std::vector<std::string> predictor_names;
};

/// Reads a UTF-8 CSV with one header row; the column named "y" is the
/// response and every other column a predictor. Errors name the offending
/// row/column.
CsvData load_regression_csv(const std::string& path);

/// Reads just the "y" column (or a single unnamed column) for the means model.
Eigen::VectorXd load_response_csv(const std::string& path);

/// Shortest round-trip decimal representation; identical values therefore
/// print identically in CSV and JSON outputs.
std::string format_double(double v);

nlohmann::json scenario_to_json(const ScenarioSpec& spec);
ScenarioSpec scenario_from_json(const nlohmann::json& j);

nlohmann::json prior_to_json(const PriorConfig& prior);
PriorConfig prior_from_json(const nlohmann::json& j);

/// Serializable record of a fit: selected set, raw-scale estimates, phi,
/// grid weights and per-grid diagnostics.
nlohmann::json summarize(const FitResult& fit);

nlohmann::json metrics_to_json(const MetricsReport& report, bool include_runtime);
std::string metrics_csv_header(bool include_runtime);
std::string metrics_csv_row(const MetricsReport& report, bool include_runtime);

/// Coverage rows for the first ceil(0.2 n) coordinates:
/// coordinate,beta_star,coverage,mean_length,mean_phi
std::string coverage_csv(const CoverageReport& report);

/// One JSON object per line: {"sweep":..,"max_entropy_delta":..,"surrogate_elbo":..}
std::string diagnostics_jsonl(const CaviDiagnostics& diag);

}  // namespace vbsparse
