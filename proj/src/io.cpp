#include "vbsparse/io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "vbsparse/errors.hpp"

namespace vbsparse {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::stringstream ss(line);
  while (std::getline(ss, field, ',')) {
    while (!field.empty() && (field.back() == '\r' || field.back() == ' '))
      field.pop_back();
    std::size_t start = 0;
    while (start < field.size() && field[start] == ' ') ++start;
    fields.push_back(field.substr(start));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_double(const std::string& token, int row, const std::string& column) {
  try {
    std::size_t used = 0;
    const double v = std::stod(token, &used);
    if (used != token.size()) throw std::invalid_argument("trailing characters");
    return v;
  } catch (const std::exception&) {
    throw DimensionMismatch("cannot parse value \"" + token + "\" at row " +
                            std::to_string(row) + ", column \"" + column + "\"");
  }
}

std::vector<std::vector<double>> read_rows(std::ifstream& in,
                                           const std::vector<std::string>& header) {
  std::vector<std::vector<double>> rows;
  std::string line;
  int row_number = 1;
  while (std::getline(in, line)) {
    ++row_number;
    if (line.empty() || (line.size() == 1 && line[0] == '\r')) continue;
    const std::vector<std::string> fields = split_csv_line(line);
    if (fields.size() != header.size())
      throw DimensionMismatch("row " + std::to_string(row_number) + " has " +
                              std::to_string(fields.size()) + " fields, expected " +
                              std::to_string(header.size()));
    std::vector<double> values(fields.size());
    for (std::size_t c = 0; c < fields.size(); ++c)
      values[c] = parse_double(fields[c], row_number, header[c]);
    rows.push_back(std::move(values));
  }
  if (rows.empty()) throw EmptyInput("CSV has no data rows");
  return rows;
}

}  // namespace

CsvData load_regression_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EmptyInput("cannot open \"" + path + "\"");
  std::string header_line;
  if (!std::getline(in, header_line)) throw EmptyInput("CSV \"" + path + "\" is empty");
  const std::vector<std::string> header = split_csv_line(header_line);

  int y_col = -1;
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == "y") y_col = static_cast<int>(c);
  if (y_col < 0) throw DimensionMismatch("CSV has no column named \"y\"");

  const auto rows = read_rows(in, header);
  const int n = static_cast<int>(rows.size());
  const int p = static_cast<int>(header.size()) - 1;
  if (p < 1) throw DimensionMismatch("CSV needs at least one predictor column");

  CsvData data;
  data.X.resize(n, p);
  data.y.resize(n);
  for (std::size_t c = 0; c < header.size(); ++c)
    if (static_cast<int>(c) != y_col) data.predictor_names.push_back(header[c]);
  for (int i = 0; i < n; ++i) {
    int k = 0;
    for (std::size_t c = 0; c < header.size(); ++c) {
      if (static_cast<int>(c) == y_col)
        data.y[i] = rows[i][c];
      else
        data.X(i, k++) = rows[i][c];
    }
  }
  return data;
}

Eigen::VectorXd load_response_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw EmptyInput("cannot open \"" + path + "\"");
  std::string header_line;
  if (!std::getline(in, header_line)) throw EmptyInput("CSV \"" + path + "\" is empty");
  const std::vector<std::string> header = split_csv_line(header_line);
  int y_col = -1;
  if (header.size() == 1 && header[0] != "y") {
    // single unnamed column: treat the first line as data if it parses
    try {
      parse_double(header[0], 1, "y");
      in.seekg(0);
      std::vector<std::string> pseudo_header{"y"};
      std::ifstream in2(path);
      const auto rows = read_rows(in2, pseudo_header);
      Eigen::VectorXd y(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) y[static_cast<int>(i)] = rows[i][0];
      return y;
    } catch (const DimensionMismatch&) {
      // fall through to header handling
    }
  }
  for (std::size_t c = 0; c < header.size(); ++c)
    if (header[c] == "y") y_col = static_cast<int>(c);
  if (y_col < 0) throw DimensionMismatch("CSV has no column named \"y\"");
  const auto rows = read_rows(in, header);
  Eigen::VectorXd y(rows.size());
  for (std::size_t i = 0; i < rows.size(); ++i)
    y[static_cast<int>(i)] = rows[i][y_col];
  return y;
}

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

nlohmann::json scenario_to_json(const ScenarioSpec& spec) {
  nlohmann::json j;
  j["n"] = spec.n;
  j["p"] = spec.p;
  j["s"] = spec.s;
  j["beta_star"] = std::vector<double>(spec.beta_star.data(),
                                       spec.beta_star.data() + spec.beta_star.size());
  j["rho"] = spec.rho;
  j["sigma_true"] = spec.sigma_true;
  j["design"] = to_string(spec.design);
  j["seed"] = spec.seed;
  j["replications"] = spec.replications;
  return j;
}

ScenarioSpec scenario_from_json(const nlohmann::json& j) {
  ScenarioSpec spec;
  try {
    spec.n = j.at("n").get<int>();
    spec.p = j.at("p").get<int>();
    spec.s = j.at("s").get<int>();
    const auto beta = j.at("beta_star").get<std::vector<double>>();
    spec.beta_star = Eigen::Map<const Eigen::VectorXd>(beta.data(), beta.size());
    spec.rho = j.at("rho").get<double>();
    spec.sigma_true = j.at("sigma_true").get<double>();
    spec.design = design_from_string(j.at("design").get<std::string>());
    spec.seed = j.at("seed").get<std::uint64_t>();
    spec.replications = j.at("replications").get<int>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("bad scenario JSON: ") + e.what());
  }
  validate(spec);
  return spec;
}

nlohmann::json prior_to_json(const PriorConfig& prior) {
  nlohmann::json j;
  j["a"] = prior.a;
  j["c"] = prior.c;
  j["alpha"] = prior.alpha;
  j["gamma"] = prior.gamma;
  j["a0"] = prior.a0;
  j["b0"] = prior.b0;
  j["delta"] = prior.delta;
  j["L"] = prior.L;
  j["grid_lo_frac"] = prior.grid_lo_frac;
  j["grid_hi_frac"] = prior.grid_hi_frac;
  return j;
}

PriorConfig prior_from_json(const nlohmann::json& j) {
  PriorConfig prior;
  try {
    if (j.contains("a")) prior.a = j["a"].get<double>();
    if (j.contains("c")) prior.c = j["c"].get<double>();
    if (j.contains("alpha")) prior.alpha = j["alpha"].get<double>();
    if (j.contains("gamma")) prior.gamma = j["gamma"].get<double>();
    if (j.contains("a0")) prior.a0 = j["a0"].get<double>();
    if (j.contains("b0")) prior.b0 = j["b0"].get<double>();
    if (j.contains("delta")) prior.delta = j["delta"].get<double>();
    if (j.contains("L")) prior.L = j["L"].get<int>();
    if (j.contains("grid_lo_frac")) prior.grid_lo_frac = j["grid_lo_frac"].get<double>();
    if (j.contains("grid_hi_frac")) prior.grid_hi_frac = j["grid_hi_frac"].get<double>();
  } catch (const nlohmann::json::exception& e) {
    throw InvalidSpec(std::string("bad prior JSON: ") + e.what());
  }
  return prior;
}

namespace {
std::vector<double> to_std(const Eigen::VectorXd& v) {
  return std::vector<double>(v.data(), v.data() + v.size());
}
}  // namespace

nlohmann::json summarize(const FitResult& fit) {
  nlohmann::json j;
  j["S_hat"] = fit.S_hat;
  j["beta_hat"] = to_std(fit.beta_hat_raw);
  j["intercept"] = fit.intercept_raw;
  j["beta_hat_standardized"] = to_std(fit.beta_hat);
  j["phi"] = to_std(fit.phi);
  j["mu"] = to_std(fit.mu);
  j["tau2"] = to_std(fit.tau2);
  j["weights"] = to_std(fit.grid.weights);
  j["sigma2_grid"] = to_std(fit.grid.sigma2_grid);
  j["lasso"] = {{"lambda", fit.lasso.lambda},
                {"sigma2_hat", fit.lasso.sigma2_hat},
                {"active_size", fit.lasso.active_set.size()}};
  nlohmann::json grid = nlohmann::json::array();
  for (std::size_t l = 0; l < fit.grid.states.size(); ++l) {
    grid.push_back({{"sigma2", fit.grid.sigma2_grid[static_cast<int>(l)]},
                    {"selected_size", fit.grid.selected_sets[l].size()},
                    {"log_weight", fit.grid.log_weights[static_cast<int>(l)]},
                    {"sweeps", fit.grid.diagnostics[l].sweeps.size()},
                    {"converged", fit.grid.diagnostics[l].converged}});
  }
  j["grid"] = grid;
  return j;
}

nlohmann::json metrics_to_json(const MetricsReport& report, bool include_runtime) {
  nlohmann::json j;
  j["scenario"] = report.scenario;
  j["method"] = report.method;
  j["replications"] = report.replications;
  j["l2_mean"] = report.l2_mean;
  j["l2_se"] = report.l2_se;
  j["mean_model_size"] = report.mean_model_size;
  j["p_superset"] = report.p_superset;
  j["p_exact"] = report.p_exact;
  if (include_runtime) j["runtime_sec_mean"] = report.runtime_sec_mean;
  return j;
}

std::string metrics_csv_header(bool include_runtime) {
  std::string h = "scenario,method,replications,l2_mean,l2_se,mean_model_size,p_superset,p_exact";
  if (include_runtime) h += ",runtime_sec_mean";
  return h + "\n";
}

std::string metrics_csv_row(const MetricsReport& r, bool include_runtime) {
  std::string row = r.scenario + "," + r.method + "," + std::to_string(r.replications) +
                    "," + format_double(r.l2_mean) + "," + format_double(r.l2_se) + "," +
                    format_double(r.mean_model_size) + "," + format_double(r.p_superset) +
                    "," + format_double(r.p_exact);
  if (include_runtime) row += "," + format_double(r.runtime_sec_mean);
  return row + "\n";
}

std::string coverage_csv(const CoverageReport& report) {
  const int n = static_cast<int>(report.coverage.size());
  const int shown = static_cast<int>(std::ceil(0.2 * n));
  std::string out = "coordinate,beta_star,coverage,mean_length,mean_phi\n";
  for (int i = 0; i < shown; ++i) {
    out += std::to_string(i) + "," + format_double(report.beta_star[i]) + "," +
           format_double(report.coverage[i]) + "," + format_double(report.mean_length[i]) +
           "," + format_double(report.mean_phi[i]) + "\n";
  }
  return out;
}

std::string diagnostics_jsonl(const CaviDiagnostics& diag) {
  std::string out;
  for (const SweepRecord& rec : diag.sweeps) {
    nlohmann::json j;
    j["sweep"] = rec.sweep;
    j["max_entropy_delta"] = rec.max_entropy_delta;
    j["surrogate_elbo"] = rec.surrogate_elbo;
    out += j.dump() + "\n";
  }
  return out;
}

}  // namespace vbsparse
