// vbsparse — sparse spike-and-slab regression via coordinate-ascent
// variational inference with empirically centered priors.
//
// Subcommands: fit, simulate, means-fit, catalog.
// Exit codes: 0 ok, 2 input error, 3 numerical error.

#include <CLI11.hpp>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>

#include "vbsparse/errors.hpp"
#include "vbsparse/io.hpp"
#include "vbsparse/lasso.hpp"
#include "vbsparse/posterior.hpp"
#include "vbsparse/seqmodel.hpp"
#include "vbsparse/simulate.hpp"

namespace {

using vbsparse::PriorConfig;

struct PriorFlags {
  std::optional<double> a, c, alpha, gamma, a0, b0, delta, grid_lo, grid_hi;
  std::optional<int> grid_L;
  std::string config_path;

  PriorConfig resolve() const {
    PriorConfig prior;
    if (!config_path.empty()) {
      std::ifstream in(config_path);
      if (!in) throw vbsparse::EmptyInput("cannot open config \"" + config_path + "\"");
      nlohmann::json j;
      in >> j;
      prior = vbsparse::prior_from_json(j);
    }
    if (a) prior.a = *a;
    if (c) prior.c = *c;
    if (alpha) prior.alpha = *alpha;
    if (gamma) prior.gamma = *gamma;
    if (a0) prior.a0 = *a0;
    if (b0) prior.b0 = *b0;
    if (delta) prior.delta = *delta;
    if (grid_L) prior.L = *grid_L;
    if (grid_lo) prior.grid_lo_frac = *grid_lo;
    if (grid_hi) prior.grid_hi_frac = *grid_hi;
    return prior;
  }
};

void add_prior_flags(CLI::App* cmd, PriorFlags& flags) {
  cmd->add_option("--config", flags.config_path, "PriorConfig JSON file");
  cmd->add_option("--a", flags.a, "size-prior exponent");
  cmd->add_option("--c", flags.c, "size-prior base");
  cmd->add_option("--alpha", flags.alpha, "likelihood power");
  cmd->add_option("--gamma", flags.gamma, "prior precision scale");
  cmd->add_option("--a0", flags.a0, "inverse-gamma shape");
  cmd->add_option("--b0", flags.b0, "inverse-gamma scale");
  cmd->add_option("--delta", flags.delta, "entropy stopping threshold");
  cmd->add_option("--grid-L", flags.grid_L, "sigma^2 grid size");
  cmd->add_option("--grid-lo", flags.grid_lo, "grid lower endpoint as fraction of sigma2_hat");
  cmd->add_option("--grid-hi", flags.grid_hi, "grid upper endpoint as fraction of sigma2_hat");
}

void write_or_print(const std::string& content, const std::string& path) {
  if (path.empty()) {
    std::cout << content;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out) throw vbsparse::EmptyInput("cannot write \"" + path + "\"");
  out << content;
}

int run_fit(const std::string& csv_path, const PriorFlags& flags,
            std::optional<double> lambda, std::optional<double> sigma2,
            const std::string& out_path, const std::string& diag_path) {
  const PriorConfig prior = flags.resolve();
  const vbsparse::CsvData csv = vbsparse::load_regression_csv(csv_path);
  const vbsparse::Dataset data = vbsparse::standardize(csv.X, csv.y);
  const vbsparse::LassoFit lasso = vbsparse::lasso_fit(data, lambda);

  std::optional<Eigen::VectorXd> grid;
  if (sigma2) {
    Eigen::VectorXd g(1);
    g[0] = *sigma2;
    grid = g;
  }
  const vbsparse::FitResult fit = vbsparse::fit_vb_empirical(data, prior, lasso, grid);

  if (!diag_path.empty()) {
    std::string lines;
    for (const auto& d : fit.grid.diagnostics) lines += vbsparse::diagnostics_jsonl(d);
    write_or_print(lines, diag_path);
  }
  write_or_print(vbsparse::summarize(fit).dump(2) + "\n", out_path);
  return 0;
}

int run_means_fit(const std::string& csv_path, const PriorFlags& flags, double sigma2,
                  std::optional<double> zeta, const std::string& out_path) {
  const PriorConfig prior = flags.resolve();
  const Eigen::VectorXd y = vbsparse::load_response_csv(csv_path);
  const vbsparse::MeansFit fit = vbsparse::fit_means(y, sigma2, prior);

  nlohmann::json j;
  j["lambda_n"] = fit.lambda_n;
  j["tau2"] = fit.tau2;
  j["sigma2"] = fit.sigma2;
  std::vector<double> phi(fit.phi.data(), fit.phi.data() + fit.phi.size());
  j["phi"] = phi;
  std::vector<int> s_hat;
  std::vector<double> beta_hat(y.size());
  for (int i = 0; i < y.size(); ++i) {
    beta_hat[i] = fit.phi[i] * fit.mu[i];
    if (fit.phi[i] > 0.5) s_hat.push_back(i);
  }
  j["beta_hat"] = beta_hat;
  j["S_hat"] = s_hat;
  if (zeta) {
    std::vector<double> lower(y.size()), upper(y.size());
    Eigen::VectorXd w = Eigen::VectorXd::Zero(y.size());
    for (int i = 0; i < y.size(); ++i) {
      w[i] = 1.0;
      lower[i] = vbsparse::mixture_quantile(fit, w, *zeta);
      upper[i] = vbsparse::mixture_quantile(fit, w, 1.0 - *zeta);
      w[i] = 0.0;
    }
    j["interval_lower"] = lower;
    j["interval_upper"] = upper;
    j["zeta"] = *zeta;
  }
  write_or_print(j.dump(2) + "\n", out_path);
  return 0;
}

int run_simulate(const std::string& scenario, const std::string& spec_path,
                 const PriorFlags& flags, std::optional<int> reps,
                 std::optional<std::uint64_t> seed, std::optional<int> threads,
                 const std::string& out_prefix, const std::string& format, bool timing,
                 double zeta) {
  vbsparse::ScenarioSpec spec;
  std::string name = scenario;
  if (!spec_path.empty()) {
    std::ifstream in(spec_path);
    if (!in) throw vbsparse::EmptyInput("cannot open spec \"" + spec_path + "\"");
    nlohmann::json j;
    in >> j;
    spec = vbsparse::scenario_from_json(j);
    if (name.empty()) name = "custom";
  } else {
    bool found = false;
    std::string known;
    for (const auto& entry : vbsparse::scenario_catalog()) {
      known += entry.name + " ";
      if (entry.name == scenario) {
        spec = entry.spec;
        found = true;
      }
    }
    if (!found)
      throw vbsparse::InvalidSpec("unknown scenario \"" + scenario +
                                  "\"; valid names: " + known);
  }

  vbsparse::SimulateOptions opts;
  opts.reps = reps;
  opts.seed = seed;
  opts.threads = vbsparse::resolve_threads(threads);
  opts.prior = flags.resolve();
  opts.zeta = zeta;

  const vbsparse::SimulateOutput out = vbsparse::run_simulation(name, spec, opts);

  std::string csv = vbsparse::metrics_csv_header(timing);
  nlohmann::json rows = nlohmann::json::array();
  for (const auto& row : out.rows) {
    csv += vbsparse::metrics_csv_row(row, timing);
    rows.push_back(vbsparse::metrics_to_json(row, timing));
  }
  const std::string json_text = rows.dump(2) + "\n";

  if (!out_prefix.empty()) {
    write_or_print(csv, out_prefix + ".csv");
    write_or_print(json_text, out_prefix + ".json");
    if (out.coverage)
      write_or_print(vbsparse::coverage_csv(*out.coverage), out_prefix + "_coverage.csv");
  }
  std::cout << (format == "json" ? json_text : csv);
  return 0;
}

int run_catalog(const std::string& format) {
  const auto catalog = vbsparse::scenario_catalog();
  if (format == "json") {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& entry : catalog)
      arr.push_back({{"name", entry.name}, {"spec", vbsparse::scenario_to_json(entry.spec)}});
    std::cout << arr.dump(2) << "\n";
  } else {
    std::cout << "name,design,n,p,s,rho,sigma_true,seed,replications\n";
    for (const auto& entry : catalog) {
      const auto& s = entry.spec;
      std::cout << entry.name << "," << to_string(s.design) << "," << s.n << "," << s.p
                << "," << s.s << "," << vbsparse::format_double(s.rho) << ","
                << vbsparse::format_double(s.sigma_true) << "," << s.seed << ","
                << s.replications << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"sparse empirical-Bayes regression via variational inference"};
  app.require_subcommand(1);

  // fit
  auto* fit_cmd = app.add_subcommand("fit", "fit a CSV dataset");
  std::string fit_csv, fit_out, fit_diag, fit_lambda_text;
  std::optional<double> fit_sigma2;
  PriorFlags fit_flags;
  fit_cmd->add_option("csv", fit_csv, "input CSV with a \"y\" column")->required();
  add_prior_flags(fit_cmd, fit_flags);
  fit_cmd->add_option("--lambda", fit_lambda_text, "lasso penalty (number or \"auto\")");
  fit_cmd->add_option("--sigma2", fit_sigma2, "fixed sigma^2 (single grid point)");
  fit_cmd->add_option("--out", fit_out, "output file (default stdout)");
  fit_cmd->add_option("--diagnostics", fit_diag, "write per-sweep JSON lines here");

  // simulate
  auto* sim_cmd = app.add_subcommand("simulate", "run a simulation scenario");
  std::string sim_name, sim_spec_path, sim_out, sim_format = "csv";
  std::optional<int> sim_reps, sim_threads;
  std::optional<std::uint64_t> sim_seed;
  bool sim_timing = false;
  double sim_zeta = 0.025;
  PriorFlags sim_flags;
  sim_cmd->add_option("scenario", sim_name, "catalog scenario name");
  sim_cmd->add_option("--spec", sim_spec_path, "ScenarioSpec JSON file");
  add_prior_flags(sim_cmd, sim_flags);
  sim_cmd->add_option("--reps", sim_reps, "replications (default: spec value)");
  sim_cmd->add_option("--seed", sim_seed, "seed override");
  sim_cmd->add_option("--threads", sim_threads, "worker threads (or VBSPARSE_THREADS)");
  sim_cmd->add_option("--out", sim_out, "output prefix for .csv/.json files");
  sim_cmd->add_option("--format", sim_format, "stdout format: csv or json")
      ->check(CLI::IsMember({"csv", "json"}));
  sim_cmd->add_flag("--timing", sim_timing, "include wall-clock runtime column");
  sim_cmd->add_option("--zeta", sim_zeta, "credible tail level for coverage output");

  // means-fit
  auto* means_cmd = app.add_subcommand("means-fit", "closed-form normal-means fit");
  std::string means_csv, means_out;
  double means_sigma2 = 1.0;
  std::optional<double> means_zeta;
  PriorFlags means_flags;
  means_cmd->add_option("csv", means_csv, "input CSV with a \"y\" column")->required();
  add_prior_flags(means_cmd, means_flags);
  means_cmd->add_option("--sigma2", means_sigma2, "known noise variance (default 1)");
  means_cmd->add_option("--zeta", means_zeta, "emit equal-tailed credible intervals");
  means_cmd->add_option("--out", means_out, "output file (default stdout)");

  // catalog
  auto* cat_cmd = app.add_subcommand("catalog", "list built-in scenarios");
  std::string cat_format = "csv";
  cat_cmd->add_option("--format", cat_format, "csv or json")
      ->check(CLI::IsMember({"csv", "json"}));

  CLI11_PARSE(app, argc, argv);

  try {
    if (*fit_cmd) {
      std::optional<double> lambda;
      if (!fit_lambda_text.empty() && fit_lambda_text != "auto")
        lambda = std::stod(fit_lambda_text);
      return run_fit(fit_csv, fit_flags, lambda, fit_sigma2, fit_out, fit_diag);
    }
    if (*sim_cmd) {
      if (sim_name.empty() && sim_spec_path.empty())
        throw vbsparse::InvalidSpec("simulate needs a scenario name or --spec file");
      return run_simulate(sim_name, sim_spec_path, sim_flags, sim_reps, sim_seed,
                          sim_threads, sim_out, sim_format, sim_timing, sim_zeta);
    }
    if (*means_cmd)
      return run_means_fit(means_csv, means_flags, means_sigma2, means_zeta, means_out);
    if (*cat_cmd) return run_catalog(cat_format);
  } catch (const vbsparse::NonConvergence& e) {
    std::cerr << "vbsparse: numerical error: " << e.what() << "\n";
    return 3;
  } catch (const vbsparse::SingularSubmatrix& e) {
    std::cerr << "vbsparse: numerical error: " << e.what() << "\n";
    return 3;
  } catch (const vbsparse::NumericalOverflow& e) {
    std::cerr << "vbsparse: numerical error: " << e.what() << "\n";
    return 3;
  } catch (const vbsparse::DegenerateFit& e) {
    std::cerr << "vbsparse: numerical error: " << e.what() << "\n";
    return 3;
  } catch (const vbsparse::AllWeightsDegenerate& e) {
    std::cerr << "vbsparse: numerical error: " << e.what() << "\n";
    return 3;
  } catch (const vbsparse::SizeOverCap& e) {
    std::cerr << "vbsparse: numerical error: " << e.what() << "\n";
    return 3;
  } catch (const vbsparse::Error& e) {
    std::cerr << "vbsparse: input error: " << e.what() << "\n";
    return 2;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "vbsparse: input error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "vbsparse: input error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
