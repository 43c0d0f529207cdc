#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "vbsparse/data.hpp"
#include "vbsparse/metrics.hpp"
#include "vbsparse/seqmodel.hpp"
#include "vbsparse/vb.hpp"

namespace vbsparse {

struct SimulateOptions {
  std::optional<int> reps;            // overrides spec.replications
  std::optional<std::uint64_t> seed;  // overrides spec.seed
  int threads = 1;
  PriorConfig prior;
  double zeta = 0.025;  // credible tail for means-model coverage output
};

struct SimulateOutput {
  std::vector<MetricsReport> rows;
  std::optional<CoverageReport> coverage;  // orthogonal_means scenarios only
};

/// Runs the replication loop for one scenario. Replications are distributed
/// over a worker pool, each seeded by (seed, replication_index) and gathered
/// by index, so the output is identical for any thread count. Regression
/// scenarios produce vb_empirical and lasso rows; orthogonal_means scenarios
/// produce a vb_empirical row plus the coverage report.
SimulateOutput run_simulation(const std::string& scenario_name, const ScenarioSpec& spec,
                              const SimulateOptions& opts);

/// --threads value, falling back to VBSPARSE_THREADS, then to 1.
int resolve_threads(std::optional<int> flag_value);

}  // namespace vbsparse
