#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "report.hpp"
#include "scenario.hpp"

namespace steinbound::cli {

struct RunOptions {
  OracleMode oracle = OracleMode::Auto;
  /// auto mode enumerates only up to this many joint states.
  double auto_state_limit = 1e6;
};

/// Bounds for one scenario plus, when enabled and feasible, the oracle's verdicts.
Report run_scenario(const ScenarioConfig& cfg, const RunOptions& opts);

/// Exact law, fit and distance only.
Report oracle_scenario(const ScenarioConfig& cfg);

/// Runs scenarios concurrently and collects reports in input order.
Document run_scenarios(const std::string& command, const std::vector<ScenarioConfig>& cfgs, const RunOptions& opts,
                       bool oracle_only);

struct TableRow {
  std::size_t n = 0;
  double cdo = 0.0;
  double cdo_gamma = 0.0;
  double poisson = 0.0;
};

/// Published values for n = 10, 20, 30, 40, 50.
const std::vector<TableRow>& published_table();
std::vector<TableRow> computed_table();
Document table_command();

Document harness_command(GeneratorConfig::Kind kind, std::uint64_t seed, std::size_t count);

Document runs_demo(double p, const std::vector<std::size_t>& ns, const RunOptions& opts);
Document cdo_demo(const std::vector<double>& probs, const std::vector<double>& attachments, const RunOptions& opts,
                  double eps);
Document cpoisson_demo(const std::vector<double>& lambdas, const RunOptions& opts, double eps);

}  // namespace steinbound::cli
