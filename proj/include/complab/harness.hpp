#pragma once

#include "complab/scenario.hpp"

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace complab {

struct RunOptions {
  int threads = 1;
  std::optional<std::uint64_t> seed;
  int cells = 0;            // overrides grid.cells when positive
  std::string out_dir;      // exact bundle directory; empty selects <root>/<scenario>/<timestamp>
  bool write_outputs = true;
};

struct CheckResult {
  std::string name;
  bool passed = false;
  std::string detail;
};

struct RunReport {
  std::string scenario;
  std::string output_dir;
  std::vector<CheckResult> checks;
  std::string summary_json;
  std::vector<std::string> log;

  bool passed() const;
};

/// Output root: $COMPOSITE_LAB_OUT when set, otherwise "out".
std::string output_root();
/// <root>/<scenario>/<timestamp>, made unique with a numeric suffix.
std::string new_run_directory(const std::string& root, const std::string& scenario);

RunReport verify_geometry(const Scenario& scenario, const RunOptions& options);
/// Solve only: writes solution.csv, summary.json and log.txt.
RunReport solve_scenario(const Scenario& scenario, const RunOptions& options);
/// Geometry checks, ellipticity, solve, analysis; writes the full bundle.
RunReport run_scenario(const Scenario& scenario, const RunOptions& options);

struct ConvergenceRow {
  int cells = 0;
  double h = 0.0;
  double l2_error = 0.0;
  double nodal_error = 0.0;
  double order = 0.0;  // NaN on the first level
};

/// Refines m, 2m, 4m, ... against the scenario oracle. Throws ConfigError without an oracle.
std::vector<ConvergenceRow> convergence_study(const Scenario& scenario, int levels, const RunOptions& options);

void write_solution_csv(const std::string& path, const DiscreteSolution& solution);

/// Entry point of the complab command line tool. Exit codes: 0 all checks
/// pass, 1 a check failed, 2 configuration or usage error, 3 runtime failure.
int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace complab
