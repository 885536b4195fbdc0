#pragma once

#include "complab/config.hpp"
#include "complab/fields.hpp"
#include "complab/oracle.hpp"
#include "complab/solver.hpp"

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace complab {

struct AnalysisSpec {
  std::vector<Point> centers;
  std::vector<double> radii;        // empty selects dyadic radii in [8h, r/2]
  int interface_graph = -1;         // graph index for jump profiles, -1 for none
  std::vector<double> jump_offsets; // in cells
  int jump_samples = 17;
  double jump_halfwidth = 0.5;
  double du_jump_floor = 0.0;
  double u_jump_offset = 4.0;       // in cells
  double u_jump_ratio_max = 0.0;   // zero disables the U jump assertion
  bool check_decay = false;
  double u_slope_min = 0.0;         // defaults to 2 mu - 0.1
  double du_slope_max = 0.1;
  bool check_w_decay = false;
  double w_slope_min = 0.85;
  double oracle_nodal_tol = -1.0;   // negative disables the assertion
  double oracle_W_tol = -1.0;
  double caccioppoli_max = 10.0;
};

struct Scenario {
  std::string name;
  std::uint64_t seed = 1;
  Config config;

  int dim = 2;
  int components = 1;
  Point center;
  double halfwidth = 1.0;
  double R = 1.0;
  double gamma = 1.0;
  double mu = 0.25;
  bool theorem_instance = false;
  std::vector<GraphFunction> graphs;

  std::vector<RegionCoefficients> regions;
  double lambda = 1.0;
  double Lambda = 1.0;
  double perturbation = 0.0;  // eps of the manufactured tangential perturbation

  int cells = 64;
  double solver_tol = 1e-12;

  std::string boundary_kind = "affine";
  Vec boundary_offset;
  Eigen::MatrixXd boundary_slope;
  Eigen::MatrixXd oracle_q;
  Vec oracle_w_lower, oracle_w_upper;

  AnalysisSpec analysis;

  CompositeCube cube() const;
  std::shared_ptr<PiecewiseField> piecewise_field() const;
  /// Laminate view when every graph is constant and every region is constant.
  std::shared_ptr<LaminateField> laminate_field() const;
  /// The field handed to the solver (perturbed laminate when perturbation != 0).
  std::shared_ptr<const CoefficientField> solver_field() const;
  bool has_oracle() const { return boundary_kind == "laminate_oracle"; }
  std::optional<LaminateSolution> oracle() const;
  /// Exact solution when an oracle exists (including the manufactured perturbation).
  std::function<Vec(const Point&)> exact_solution() const;
  BoundaryData boundary() const;
  StructuredGrid grid(int cells_override = 0) const;
  bool homogeneous() const;  // F vanishes identically
};

/// Validates and builds a scenario. Missing keys raise ConfigError("<key> required").
Scenario scenario_from_config(const Config& config);

std::vector<std::string> builtin_scenario_names();
Config builtin_scenario_config(const std::string& name);
/// A config file path, or the name of a builtin scenario.
Config resolve_scenario_config(const std::string& path_or_name);

}  // namespace complab
