#include "complab/harness.hpp"

#include "complab/analysis.hpp"
#include "complab/excess.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>

namespace complab {

using json = nlohmann::ordered_json;
namespace fs = std::filesystem;

bool RunReport::passed() const {
  for (const CheckResult& c : checks)
    if (!c.passed) return false;
  return true;
}

std::string output_root() {
  const char* env = std::getenv("COMPOSITE_LAB_OUT");
  return env && *env ? std::string(env) : std::string("out");
}

std::string new_run_directory(const std::string& root, const std::string& scenario) {
  const std::time_t now = std::time(nullptr);
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::ostringstream stamp;
  stamp << std::put_time(&tm, "%Y%m%dT%H%M%SZ");
  fs::path dir = fs::path(root) / scenario / stamp.str();
  for (int k = 1; fs::exists(dir); ++k) dir = fs::path(root) / scenario / (stamp.str() + "-" + std::to_string(k));
  return dir.string();
}

namespace {

std::string fmt(double v) {
  std::ostringstream s;
  s << std::setprecision(6) << v;
  return s.str();
}

json point_json(const Point& p) {
  json a = json::array();
  for (Eigen::Index i = 0; i < p.size(); ++i) a.push_back(p(i));
  return a;
}

json number_json(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

json numbers_json(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number_json(x));
  return a;
}

class Run {
 public:
  Run(const Scenario& s, const RunOptions& o) : scenario(s), options(o) {
    report.scenario = s.name;
    summary["scenario"] = s.name;
    summary["seed"] = seed();
  }

  std::uint64_t seed() const { return options.seed ? *options.seed : scenario.seed; }

  void log(const std::string& line) { report.log.push_back(line); }

  void check(const std::string& name, bool passed, const std::string& detail) {
    report.checks.push_back({name, passed, detail});
    log(std::string(passed ? "PASS " : "FAIL ") + name + ": " + detail);
  }

  void geometry(int points_per_axis) {
    const CompositeCube cube = scenario.cube();
    const int n = cube.dim();
    json g;
    g["mu"] = scenario.mu;
    g["gamma"] = scenario.gamma;

    // pi_1 = -1 and T in [0, 1] on a nodal grid of the cube.
    long samples = 0, degenerate = 0;
    bool pi_ok = true;
    long total = 1;
    const int ppa = n == 2 ? 64 : 24;
    for (int a = 0; a < n; ++a) total *= ppa;
    Point x(n);
    for (long q = 0; q < total; ++q) {
      long rest = q;
      for (int a = 0; a < n; ++a) {
        x(a) = cube.center()(a) - cube.halfwidth() + 2.0 * cube.halfwidth() * (rest % ppa) / (ppa - 1);
        rest /= ppa;
      }
      try {
        const FlowDerivativeSample s = flow_derivative(cube, x);
        const double t = interpolation_parameter(cube, x);
        pi_ok = pi_ok && s.pi(0) == -1.0 && t >= 0.0 && t <= 1.0;
        ++samples;
      } catch (const DegenerateThickness&) {
        ++degenerate;
      }
    }
    check("pi_first_component", pi_ok,
          std::to_string(samples) + " samples, " + std::to_string(degenerate) + " at touching points");

    double worst = -std::numeric_limits<double>::infinity();
    const Vec ct = tangential(cube.center());
    for (int k = 0; k < cube.graph_count(); ++k)
      for (int l = k + 1; l < cube.graph_count(); ++l) {
        const NoncrossReport r = noncross_bound_check(cube.graph(k), cube.graph(l), cube.halfwidth() / 2.0,
                                                      cube.halfwidth() / 2.0, cube.gamma(), ct, points_per_axis);
        worst = std::max(worst, r.max_violation);
      }
    g["noncross_max_violation"] = worst;
    check("noncross_bound", worst <= 0.0, "max LHS - RHS " + fmt(worst));

    if (scenario.theorem_instance) {
      const bool ok = cube.satisfies_minimum_condition(scenario.R, points_per_axis);
      check("minimum_condition", ok, ok ? "inf |phi_k| < 4R for every graph" : "a graph stays at least 4R away");
    }

    const auto field = scenario.piecewise_field();
    const double kappa = kappa_constant(cube, field->A_seminorm_sup(), scenario.R);
    g["kappa"] = kappa;
    const PiHolderReport ph = pi_holder_check(cube, kappa, scenario.R, 1000, seed());
    g["pi_holder_constant"] = ph.fitted_constant;
    g["pi_holder_over_kappa"] = ph.fitted_over_kappa;
    g["pi_holder_stable"] = ph.stable;
    log("pi Holder constant " + fmt(ph.fitted_constant) + " (" + fmt(ph.fitted_over_kappa) + " kappa)");
    check("pi_holder_finite", std::isfinite(ph.fitted_constant) && ph.exponent_ok,
          "fitted constant " + fmt(ph.fitted_constant));
    summary["geometry"] = g;
  }

  void ellipticity() {
    const auto field = scenario.solver_field();
    try {
      const EllipticityReport e = ellipticity_check(*field, 2000, seed());
      summary["ellipticity"] = {{"min_rayleigh", e.min_rayleigh}, {"max_abs_entry", e.max_abs_entry}};
      check("ellipticity", true, "min Rayleigh " + fmt(e.min_rayleigh) + ", max entry " + fmt(e.max_abs_entry));
    } catch (const EllipticityViolation& ev) {
      check("ellipticity", false, ev.what());
      throw;
    }
  }

  void solve() {
    field = scenario.solver_field();
    const StructuredGrid grid = scenario.grid(options.cells);
    SolverOptions so;
    so.threads = options.threads;
    so.tol = scenario.solver_tol;
    const auto t0 = std::chrono::steady_clock::now();
    solution.emplace(assemble_and_solve(*field, grid, scenario.boundary(), so));
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    summary["grid"] = {{"dim", grid.dim()},
                       {"components", scenario.components},
                       {"cells", grid.cells()},
                       {"h", grid.spacing()},
                       {"center", point_json(grid.center())},
                       {"halfwidth", grid.halfwidth()}};
    summary["solver"] = {{"method", "BiCGSTAB, Jacobi preconditioner"},
                         {"quadrature", solution->quadrature},
                         {"boundary", solution->boundary_description},
                         {"tol", so.tol},
                         {"iterations", solution->iterations},
                         {"residual", solution->residual},
                         {"threads", options.threads},
                         {"seconds", secs}};
    log("solved " + std::to_string(grid.node_count()) + " nodes in " + fmt(secs) + " s, " +
        std::to_string(solution->iterations) + " iterations, residual " + fmt(solution->residual));
  }

  void oracle() {
    if (!scenario.has_oracle()) {
      summary["oracle"] = nullptr;
      return;
    }
    const auto exact = scenario.exact_solution();
    const auto sol = *scenario.oracle();
    json o;
    o["flux_constant"] = point_json(sol.flux_constant());
    const double nodal = nodal_max_error(*solution, exact);
    const double l2 = l2_error(*solution, exact);
    o["nodal_error"] = nodal;
    o["l2_error"] = l2;
    if (scenario.perturbation == 0.0) {
      // Exact W is the constant (-C, q).
      const auto lam = scenario.laminate_field();
      const Vec W_exact = compute_W_laminate(sol, *lam, {scenario.center})[0];
      const StructuredGrid& grid = solution->grid();
      double W_err = 0.0, U_err = 0.0;
      const CompositeCube cube = scenario.cube();
      const Vec mid = Vec::Constant(grid.dim(), 0.5);
      for (std::size_t e = 0; e < grid.element_count(); ++e) {
        const Point x = grid.element_midpoint(e);
        const Vec du = solution->gradient_in_element(e, mid);
        W_err = std::max(W_err, (compute_W_point(lam->A(x), lam->F(x), du, scenario.components) - W_exact).cwiseAbs().maxCoeff());
        U_err = std::max(U_err, (compute_U_point(lam->A(x), lam->F(x), flow_derivative(cube, x).pi, du,
                                                 scenario.components) - W_exact).cwiseAbs().maxCoeff());
      }
      o["W_exact"] = point_json(W_exact);
      o["W_error"] = W_err;
      o["U_error"] = U_err;
      if (scenario.analysis.oracle_W_tol >= 0.0)
        check("oracle_W_U", std::max(W_err, U_err) <= scenario.analysis.oracle_W_tol,
              "max |W_h - W|, |U_h - W| = " + fmt(std::max(W_err, U_err)));
    }
    if (scenario.analysis.oracle_nodal_tol >= 0.0)
      check("oracle_nodal", nodal <= scenario.analysis.oracle_nodal_tol, "max nodal error " + fmt(nodal));
    log("oracle: nodal error " + fmt(nodal) + ", L2 error " + fmt(l2));
    summary["oracle"] = o;
  }

  bool on_interface(const Point& z, double h) const {
    for (std::size_t k = 1; k + 1 < scenario.graphs.size(); ++k)
      if (std::abs(z(0) - scenario.graphs[k].value(tangential(z))) <= 2.0 * h) return true;
    return false;
  }

  void analysis() {
    const StructuredGrid& grid = solution->grid();
    const double h = grid.spacing();
    analyzed = true;
    const CompositeCube cube = scenario.cube();
    const AnalysisSpec& a = scenario.analysis;
    const std::vector<double> radii = a.radii.empty() ? dyadic_radii(grid) : a.radii;

    const MidpointField U = sample_U(*solution, *field, cube);
    const MidpointField Du = sample_gradient(*solution);
    std::optional<MidpointField> W;
    if (scenario.laminate_field()) {
      const Vec mid = Vec::Constant(grid.dim(), 0.5);
      W.emplace(MidpointField::sample(grid, [&](std::size_t e) {
        const Point x = grid.element_midpoint(e);
        return compute_W_point(field->A(x), field->F(x), solution->gradient_in_element(e, mid), scenario.components);
      }));
    }

    json rows = json::array();
    double u_min = std::numeric_limits<double>::infinity();
    double du_on_max = -std::numeric_limits<double>::infinity();
    double w_min = std::numeric_limits<double>::infinity();
    json intercepts = json::array();
    std::vector<Point> full_centers;
    auto slope_value = [](const ExcessReport& r) {
      return r.fit.status == "exact" ? std::numeric_limits<double>::infinity() : r.fit.slope;
    };
    for (const Point& z : a.centers) {
      const bool on = on_interface(z, h);
      std::vector<double> fit_radii;
      for (double rho : radii) {
        try {
          snap_cube(grid, z, rho);
          fit_radii.push_back(rho);
        } catch (const DomainError&) {
        }
      }
      if (fit_radii.size() < 3) {
        log("center " + format_point(z) + ": fewer than 3 radii in [8h, r/2] fit in the grid, excess scan skipped");
        continue;
      }
      if (fit_radii.size() == radii.size()) full_centers.push_back(z);
      std::vector<ExcessReport> reps = {excess_scan(U, z, fit_radii, "U"), excess_scan(Du, z, fit_radii, "Du")};
      if (W) reps.push_back(excess_scan(*W, z, fit_radii, "W"));
      for (const ExcessReport& r : reps) {
        excess_rows.push_back(r);
        rows.push_back({{"center", point_json(z)},
                        {"field", r.tag},
                        {"on_interface", on},
                        {"slope", number_json(r.fit.slope)},
                        {"intercept", number_json(r.fit.intercept)},
                        {"fit_residual", r.fit.residual},
                        {"status", r.fit.status}});
      }
      u_min = std::min(u_min, slope_value(reps[0]));
      if (on) du_on_max = std::max(du_on_max, slope_value(reps[1]));
      if (W) w_min = std::min(w_min, slope_value(reps[2]));
      if (reps[0].fit.status == "fit") intercepts.push_back(std::exp(reps[0].fit.intercept));
      log("center " + format_point(z) + (on ? " (interface)" : "") + ": slope U " + fmt(reps[0].fit.slope) +
          ", slope Du " + fmt(reps[1].fit.slope) + (W ? ", slope W " + fmt(reps[2].fit.slope) : ""));
    }
    summary["excess"] = rows;
    summary["slope"] = {{"U_min", number_json(u_min)},
                        {"Du_on_interface_max", number_json(du_on_max)},
                        {"W_min", number_json(w_min)},
                        {"radii", numbers_json(radii)},
                        {"exponent_target", 2.0 * scenario.mu}};
    if (a.check_decay && std::isfinite(u_min)) {
      check("U_excess_decay", u_min >= a.u_slope_min, "min slope " + fmt(u_min) + " >= " + fmt(a.u_slope_min));
      if (std::isfinite(du_on_max))
        check("Du_excess_no_decay", du_on_max < a.du_slope_max,
              "max on-interface slope " + fmt(du_on_max) + " < " + fmt(a.du_slope_max));
    }
    if (a.check_w_decay && W && std::isfinite(w_min))
      check("W_excess_decay", w_min >= a.w_slope_min, "min slope " + fmt(w_min) + " >= " + fmt(a.w_slope_min));

    json fitted;
    fitted["excess_U_constants"] = intercepts;
    if (!full_centers.empty()) {
      const HolderEstimate he = campanato_holder(U, full_centers, radii, scenario.mu);
      summary["M"] = he.M;
      summary["M_levels"] = numbers_json(he.level_M);
      fitted["campanato_M"] = he.M;
    } else {
      summary["M"] = nullptr;
    }

    if (a.interface_graph >= 0) jumps(cube, h);

    if (scenario.homogeneous()) {
      double worst = 0.0;
      for (const Point& z : a.centers) {
        const double room = grid.halfwidth() - (z - grid.center()).cwiseAbs().maxCoeff();
        const double rho = std::min(grid.halfwidth() / 4.0, std::floor(room / 2.0 / h) * h);
        if (rho < 2.0 * h) continue;
        worst = std::max(worst, caccioppoli_check(*solution, z, rho));
      }
      fitted["caccioppoli_max"] = worst;
      check("caccioppoli", worst <= a.caccioppoli_max, "max ratio " + fmt(worst) + " <= " + fmt(a.caccioppoli_max));
    }

    fitted["gradient_difference"] = gradient_difference_constant(cube);
    summary["fitted_constants"] = fitted;
  }

  void jumps(const CompositeCube& cube, double h) {
    const AnalysisSpec& a = scenario.analysis;
    const int tdim = scenario.dim - 1;
    TangentialBox box{tangential(scenario.center), a.jump_halfwidth};
    const std::vector<Vec> xt = tangential_grid(box, a.jump_samples);
    std::vector<double> offsets;
    for (double c : a.jump_offsets) offsets.push_back(c * h);
    (void)tdim;
    const JumpProfile jp = interface_jump(*solution, *field, cube, a.interface_graph, offsets, xt);
    summary["jumps"] = {{"graph", a.interface_graph},
                        {"offsets", numbers_json(jp.offsets)},
                        {"offsets_in_cells", numbers_json(a.jump_offsets)},
                        {"Du", numbers_json(jp.du_jump)},
                        {"D1u", numbers_json(jp.d1u_jump)},
                        {"U", numbers_json(jp.u_jump)},
                        {"du_jump_floor", a.du_jump_floor}};
    for (std::size_t i = 0; i < offsets.size(); ++i)
      log("jump at offset " + fmt(offsets[i]) + ": |dDu| " + fmt(jp.du_jump[i]) + ", |dD1u| " + fmt(jp.d1u_jump[i]) +
          ", |dU| " + fmt(jp.u_jump[i]));
    if (a.du_jump_floor > 0.0) {
      const double low = *std::min_element(jp.d1u_jump.begin(), jp.d1u_jump.end());
      check("D1u_jump_floor", low >= a.du_jump_floor, "min over offsets " + fmt(low) + " >= " + fmt(a.du_jump_floor));
      for (std::size_t i = 0; i < offsets.size(); ++i)
        if (a.u_jump_ratio_max > 0.0 && std::abs(a.jump_offsets[i] - a.u_jump_offset) < 1e-12)
          check("U_jump_small", jp.u_jump[i] < a.u_jump_ratio_max * jp.du_jump[i],
                "|dU| " + fmt(jp.u_jump[i]) + " < " + fmt(a.u_jump_ratio_max) + " |dDu| " + fmt(jp.du_jump[i]));
    }
  }

  double gradient_difference_constant(const CompositeCube& cube) {
    const StructuredGrid& grid = solution->grid();
    std::mt19937_64 rng(seed());
    std::uniform_int_distribution<std::size_t> pick(0, grid.element_count() - 1);
    const Vec mid = Vec::Constant(grid.dim(), 0.5);
    auto data = [&](std::size_t e) {
      const Point x = grid.element_midpoint(e);
      PointData d{field->A(x), field->F(x), flow_derivative(cube, x).pi, cell_U(*solution, *field, cube, e),
                  solution->gradient_in_element(e, mid)};
      return d;
    };
    double c = 0.0;
    for (int k = 0; k < 400; ++k) {
      const GradientDifferenceTerms t = gradient_difference_bound(data(pick(rng)), data(pick(rng)));
      if (std::isfinite(t.ratio)) c = std::max(c, t.ratio);
    }
    return c;
  }

  void write_bundle() {
    if (!options.write_outputs) return;
    report.output_dir = options.out_dir.empty() ? new_run_directory(output_root(), scenario.name) : options.out_dir;
    fs::create_directories(report.output_dir);
    if (solution) write_solution_csv((fs::path(report.output_dir) / "solution.csv").string(), *solution);
    if (analyzed) {
      std::ofstream out(fs::path(report.output_dir) / "excess.csv");
      out << std::setprecision(17);
      out << "center";
      out << ",field,radius,excess\n";
      for (const ExcessReport& r : excess_rows)
        for (std::size_t i = 0; i < r.radii.size(); ++i) {
          out << '"';
          for (Eigen::Index a = 0; a < r.center.size(); ++a) out << (a ? ":" : "") << r.center(a);
          out << '"' << "," << r.tag << "," << r.radii[i] << "," << r.values[i] << "\n";
        }
    }
    std::ofstream log_out(fs::path(report.output_dir) / "log.txt");
    for (const std::string& line : report.log) log_out << line << "\n";
    std::ofstream js(fs::path(report.output_dir) / "summary.json");
    js << report.summary_json << "\n";
  }

  void finish() {
    json checks = json::array();
    for (const CheckResult& c : report.checks) checks.push_back({{"name", c.name}, {"passed", c.passed}, {"detail", c.detail}});
    summary["checks"] = checks;
    summary["passed"] = report.passed();
    json cfg;
    for (const auto& [k, v] : scenario.config.entries()) cfg[k] = v;
    summary["config"] = cfg;
    report.summary_json = summary.dump(2);
    write_bundle();
  }

  const Scenario& scenario;
  RunOptions options;
  RunReport report;
  json summary;
  std::shared_ptr<const CoefficientField> field;
  std::optional<DiscreteSolution> solution;
  std::vector<ExcessReport> excess_rows;
  bool analyzed = false;
};

}  // namespace

void write_solution_csv(const std::string& path, const DiscreteSolution& solution) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write " + path);
  out << std::setprecision(17);
  for (int a = 0; a < solution.dim(); ++a) out << (a ? "," : "") << "x" << a + 1;
  for (int i = 0; i < solution.components(); ++i) out << ",u" << i + 1;
  out << "\n";
  for (std::size_t node = 0; node < solution.grid().node_count(); ++node) {
    const Point x = solution.grid().node_point(node);
    for (int a = 0; a < solution.dim(); ++a) out << (a ? "," : "") << x(a);
    const Vec u = solution.node_value(node);
    for (int i = 0; i < solution.components(); ++i) out << "," << u(i);
    out << "\n";
  }
}

RunReport verify_geometry(const Scenario& scenario, const RunOptions& options) {
  Run run(scenario, options);
  run.geometry(scenario.dim == 2 ? 256 : 64);
  run.options.write_outputs = false;
  run.finish();
  return run.report;
}

RunReport solve_scenario(const Scenario& scenario, const RunOptions& options) {
  Run run(scenario, options);
  run.ellipticity();
  run.solve();
  run.check("solver_residual", run.solution->residual <= scenario.solver_tol, "relative residual " + fmt(run.solution->residual));
  run.finish();
  return run.report;
}

RunReport run_scenario(const Scenario& scenario, const RunOptions& options) {
  Run run(scenario, options);
  run.geometry(scenario.dim == 2 ? 128 : 48);
  run.ellipticity();
  run.solve();
  run.check("solver_residual", run.solution->residual <= scenario.solver_tol, "relative residual " + fmt(run.solution->residual));
  run.oracle();
  run.analysis();
  run.finish();
  return run.report;
}

std::vector<ConvergenceRow> convergence_study(const Scenario& scenario, int levels, const RunOptions& options) {
  if (!scenario.has_oracle()) throw ConfigError("scenario " + scenario.name + " has no oracle for a convergence study");
  if (levels < 1) throw ConfigError("levels must be at least 1");
  const auto field = scenario.solver_field();
  const auto exact = scenario.exact_solution();
  const BoundaryData boundary = scenario.boundary();
  SolverOptions so;
  so.threads = options.threads;
  so.tol = scenario.solver_tol;
  std::vector<ConvergenceRow> rows;
  int m = options.cells > 0 ? options.cells : scenario.cells;
  for (int l = 0; l < levels; ++l, m *= 2) {
    const DiscreteSolution sol = assemble_and_solve(*field, scenario.grid(m), boundary, so);
    ConvergenceRow r;
    r.cells = m;
    r.h = sol.grid().spacing();
    r.l2_error = l2_error(sol, exact);
    r.nodal_error = nodal_max_error(sol, exact);
    r.order = rows.empty() ? std::numeric_limits<double>::quiet_NaN()
                           : std::log(rows.back().l2_error / r.l2_error) / std::log(rows.back().h / r.h);
    rows.push_back(r);
  }
  return rows;
}

namespace {

void print_report(const RunReport& r, std::ostream& out) {
  for (const std::string& line : r.log) out << line << "\n";
  if (!r.output_dir.empty()) out << "output: " << r.output_dir << "\n";
  out << r.scenario << ": " << (r.passed() ? "PASS" : "FAIL") << "\n";
}

}  // namespace

int cli_main(int argc, char** argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Composite-material regularity laboratory"};
  app.require_subcommand(1);
  RunOptions opts;
  std::uint64_t seed = 0;
  app.add_option("--threads", opts.threads, "assembly threads")->check(CLI::PositiveNumber);
  auto* seed_opt = app.add_option("--seed", seed, "random seed override");
  app.add_option("--grid", opts.cells, "cells per axis override")->check(CLI::PositiveNumber);

  std::string config;
  std::string out_dir;
  int levels = 4;
  auto* geo = app.add_subcommand("geometry-verify", "check the geometry of a scenario");
  geo->add_option("--config", config, "config file or builtin scenario name")->required();
  auto* solve = app.add_subcommand("solve", "solve a scenario and write solution.csv");
  solve->add_option("--config", config, "config file or builtin scenario name")->required();
  solve->add_option("--out", out_dir, "output directory");
  auto* analyze = app.add_subcommand("analyze", "solve and run the full analysis");
  analyze->add_option("--config", config, "config file or builtin scenario name")->required();
  analyze->add_option("--out", out_dir, "output directory");
  auto* conv = app.add_subcommand("convergence", "refinement study against the oracle");
  conv->add_option("--config", config, "config file or builtin scenario name")->required();
  conv->add_option("--levels", levels, "number of refinement levels")->check(CLI::PositiveNumber);
  conv->add_option("--out", out_dir, "output directory");
  auto* suite = app.add_subcommand("suite", "run every builtin scenario");
  for (auto* sub : {geo, solve, analyze, conv, suite}) sub->fallthrough();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? 0 : 2;
  }
  if (*seed_opt) opts.seed = seed;
  opts.out_dir = out_dir;

  try {
    if (*suite) {
      bool all = true;
      const std::string root = output_root();
      for (const std::string& name : builtin_scenario_names()) {
        RunOptions o = opts;
        o.out_dir = new_run_directory(root, name);
        const RunReport r = run_scenario(scenario_from_config(builtin_scenario_config(name)), o);
        out << name << ": " << (r.passed() ? "PASS" : "FAIL") << " (" << r.output_dir << ")\n";
        for (const CheckResult& c : r.checks)
          if (!c.passed) out << "  FAIL " << c.name << ": " << c.detail << "\n";
        all = all && r.passed();
      }
      return all ? 0 : 1;
    }
    const Scenario scenario = scenario_from_config(resolve_scenario_config(config));
    if (*geo) {
      const RunReport r = verify_geometry(scenario, opts);
      print_report(r, out);
      return r.passed() ? 0 : 1;
    }
    if (*solve || *analyze) {
      const RunReport r = *solve ? solve_scenario(scenario, opts) : run_scenario(scenario, opts);
      print_report(r, out);
      return r.passed() ? 0 : 1;
    }
    const auto rows = convergence_study(scenario, levels, opts);
    const std::string dir = out_dir.empty() ? new_run_directory(output_root(), scenario.name) : out_dir;
    fs::create_directories(dir);
    std::ofstream csv(fs::path(dir) / "convergence.csv");
    csv << std::setprecision(17) << "cells,h,l2_error,nodal_error,order\n";
    out << "cells        h     l2_error  nodal_error  order\n";
    for (const ConvergenceRow& r : rows) {
      csv << r.cells << "," << r.h << "," << r.l2_error << "," << r.nodal_error << ",";
      if (std::isfinite(r.order)) csv << r.order;
      csv << "\n";
      out << std::setw(5) << r.cells << std::setw(9) << fmt(r.h) << std::setw(13) << fmt(r.l2_error) << std::setw(13)
          << fmt(r.nodal_error) << std::setw(7) << (std::isfinite(r.order) ? fmt(r.order) : "-") << "\n";
    }
    out << "output: " << dir << "\n";
    return 0;
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 3;
  }
}

}  // namespace complab
