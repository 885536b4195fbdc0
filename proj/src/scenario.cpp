#include "complab/scenario.hpp"

#include <cmath>
#include <filesystem>
#include <map>

namespace complab {

namespace {

const std::map<std::string, std::string>& catalog() {
  static const std::map<std::string, std::string> entries = {
      {"two_layer_1d", R"(scenario.name = two_layer_1d
scenario.seed = 1
geometry.dim = 2
geometry.center = 0, 0
geometry.halfwidth = 1
geometry.R = 1
geometry.gamma = 1
geometry.graph_count = 3
geometry.graph.0.kind = constant
geometry.graph.0.value = -2
geometry.graph.1.kind = constant
geometry.graph.1.value = 0
geometry.graph.2.kind = constant
geometry.graph.2.value = 2
field.components = 1
field.lambda = 1
field.Lambda = 2
field.region.0.a = 1
field.region.1.a = 2
grid.cells = 64
boundary.kind = laminate_oracle
boundary.q = 0
boundary.w_lower = 0
boundary.w_upper = 1
analysis.centers = -0.25:0, 0:0, 0.25:0, 0:0.25
analysis.interface_graph = 1
analysis.jump_offsets = 2, 4, 8
analysis.du_jump_floor = 0.3
analysis.u_jump_ratio_max = 0.1
analysis.oracle_nodal_tol = 1e-9
analysis.oracle_W_tol = 1e-8
)"},
      {"two_layer_1d_unaligned", R"(scenario.name = two_layer_1d_unaligned
scenario.seed = 1
geometry.dim = 2
geometry.center = 0, 0
geometry.halfwidth = 1
geometry.R = 1
geometry.gamma = 1
geometry.graph_count = 3
geometry.graph.0.kind = constant
geometry.graph.0.value = -2
geometry.graph.1.kind = constant
geometry.graph.1.value = 0.1
geometry.graph.2.kind = constant
geometry.graph.2.value = 2
field.components = 1
field.lambda = 1
field.Lambda = 2
field.region.0.a = 1
field.region.1.a = 2
grid.cells = 32
boundary.kind = laminate_oracle
boundary.q = 0
boundary.w_lower = 0
boundary.w_upper = 1
analysis.centers = 0:0, 0.1:0
)"},
      {"identity_affine", R"(scenario.name = identity_affine
scenario.seed = 1
geometry.dim = 2
geometry.center = 0, 0
geometry.halfwidth = 1
geometry.R = 1
geometry.gamma = 1
geometry.graph_count = 2
geometry.graph.0.kind = constant
geometry.graph.0.value = -2
geometry.graph.1.kind = constant
geometry.graph.1.value = 2
field.components = 1
field.lambda = 1
field.Lambda = 1
field.region.0.a = 1
grid.cells = 16
boundary.kind = laminate_oracle
boundary.q = 0.5
boundary.w_lower = -1
boundary.w_upper = 1
analysis.centers = 0:0
analysis.oracle_nodal_tol = 1e-10
analysis.oracle_W_tol = 1e-9
)"},
      {"parabola_contrast10", R"(scenario.name = parabola_contrast10
scenario.seed = 7
geometry.dim = 2
geometry.center = 0, 0
geometry.halfwidth = 1
geometry.R = 1
geometry.gamma = 1
geometry.theorem_instance = true
geometry.graph_count = 3
geometry.graph.0.kind = constant
geometry.graph.0.value = -2
geometry.graph.1.kind = parabola
geometry.graph.1.value = 0
geometry.graph.1.amplitude = 1
geometry.graph.2.kind = constant
geometry.graph.2.value = 2
field.components = 1
field.lambda = 1
field.Lambda = 10
field.region.0.a = 1
field.region.1.a = 10
grid.cells = 256
boundary.kind = affine
boundary.offset = 0
boundary.slope = 1, 0
analysis.centers = 0.0625:-0.25, 0:0, 0.0625:0.25, -0.1875:-0.25, -0.25:0, -0.1875:0.25, 0.3125:-0.25, 0.25:0, 0.3125:0.25
analysis.interface_graph = 1
analysis.jump_offsets = 2, 4, 8
analysis.du_jump_floor = 1.5
analysis.u_jump_ratio_max = 0.1
analysis.check_decay = true
)"},
      {"laminate_perturbed", R"(scenario.name = laminate_perturbed
scenario.seed = 3
geometry.dim = 2
geometry.center = 0, 0
geometry.halfwidth = 1
geometry.R = 1
geometry.gamma = 1
geometry.graph_count = 3
geometry.graph.0.kind = constant
geometry.graph.0.value = -2
geometry.graph.1.kind = constant
geometry.graph.1.value = 0
geometry.graph.2.kind = constant
geometry.graph.2.value = 2
field.components = 1
field.lambda = 1
field.Lambda = 2
field.region.0.a = 1
field.region.1.a = 2
field.perturbation = 0.5
grid.cells = 128
boundary.kind = laminate_oracle
boundary.q = 0
boundary.w_lower = 0
boundary.w_upper = 1
analysis.centers = 0:0, 0.25:0, -0.25:0.25
analysis.check_w_decay = true
)"},
      {"flat_layers_system", R"(scenario.name = flat_layers_system
scenario.seed = 5
geometry.dim = 2
geometry.center = 0, 0
geometry.halfwidth = 1
geometry.R = 1
geometry.gamma = 1
geometry.graph_count = 4
geometry.graph.0.kind = constant
geometry.graph.0.value = -2
geometry.graph.1.kind = constant
geometry.graph.1.value = -0.25
geometry.graph.2.kind = constant
geometry.graph.2.value = 0.5
geometry.graph.3.kind = constant
geometry.graph.3.value = 2
field.components = 2
field.lambda = 0.5
field.Lambda = 4
field.region.0.A = 2, 0, 0.5, 0,  0, 1, 0, 0.5,  0.5, 0, 1, 0,  0, 0.5, 0, 1
field.region.0.F = 0.5, 0, 0, 0
field.region.1.a = 3
field.region.1.F = 0, 0, -0.5, 0
field.region.2.A = 1, 0.25, 0, 0,  0.25, 1, 0, 0,  0, 0, 4, 0,  0, 0, 0, 2
grid.cells = 64
boundary.kind = laminate_oracle
boundary.q = 0.5, -0.25
boundary.w_lower = 0, 1
boundary.w_upper = 1, 0
analysis.centers = 0:0, -0.25:0, 0.5:0.25
analysis.interface_graph = 1
analysis.jump_offsets = 4, 8
)"},
      {"affine_interface", R"(scenario.name = affine_interface
scenario.seed = 11
geometry.dim = 2
geometry.center = 0, 0
geometry.halfwidth = 1
geometry.R = 1
geometry.gamma = 1
geometry.theorem_instance = true
geometry.graph_count = 3
geometry.graph.0.kind = constant
geometry.graph.0.value = -2
geometry.graph.1.kind = affine
geometry.graph.1.value = 0.1
geometry.graph.1.slope = 0.3
geometry.graph.2.kind = constant
geometry.graph.2.value = 2
field.components = 1
field.lambda = 1
field.Lambda = 4
field.region.0.a = 1
field.region.1.a = 4
grid.cells = 128
boundary.kind = affine
boundary.offset = 0
boundary.slope = 1, 0.5
analysis.centers = 0.1:0, -0.2:0, 0.4:0, 0.175:0.25
analysis.interface_graph = 1
analysis.jump_offsets = 2, 4, 8
analysis.du_jump_floor = 0.5
analysis.check_decay = true
)"},
      {"sinusoid_layers", R"(scenario.name = sinusoid_layers
scenario.seed = 13
geometry.dim = 2
geometry.center = 0, 0
geometry.halfwidth = 1
geometry.R = 1
geometry.gamma = 1
geometry.theorem_instance = true
geometry.graph_count = 4
geometry.graph.0.kind = constant
geometry.graph.0.value = -2
geometry.graph.1.kind = sinusoid
geometry.graph.1.value = -0.4
geometry.graph.1.amplitude = 0.1
geometry.graph.1.frequency = 3
geometry.graph.2.kind = sinusoid
geometry.graph.2.value = 0.4
geometry.graph.2.amplitude = 0.1
geometry.graph.2.frequency = 3
geometry.graph.2.shift = 0.5
geometry.graph.3.kind = constant
geometry.graph.3.value = 2
field.components = 1
field.lambda = 1
field.Lambda = 5
field.region.0.a = 1
field.region.1.a = 5
field.region.2.a = 2
grid.cells = 128
boundary.kind = affine
boundary.offset = 0
boundary.slope = 1, 0
analysis.centers = 0:0, -0.3:0, 0.5:0.25, -0.5:-0.25
analysis.interface_graph = 1
analysis.jump_offsets = 2, 4, 8
analysis.du_jump_floor = 0.5
analysis.check_decay = true
)"},
      {"touching_parabola", R"(scenario.name = touching_parabola
scenario.seed = 17
geometry.dim = 2
geometry.center = 0, 0
geometry.halfwidth = 1
geometry.R = 1
geometry.gamma = 1
geometry.theorem_instance = true
geometry.graph_count = 4
geometry.graph.0.kind = constant
geometry.graph.0.value = -2
geometry.graph.1.kind = constant
geometry.graph.1.value = -0.2
geometry.graph.2.kind = parabola
geometry.graph.2.value = -0.2
geometry.graph.2.amplitude = 1
geometry.graph.3.kind = constant
geometry.graph.3.value = 2
field.components = 1
field.lambda = 1
field.Lambda = 3
field.region.0.a = 1
field.region.1.a = 3
field.region.2.a = 1
grid.cells = 128
boundary.kind = affine
boundary.offset = 0
boundary.slope = 1, 0
analysis.centers = 0:0.5, 0.2:0, -0.5:0
)"},
      {"parabola3d", R"(scenario.name = parabola3d
scenario.seed = 19
geometry.dim = 3
geometry.center = 0, 0, 0
geometry.halfwidth = 1
geometry.R = 1
geometry.gamma = 1
geometry.theorem_instance = true
geometry.graph_count = 3
geometry.graph.0.kind = constant
geometry.graph.0.value = -2
geometry.graph.1.kind = parabola
geometry.graph.1.value = 0
geometry.graph.1.amplitude = 0.5
geometry.graph.2.kind = constant
geometry.graph.2.value = 2
field.components = 1
field.lambda = 1
field.Lambda = 5
field.region.0.a = 1
field.region.1.a = 5
grid.cells = 32
boundary.kind = affine
boundary.offset = 0
boundary.slope = 1, 0, 0
analysis.centers = 0:0:0, 0.5:0:0
)"},
      {"holder_field", R"(scenario.name = holder_field
scenario.seed = 23
geometry.dim = 2
geometry.center = 0, 0
geometry.halfwidth = 1
geometry.R = 1
geometry.gamma = 0.5
geometry.theorem_instance = true
geometry.graph_count = 3
geometry.graph.0.kind = constant
geometry.graph.0.value = -2
geometry.graph.1.kind = affine
geometry.graph.1.value = 0
geometry.graph.1.slope = 0.2
geometry.graph.2.kind = constant
geometry.graph.2.value = 2
field.components = 1
field.lambda = 1
field.Lambda = 6
field.region.0.a = 1
field.region.0.A_profile = holder_bump
field.region.0.A_profile.c = 1
field.region.0.A_profile.b = 0.5
field.region.0.A_profile.origin = -0.5, 0
field.region.0.A_profile.exponent = 0.1666666666666667
field.region.1.a = 4
field.region.1.A_profile = affine
field.region.1.A_profile.c = 1
field.region.1.A_profile.gradient = 0.1, 0.1
field.region.1.A_profile.origin = 0, 0
field.region.1.F = 1, 0
field.region.1.F_profile = affine
field.region.1.F_profile.c = 0.5
field.region.1.F_profile.gradient = 0, 0.5
field.region.1.F_profile.origin = 0, 0
grid.cells = 128
boundary.kind = affine
boundary.offset = 0
boundary.slope = 1, 0
analysis.centers = 0:0, 0.1:0.5, -0.4:-0.25
)"},
  };
  return entries;
}

std::string key(const std::string& prefix, int k, const std::string& suffix) {
  return prefix + "." + std::to_string(k) + "." + suffix;
}

ScalarProfile read_profile(const Config& c, const std::string& base, int dim) {
  const std::string kind = c.text(base, "constant");
  if (kind == "constant") return ScalarProfile::constant(c.number(base + ".c", 1.0));
  auto vec = [&](const std::string& k) {
    const auto v = c.numbers(k);
    if (static_cast<int>(v.size()) != dim) throw ConfigError(k + " must have " + std::to_string(dim) + " entries");
    return Vec(Eigen::Map<const Vec>(v.data(), dim));
  };
  if (kind == "affine") return ScalarProfile::affine(c.number(base + ".c"), vec(base + ".gradient"), vec(base + ".origin"));
  if (kind == "holder_bump")
    return ScalarProfile::holder_bump(c.number(base + ".c"), c.number(base + ".b"), vec(base + ".origin"),
                                      c.number(base + ".exponent"));
  throw ConfigError(base + " has unknown profile kind '" + kind + "'");
}

Vec fixed_vector(const Config& c, const std::string& k, int size) {
  const auto v = c.numbers(k);
  if (static_cast<int>(v.size()) != size)
    throw ConfigError(k + " must have " + std::to_string(size) + " entries");
  return Eigen::Map<const Vec>(v.data(), size);
}

Eigen::MatrixXd fixed_matrix(const Config& c, const std::string& k, int rows, int cols) {
  const Vec v = fixed_vector(c, k, rows * cols);
  Eigen::MatrixXd M(rows, cols);
  for (int i = 0; i < rows; ++i)
    for (int j = 0; j < cols; ++j) M(i, j) = v(i * cols + j);
  return M;
}

}  // namespace

std::vector<std::string> builtin_scenario_names() {
  std::vector<std::string> names;
  for (const auto& [name, text] : catalog()) names.push_back(name);
  return names;
}

Config builtin_scenario_config(const std::string& name) {
  const auto it = catalog().find(name);
  if (it == catalog().end()) throw ConfigError("unknown builtin scenario '" + name + "'");
  return Config::parse(it->second, "builtin:" + name);
}

Config resolve_scenario_config(const std::string& path_or_name) {
  if (std::filesystem::exists(path_or_name)) return Config::load(path_or_name);
  std::string name = path_or_name;
  if (name.rfind("builtin:", 0) == 0) name = name.substr(8);
  if (catalog().count(name)) return builtin_scenario_config(name);
  throw ConfigError("config '" + path_or_name + "' is neither a file nor a builtin scenario");
}

Scenario scenario_from_config(const Config& c) {
  Scenario s;
  s.config = c;
  s.name = c.text("scenario.name");
  s.seed = static_cast<std::uint64_t>(c.integer("scenario.seed", 1));

  s.dim = c.integer("geometry.dim");
  if (s.dim < 2 || s.dim > 3) throw ConfigError("geometry.dim must be 2 or 3");
  s.center = fixed_vector(c, "geometry.center", s.dim);
  s.halfwidth = c.number("geometry.halfwidth");
  if (!(s.halfwidth > 0.0)) throw ConfigError("geometry.halfwidth must be positive");
  s.R = c.number("geometry.R", s.halfwidth);
  s.gamma = c.number("geometry.gamma");
  if (!(s.gamma > 0.0 && s.gamma <= 1.0)) throw ConfigError("geometry.gamma must lie in (0, 1]");
  s.mu = mu_of_gamma(s.gamma);
  s.theorem_instance = c.flag("geometry.theorem_instance", false);

  const int tdim = s.dim - 1;
  const double graph_halfwidth =
      c.number("geometry.graph_halfwidth", std::max(3.0 * s.R, 2.0 * s.halfwidth) + tangential(s.center).cwiseAbs().maxCoeff());
  const int graph_count = c.integer("geometry.graph_count");
  if (graph_count < 2) throw ConfigError("geometry.graph_count must be at least 2");
  for (int k = 0; k < graph_count; ++k) {
    const std::string kind = c.text(key("geometry.graph", k, "kind"));
    const double value = c.number(key("geometry.graph", k, "value"), 0.0);
    if (kind == "constant") {
      s.graphs.push_back(GraphFunction::constant(tdim, value, s.gamma, graph_halfwidth));
    } else if (kind == "affine") {
      s.graphs.push_back(
          GraphFunction::affine(value, fixed_vector(c, key("geometry.graph", k, "slope"), tdim), s.gamma, graph_halfwidth));
    } else if (kind == "parabola") {
      const Vec vertex = c.has(key("geometry.graph", k, "vertex")) ? fixed_vector(c, key("geometry.graph", k, "vertex"), tdim)
                                                                   : Vec::Zero(tdim);
      s.graphs.push_back(GraphFunction::parabola(tdim, value, c.number(key("geometry.graph", k, "amplitude")), vertex,
                                                 s.gamma, graph_halfwidth));
    } else if (kind == "sinusoid") {
      s.graphs.push_back(GraphFunction::sinusoid(tdim, value, c.number(key("geometry.graph", k, "amplitude")),
                                                 c.number(key("geometry.graph", k, "frequency")),
                                                 c.number(key("geometry.graph", k, "shift"), 0.0), s.gamma,
                                                 graph_halfwidth));
    } else {
      throw ConfigError(key("geometry.graph", k, "kind") + " has unknown graph kind '" + kind + "'");
    }
  }

  s.components = c.integer("field.components");
  if (s.components < 1 || s.components > 2) throw ConfigError("field.components must be 1 or 2");
  s.lambda = c.number("field.lambda");
  s.Lambda = c.number("field.Lambda");
  if (!(s.lambda > 0.0) || !(s.Lambda >= s.lambda)) throw ConfigError("field.lambda and field.Lambda need 0 < lambda <= Lambda");
  if (c.has("field.mu") && std::abs(c.number("field.mu") - s.mu) > 1e-12)
    throw ConfigError("field.mu is inconsistent with geometry.gamma");
  const int w = s.components * s.dim;
  for (int k = 0; k + 1 < graph_count; ++k) {
    RegionCoefficients r;
    if (c.has(key("field.region", k, "A")))
      r.A_base = fixed_matrix(c, key("field.region", k, "A"), w, w);
    else
      r.A_base = isotropic_tensor(c.number(key("field.region", k, "a")), s.components, s.dim);
    r.F_base = c.has(key("field.region", k, "F")) ? fixed_vector(c, key("field.region", k, "F"), w) : Vec::Zero(w);
    r.A_profile = read_profile(c, key("field.region", k, "A_profile"), s.dim);
    r.F_profile = read_profile(c, key("field.region", k, "F_profile"), s.dim);
    s.regions.push_back(std::move(r));
  }
  s.perturbation = c.number("field.perturbation", 0.0);

  s.cells = c.integer("grid.cells");
  if (s.cells < 2) throw ConfigError("grid.cells must be at least 2");
  s.solver_tol = c.number("solver.tol", 1e-12);
  if (!(s.solver_tol > 0.0 && s.solver_tol <= 1e-6)) throw ConfigError("solver.tol must lie in (0, 1e-6]");

  s.boundary_kind = c.text("boundary.kind");
  if (s.boundary_kind == "affine") {
    s.boundary_offset = fixed_vector(c, "boundary.offset", s.components);
    s.boundary_slope = fixed_matrix(c, "boundary.slope", s.components, s.dim);
    if (s.perturbation != 0.0) throw ConfigError("field.perturbation requires boundary.kind = laminate_oracle");
  } else if (s.boundary_kind == "laminate_oracle") {
    s.oracle_q = fixed_matrix(c, "boundary.q", s.components, tdim);
    s.oracle_w_lower = fixed_vector(c, "boundary.w_lower", s.components);
    s.oracle_w_upper = fixed_vector(c, "boundary.w_upper", s.components);
  } else {
    throw ConfigError("boundary.kind must be affine or laminate_oracle");
  }

  AnalysisSpec& a = s.analysis;
  a.centers = c.has("analysis.centers") ? c.points("analysis.centers") : std::vector<Point>{s.center};
  for (const Point& z : a.centers)
    if (z.size() != s.dim) throw ConfigError("analysis.centers entries must have " + std::to_string(s.dim) + " coordinates");
  a.radii = c.numbers("analysis.radii", {});
  a.interface_graph = c.integer("analysis.interface_graph", -1);
  if (a.interface_graph >= graph_count) throw ConfigError("analysis.interface_graph is out of range");
  a.jump_offsets = c.numbers("analysis.jump_offsets", {2.0, 4.0, 8.0});
  a.jump_samples = c.integer("analysis.jump_samples", 17);
  a.jump_halfwidth = c.number("analysis.jump_halfwidth", 0.5 * s.halfwidth);
  a.du_jump_floor = c.number("analysis.du_jump_floor", 0.0);
  a.u_jump_offset = c.number("analysis.u_jump_offset", 4.0);
  a.u_jump_ratio_max = c.number("analysis.u_jump_ratio_max", 0.0);
  a.check_decay = c.flag("analysis.check_decay", false);
  a.u_slope_min = c.number("analysis.u_slope_min", 2.0 * s.mu - 0.1);
  a.du_slope_max = c.number("analysis.du_slope_max", 0.1);
  a.check_w_decay = c.flag("analysis.check_w_decay", false);
  a.w_slope_min = c.number("analysis.w_slope_min", 0.85);
  a.oracle_nodal_tol = c.number("analysis.oracle_nodal_tol", -1.0);
  a.oracle_W_tol = c.number("analysis.oracle_W_tol", -1.0);
  a.caccioppoli_max = c.number("analysis.caccioppoli_max", 10.0);

  // Build once to surface geometry and field errors at load time.
  const CompositeCube cube = s.cube();
  if (s.has_oracle() && !s.laminate_field())
    throw ConfigError("boundary.kind = laminate_oracle needs constant graphs and constant coefficients");
  (void)cube;
  return s;
}

CompositeCube Scenario::cube() const { return CompositeCube(center, halfwidth, graphs, gamma); }

std::shared_ptr<PiecewiseField> Scenario::piecewise_field() const {
  return std::make_shared<PiecewiseField>(cube(), regions, components, lambda, Lambda, mu);
}

std::shared_ptr<LaminateField> Scenario::laminate_field() const {
  for (const GraphFunction& g : graphs)
    if (g.kind() != GraphFunction::Kind::constant) return nullptr;
  for (const RegionCoefficients& r : regions)
    if (!r.is_constant()) return nullptr;
  std::vector<double> breakpoints;
  for (const GraphFunction& g : graphs) breakpoints.push_back(g.value(Vec::Zero(dim - 1)));
  std::vector<Tensor> A;
  std::vector<Vec> F;
  const Point probe = Point::Zero(dim);
  for (const RegionCoefficients& r : regions) {
    A.push_back(r.A(probe));
    F.push_back(r.F(probe));
  }
  return std::make_shared<LaminateField>(dim, components, breakpoints, A, F, lambda, Lambda,
                                         DomainBox{center, halfwidth});
}

std::shared_ptr<const CoefficientField> Scenario::solver_field() const {
  if (perturbation != 0.0) return std::make_shared<PerturbedLaminateField>(laminate_field(), perturbation);
  return piecewise_field();
}

std::optional<LaminateSolution> Scenario::oracle() const {
  if (!has_oracle()) return std::nullopt;
  return solve_laminate_exact(*laminate_field(), oracle_q, oracle_w_lower, oracle_w_upper);
}

std::function<Vec(const Point&)> Scenario::exact_solution() const {
  const auto sol = oracle();
  if (!sol) return {};
  if (perturbation == 0.0) return [s = *sol](const Point& x) { return s.value(x); };
  const PerturbedLaminateField pf(laminate_field(), perturbation);
  return [s = *sol, pf](const Point& x) { return Vec(s.value(x) + pf.perturbation(x)); };
}

BoundaryData Scenario::boundary() const {
  if (boundary_kind == "affine") {
    // g(x) = offset + slope (x - center) keeps the data centered on the cube.
    BoundaryData b = BoundaryData::affine(boundary_offset - boundary_slope * center, boundary_slope);
    b.description = "affine";
    return b;
  }
  return BoundaryData::function(exact_solution(), perturbation == 0.0 ? "laminate_oracle" : "laminate_oracle_perturbed");
}

StructuredGrid Scenario::grid(int cells_override) const {
  return StructuredGrid(center, halfwidth, cells_override > 0 ? cells_override : cells);
}

bool Scenario::homogeneous() const {
  for (const RegionCoefficients& r : regions)
    if (r.F_base.cwiseAbs().maxCoeff() > 0.0) return false;
  return perturbation == 0.0;
}

}  // namespace complab
