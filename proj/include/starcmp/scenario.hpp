#ifndef STARCMP_SCENARIO_HPP
#define STARCMP_SCENARIO_HPP

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "starcmp/compare_harness.hpp"
#include "starcmp/robin_solver.hpp"

namespace starcmp {

enum class SourceKind { bandlimited, nonneg_bandlimited, manufactured, symmetric };

const char* to_string(SourceKind k);
SourceKind source_kind_from_string(const std::string& s);

struct SourceSpec {
  SourceKind kind = SourceKind::bandlimited;
  std::uint64_t seed = 1;
  int max_mode = 8;          // Fourier mode / Legendre degree band limit
  double amplitude = 1.0;
  // Neumann-regime sources are projected to zero mean after generation;
  // disabling the projection while all alphas vanish is a config error.
  bool project_zero_mean = true;
};

struct ScenarioSpec {
  std::string id;
  DomainKind domain = DomainKind::annulus2d;
  double geom_a = 1.0;   // inner radius (annulus/shell)
  double geom_b = 2.0;   // outer radius / ball radius
  double length = 1.0;   // cylinder L
  double height = 1.0;   // cylinder ell
  double alpha1 = 0.0;   // inner/lateral-left; must be 0 for disk/ball
  double alpha2 = 0.0;   // outer/lateral-right; the single alpha of disk/ball
  SourceSpec source;
  std::size_t n_radial = 64;    // nx for the cylinder
  std::size_t n_angular = 128;  // ny for the cylinder
  int refinement_levels = 1;
  bool emit_plot_data = false;
};

struct ToleranceConfig {
  double c_tol = 10.0;
  double violation_floor = 1e-12;  // relative floor for order fitting
};

struct SuiteConfig {
  int schema_version = 1;
  ToleranceConfig tolerance;
  std::string out_dir = "out";
  int jobs = 0;  // 0 = library default
  std::vector<ScenarioSpec> scenarios;
};

// Manufactured solutions with homogeneous Robin data for every alpha (the
// exact solution and its normal derivative vanish on the boundary); f = -Delta u
// computed in closed form.  Radial domains take (r, theta); the cylinder
// takes (x, y).
struct ManufacturedCase {
  std::function<double(double, double)> exact;
  std::function<double(double, double)> source;
};
ManufacturedCase manufactured_case(DomainKind kind, double a, double b);

// deterministic seeded sources (bit-identical for equal seeds; coefficients
// are drawn before sampling, so refinements of the same seed sample one
// underlying function)
ShellField generate_shell_source(const ScenarioSpec& sc);
CylinderField generate_cylinder_source(const ScenarioSpec& sc);

RobinProblemSpec make_problem(const ScenarioSpec& sc);

struct PlotData {
  std::vector<double> axis1, axis2;  // radius x theta, or x x y
  std::vector<double> violation;     // axis1-major
};

struct ScenarioOutcome {
  ComparisonReport report;
  std::optional<PlotData> plot;
};

ComparisonReport run_scenario(const ScenarioSpec& sc, const ToleranceConfig& tol);
ScenarioOutcome run_scenario_full(const ScenarioSpec& sc, const ToleranceConfig& tol);

// the built-in suite exercised by `starcmp suite --preset default`
SuiteConfig default_suite(std::uint64_t seed);

// strict JSON config loading: unknown keys are rejected, defaults are filled
// and echoed back by config_to_json (report_io.hpp)
SuiteConfig load_config(const std::string& path);

// Executes all scenarios (scenario-level parallelism), writes reports.json,
// summary.csv, per-scenario plot data and metadata.json into out_dir.
// Exit code contract: 0 all pass, 1 theorem violation, 2 operational error.
int run_suite(const SuiteConfig& config, std::ostream& log);

struct CalibrationLevel {
  std::size_t n_radial = 0;
  double max_violation = 0.0;
  double v_sym = 0.0;
  double subharmonicity = 0.0;
  double commutativity = 0.0;
  double worst_tol_ratio = 0.0;  // worst defect / tol(h) at c_tol = 1
};

struct CalibrationResult {
  DomainKind domain = DomainKind::annulus2d;
  std::vector<CalibrationLevel> levels;
  double fitted_c_tol = 0.0;     // 2x worst observed ratio
  double empirical_order = 0.0;  // violation decay order (99 = at floor)
};

CalibrationResult calibrate_domain(DomainKind kind, int levels,
                                   std::uint64_t seed0, std::ostream& log);

}  // namespace starcmp

#endif
