#include "starcmp/scenario.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <set>
#include <stdexcept>

#include <json.hpp>

#include "starcmp/gauss_legendre.hpp"
#include "starcmp/parallel.hpp"
#include "starcmp/report_io.hpp"
#include "starcmp/rng.hpp"

namespace starcmp {

namespace {
constexpr double kPi = 3.14159265358979323846;

std::shared_ptr<const SphereGrid> grid_for(DomainKind kind, std::size_t k) {
  if (kind == DomainKind::annulus2d || kind == DomainKind::disk2d)
    return SphereGrid::circle(k);
  return SphereGrid::sphere_gauss(k);
}

double inner_radius_for(const ScenarioSpec& sc) {
  return (sc.domain == DomainKind::disk2d || sc.domain == DomainKind::ball3d_axisym)
             ? 0.0
             : sc.geom_a;
}
}  // namespace

const char* to_string(SourceKind k) {
  switch (k) {
    case SourceKind::bandlimited: return "bandlimited";
    case SourceKind::nonneg_bandlimited: return "nonneg_bandlimited";
    case SourceKind::manufactured: return "manufactured";
    case SourceKind::symmetric: return "symmetric";
  }
  return "unknown";
}

SourceKind source_kind_from_string(const std::string& s) {
  if (s == "bandlimited") return SourceKind::bandlimited;
  if (s == "nonneg_bandlimited") return SourceKind::nonneg_bandlimited;
  if (s == "manufactured") return SourceKind::manufactured;
  if (s == "symmetric") return SourceKind::symmetric;
  throw std::invalid_argument("unknown source kind: " + s);
}

ManufacturedCase manufactured_case(DomainKind kind, double a, double b) {
  ManufacturedCase mc;
  switch (kind) {
    case DomainKind::annulus2d: {
      // u = (r-a)^2 (b-r)^2 (1 + beta cos 2phi); u = u_r = 0 on both circles
      const double beta = 0.5;
      mc.exact = [=](double r, double phi) {
        const double R = (r - a) * (r - a) * (b - r) * (b - r);
        return R * (1.0 + beta * std::cos(2.0 * phi));
      };
      mc.source = [=](double r, double phi) {
        const double R = (r - a) * (r - a) * (b - r) * (b - r);
        const double R1 = 2.0 * (r - a) * (b - r) * (b - r) -
                          2.0 * (r - a) * (r - a) * (b - r);
        const double R2 = 2.0 * (b - r) * (b - r) - 8.0 * (r - a) * (b - r) +
                          2.0 * (r - a) * (r - a);
        const double c = std::cos(2.0 * phi);
        const double lap =
            (R2 + R1 / r) * (1.0 + beta * c) - 4.0 * R / (r * r) * beta * c;
        return -lap;
      };
      return mc;
    }
    case DomainKind::disk2d: {
      // u = (b^2-r^2)^2 (1 + beta (r/b)^2 cos 2phi); the angular factor is
      // the harmonic polynomial x^2 - y^2, so its Laplacian drops out
      const double beta = 0.5;
      mc.exact = [=](double r, double phi) {
        const double p = (b * b - r * r) * (b * b - r * r);
        return p * (1.0 + beta * (r * r / (b * b)) * std::cos(2.0 * phi));
      };
      mc.source = [=](double r, double phi) {
        const double q = 1.0 + beta * (r * r / (b * b)) * std::cos(2.0 * phi);
        const double lap_p = -8.0 * b * b + 16.0 * r * r;
        const double cross =
            -8.0 * beta * r * r * (b * b - r * r) * std::cos(2.0 * phi) / (b * b);
        return -(lap_p * q + cross);
      };
      return mc;
    }
    case DomainKind::shell3d_axisym: {
      const double beta = 0.5;
      mc.exact = [=](double r, double th) {
        const double R = (r - a) * (r - a) * (b - r) * (b - r);
        return R * (1.0 + beta * std::cos(th));
      };
      mc.source = [=](double r, double th) {
        const double R = (r - a) * (r - a) * (b - r) * (b - r);
        const double R1 = 2.0 * (r - a) * (b - r) * (b - r) -
                          2.0 * (r - a) * (r - a) * (b - r);
        const double R2 = 2.0 * (b - r) * (b - r) - 8.0 * (r - a) * (b - r) +
                          2.0 * (r - a) * (r - a);
        const double c = std::cos(th);
        const double lap =
            (R2 + 2.0 * R1 / r) * (1.0 + beta * c) - 2.0 * R / (r * r) * beta * c;
        return -lap;
      };
      return mc;
    }
    case DomainKind::ball3d_axisym: {
      // u = (b^2-r^2)^2 (1 + beta (r/b) cos theta); r cos theta = z is linear
      const double beta = 0.5;
      mc.exact = [=](double r, double th) {
        const double p = (b * b - r * r) * (b * b - r * r);
        return p * (1.0 + beta * (r / b) * std::cos(th));
      };
      mc.source = [=](double r, double th) {
        const double q = 1.0 + beta * (r / b) * std::cos(th);
        const double lap_p = -12.0 * b * b + 20.0 * r * r;
        const double cross = -8.0 * beta * (r / b) * (b * b - r * r) * std::cos(th);
        return -(lap_p * q + cross);
      };
      return mc;
    }
    case DomainKind::cylinder_rect: {
      // u = x^2 (L-x)^2 cos(pi y / ell): Neumann top/bottom, u = u_x = 0 on
      // the lateral faces
      const double lx = a, ly = b;
      mc.exact = [=](double x, double y) {
        return x * x * (lx - x) * (lx - x) * std::cos(kPi * y / ly);
      };
      mc.source = [=](double x, double y) {
        const double X = x * x * (lx - x) * (lx - x);
        const double X2 = 2.0 * (lx - x) * (lx - x) - 8.0 * x * (lx - x) +
                          2.0 * x * x;
        const double ky = kPi / ly;
        return (ky * ky * X - X2) * std::cos(ky * y);
      };
      return mc;
    }
  }
  throw std::invalid_argument("manufactured_case: unknown domain");
}

ShellField generate_shell_source(const ScenarioSpec& sc) {
  const double a = inner_radius_for(sc);
  const double b = sc.geom_b;
  ShellField f = ShellField::zeros(a, b, sc.n_radial, grid_for(sc.domain, sc.n_angular));
  const int dim = f.dim();
  const int mm = std::max(sc.source.max_mode, 0);
  Xoshiro256pp rng(sc.source.seed);

  const auto radial_basis = [&](int q, double r) {
    return std::cos(static_cast<double>(q) * kPi * (r - a) / (b - a));
  };

  switch (sc.source.kind) {
    case SourceKind::manufactured: {
      const ManufacturedCase mc = manufactured_case(sc.domain, a, b);
      for (std::size_t i = 0; i < f.n_radial(); ++i)
        for (std::size_t j = 0; j < f.n_angular(); ++j)
          f.at(i, j) = sc.source.amplitude *
                       mc.source(f.radius[i], (dim == 2) ? f.grid->angle[j]
                                                         : f.grid->polar[j]);
      break;
    }
    case SourceKind::bandlimited:
    case SourceKind::nonneg_bandlimited: {
      // coefficients drawn in a fixed order, before any sampling
      std::vector<double> c1((mm + 1) * (mm + 1)), c2((mm + 1) * (mm + 1), 0.0);
      for (int q = 0; q <= mm; ++q)
        for (int m = 0; m <= mm; ++m) {
          c1[q * (mm + 1) + m] = rng.uniform_pm1();
          if (dim == 2 && m > 0) c2[q * (mm + 1) + m] = rng.uniform_pm1();
        }
      std::vector<double> leg(static_cast<std::size_t>(mm) + 1);
      for (std::size_t i = 0; i < f.n_radial(); ++i) {
        for (std::size_t j = 0; j < f.n_angular(); ++j) {
          double v = 0.0;
          if (dim == 2) {
            const double phi = f.grid->angle[j];
            for (int q = 0; q <= mm; ++q) {
              const double rb = radial_basis(q, f.radius[i]);
              for (int m = 0; m <= mm; ++m)
                v += rb * (c1[q * (mm + 1) + m] * std::cos(m * phi) +
                           c2[q * (mm + 1) + m] * std::sin(m * phi));
            }
          } else {
            legendre_row(std::cos(f.grid->polar[j]), mm, leg.data());
            for (int q = 0; q <= mm; ++q) {
              const double rb = radial_basis(q, f.radius[i]);
              for (int m = 0; m <= mm; ++m)
                v += rb * c1[q * (mm + 1) + m] * leg[m];
            }
          }
          f.at(i, j) = v;
        }
      }
      if (sc.source.kind == SourceKind::nonneg_bandlimited)
        for (double& v : f.value) v = v * v;
      for (double& v : f.value) v *= sc.source.amplitude;
      break;
    }
    case SourceKind::symmetric: {
      // f = A(r) + B(r) * (first angular mode) with B >= 0: every slice is
      // already symmetric decreasing, so f = f# holds bit for bit
      std::vector<double> ca(mm + 1), cb(mm + 1);
      for (int q = 0; q <= mm; ++q) ca[q] = rng.uniform_pm1();
      for (int q = 0; q <= mm; ++q) cb[q] = rng.uniform_pm1();
      for (std::size_t i = 0; i < f.n_radial(); ++i) {
        double A = 0.0, B = 0.0;
        for (int q = 0; q <= mm; ++q) {
          A += ca[q] * radial_basis(q, f.radius[i]);
          B += cb[q] * radial_basis(q, f.radius[i]);
        }
        B = B * B;
        for (std::size_t j = 0; j < f.n_angular(); ++j)
          f.at(i, j) = sc.source.amplitude * (A + B * std::cos(f.grid->polar[j]));
      }
      break;
    }
  }
  if (sc.alpha1 == 0.0 && sc.alpha2 == 0.0 && sc.source.project_zero_mean)
    f = normalize_zero_mean(f);
  return f;
}

CylinderField generate_cylinder_source(const ScenarioSpec& sc) {
  CylinderField f = CylinderField::zeros(sc.length, sc.height, sc.n_radial,
                                         sc.n_angular);
  const int mm = std::max(sc.source.max_mode, 0);
  Xoshiro256pp rng(sc.source.seed);
  switch (sc.source.kind) {
    case SourceKind::manufactured: {
      const ManufacturedCase mc = manufactured_case(sc.domain, sc.length, sc.height);
      for (std::size_t i = 0; i < f.n_x(); ++i)
        for (std::size_t j = 0; j < f.n_y(); ++j)
          f.at(i, j) = sc.source.amplitude * mc.source(f.x[i], f.y[j]);
      break;
    }
    case SourceKind::bandlimited:
    case SourceKind::nonneg_bandlimited: {
      std::vector<double> c((mm + 1) * (mm + 1));
      for (double& v : c) v = rng.uniform_pm1();
      for (std::size_t i = 0; i < f.n_x(); ++i)
        for (std::size_t j = 0; j < f.n_y(); ++j) {
          double v = 0.0;
          for (int q = 0; q <= mm; ++q)
            for (int k = 0; k <= mm; ++k)
              v += c[q * (mm + 1) + k] * std::cos(q * kPi * f.x[i] / sc.length) *
                   std::cos(k * kPi * f.y[j] / sc.height);
          f.at(i, j) = v;
        }
      if (sc.source.kind == SourceKind::nonneg_bandlimited)
        for (double& v : f.value) v = v * v;
      for (double& v : f.value) v *= sc.source.amplitude;
      break;
    }
    case SourceKind::symmetric: {
      std::vector<double> ca(mm + 1), cb(mm + 1);
      for (int q = 0; q <= mm; ++q) ca[q] = rng.uniform_pm1();
      for (int q = 0; q <= mm; ++q) cb[q] = rng.uniform_pm1();
      for (std::size_t i = 0; i < f.n_x(); ++i) {
        double A = 0.0, B = 0.0;
        for (int q = 0; q <= mm; ++q) {
          A += ca[q] * std::cos(q * kPi * f.x[i] / sc.length);
          B += cb[q] * std::cos(q * kPi * f.x[i] / sc.length);
        }
        B = B * B;
        for (std::size_t j = 0; j < f.n_y(); ++j)
          f.at(i, j) = sc.source.amplitude *
                       (A + B * std::cos(kPi * f.y[j] / sc.height));
      }
      break;
    }
  }
  if (sc.alpha1 == 0.0 && sc.alpha2 == 0.0 && sc.source.project_zero_mean)
    f = normalize_zero_mean(f);
  return f;
}

RobinProblemSpec make_problem(const ScenarioSpec& sc) {
  RobinProblemSpec spec;
  spec.kind = sc.domain;
  spec.alpha_inner = sc.alpha1;
  spec.alpha_outer = sc.alpha2;
  spec.zero_mean_normalization = (sc.alpha1 == 0.0 && sc.alpha2 == 0.0);
  if (is_radial_domain(sc.domain))
    spec.source = generate_shell_source(sc);
  else
    spec.source = generate_cylinder_source(sc);
  return spec;
}

ComparisonReport run_scenario(const ScenarioSpec& sc, const ToleranceConfig& tol) {
  ComparisonReport rep;
  rep.scenario_id = sc.id;
  rep.seed = sc.source.seed;
  try {
    HarnessOptions opts;
    opts.c_tol = tol.c_tol;
    opts.violation_floor_rel = tol.violation_floor;
    const RobinProblemSpec spec = make_problem(sc);
    rep = run_comparison(spec, opts);
    rep.scenario_id = sc.id;
    rep.seed = sc.source.seed;
  } catch (const std::exception& e) {
    rep.domain = sc.domain;
    rep.error = e.what();
    rep.pass = false;
  }
  return rep;
}

ScenarioOutcome run_scenario_full(const ScenarioSpec& sc, const ToleranceConfig& tol) {
  ScenarioOutcome out;
  out.report = run_scenario(sc, tol);
  if (sc.emit_plot_data && out.report.error.empty()) {
    const PolarRectField field = violation_field(make_problem(sc));
    PlotData plot;
    const std::size_t s1 = std::max<std::size_t>(1, field.radius.size() / 64);
    const std::size_t s2 = std::max<std::size_t>(1, field.theta.size() / 64);
    for (std::size_t i = 0; i < field.radius.size(); i += s1)
      plot.axis1.push_back(field.radius[i]);
    for (std::size_t k = 0; k < field.theta.size(); k += s2)
      plot.axis2.push_back(field.theta[k]);
    for (std::size_t i = 0; i < field.radius.size(); i += s1)
      for (std::size_t k = 0; k < field.theta.size(); k += s2)
        plot.violation.push_back(field.at(i, k));
    out.plot = std::move(plot);
  }
  return out;
}

SuiteConfig default_suite(std::uint64_t seed) {
  SuiteConfig cfg;
  cfg.out_dir = "out";
  auto add = [&](const std::string& id, DomainKind dom, double a1, double a2,
                 SourceKind kind, std::uint64_t s) {
    ScenarioSpec sc;
    sc.id = id;
    sc.domain = dom;
    sc.alpha1 = a1;
    sc.alpha2 = a2;
    sc.source.kind = kind;
    sc.source.seed = seed + s;
    sc.n_radial = 64;
    sc.n_angular = (dom == DomainKind::cylinder_rect) ? 64 : 128;
    if (dom == DomainKind::annulus2d || dom == DomainKind::shell3d_axisym) {
      sc.geom_a = 1.0;
      sc.geom_b = 2.0;
    } else {
      sc.geom_b = 1.0;
    }
    cfg.scenarios.push_back(sc);
  };
  add("annulus-robin", DomainKind::annulus2d, 1.0, 2.0, SourceKind::bandlimited, 1);
  add("annulus-neumann", DomainKind::annulus2d, 0.0, 0.0, SourceKind::bandlimited, 2);
  add("annulus-mixed", DomainKind::annulus2d, 1.0, 0.0, SourceKind::bandlimited, 3);
  add("annulus-nonneg", DomainKind::annulus2d, 1.0, 2.0,
      SourceKind::nonneg_bandlimited, 4);
  add("annulus-equality", DomainKind::annulus2d, 1.0, 0.0, SourceKind::symmetric, 5);
  add("disk-robin", DomainKind::disk2d, 0.0, 1.0, SourceKind::bandlimited, 6);
  add("disk-neumann", DomainKind::disk2d, 0.0, 0.0, SourceKind::bandlimited, 7);
  add("ball-robin", DomainKind::ball3d_axisym, 0.0, 1.0, SourceKind::bandlimited, 8);
  add("ball-equality", DomainKind::ball3d_axisym, 0.0, 2.0, SourceKind::symmetric, 9);
  add("shell-robin", DomainKind::shell3d_axisym, 1.0, 2.0, SourceKind::bandlimited, 10);
  add("shell-neumann", DomainKind::shell3d_axisym, 0.0, 0.0, SourceKind::bandlimited, 11);
  add("cylinder-robin", DomainKind::cylinder_rect, 1.0, 2.0, SourceKind::bandlimited, 12);
  add("cylinder-neumann", DomainKind::cylinder_rect, 0.0, 0.0, SourceKind::bandlimited, 13);
  add("cylinder-equality", DomainKind::cylinder_rect, 1.0, 0.0, SourceKind::symmetric, 14);
  cfg.scenarios.front().emit_plot_data = true;
  return cfg;
}

namespace {

[[noreturn]] void config_error(const std::string& where, const std::string& what) {
  throw std::runtime_error("config error" + (where.empty() ? "" : " (" + where + ")") +
                           ": " + what);
}

void reject_unknown_keys(const nlohmann::json& obj,
                         const std::set<std::string>& allowed,
                         const std::string& where) {
  for (const auto& [key, value] : obj.items())
    if (!allowed.count(key)) config_error(where, "unknown key '" + key + "'");
}

ScenarioSpec parse_scenario(const nlohmann::json& j, std::size_t index) {
  ScenarioSpec sc;
  sc.id = "scenario-" + std::to_string(index);
  const std::string where_base = j.value("id", sc.id);
  reject_unknown_keys(j,
                      {"id", "domain", "geometry", "alpha", "grid", "source",
                       "refinement_levels", "emit_plot_data"},
                      where_base);
  if (j.contains("id")) sc.id = j.at("id").get<std::string>();
  if (!j.contains("domain")) config_error(sc.id, "missing 'domain'");
  sc.domain = domain_from_string(j.at("domain").get<std::string>());

  if (j.contains("geometry")) {
    const auto& g = j.at("geometry");
    if (sc.domain == DomainKind::annulus2d || sc.domain == DomainKind::shell3d_axisym) {
      reject_unknown_keys(g, {"a", "b"}, sc.id + ".geometry");
      sc.geom_a = g.value("a", 1.0);
      sc.geom_b = g.value("b", 2.0);
      if (!(sc.geom_a > 0.0) || !(sc.geom_b > sc.geom_a))
        config_error(sc.id, "need 0 < a < b");
    } else if (sc.domain == DomainKind::cylinder_rect) {
      reject_unknown_keys(g, {"length", "height"}, sc.id + ".geometry");
      sc.length = g.value("length", 1.0);
      sc.height = g.value("height", 1.0);
      if (!(sc.length > 0.0) || !(sc.height > 0.0))
        config_error(sc.id, "need positive length and height");
    } else {
      reject_unknown_keys(g, {"radius"}, sc.id + ".geometry");
      sc.geom_b = g.value("radius", 1.0);
      if (!(sc.geom_b > 0.0)) config_error(sc.id, "need positive radius");
    }
  }

  if (j.contains("alpha")) {
    const auto& al = j.at("alpha");
    if (al.is_number()) {
      sc.alpha1 = 0.0;
      sc.alpha2 = al.get<double>();
      if (sc.domain == DomainKind::annulus2d || sc.domain == DomainKind::shell3d_axisym ||
          sc.domain == DomainKind::cylinder_rect)
        sc.alpha1 = sc.alpha2;  // scalar alpha means both boundary pieces
    } else if (al.is_array() && al.size() == 2) {
      sc.alpha1 = al.at(0).get<double>();
      sc.alpha2 = al.at(1).get<double>();
    } else {
      config_error(sc.id, "'alpha' must be a number or a pair");
    }
    if (sc.alpha1 < 0.0 || sc.alpha2 < 0.0)
      config_error(sc.id, "alpha must be nonnegative");
    if ((sc.domain == DomainKind::disk2d || sc.domain == DomainKind::ball3d_axisym) &&
        sc.alpha1 != 0.0)
      config_error(sc.id, "ball/disk domains have a single Robin boundary");
  }

  if (j.contains("grid")) {
    const auto& g = j.at("grid");
    if (sc.domain == DomainKind::cylinder_rect) {
      reject_unknown_keys(g, {"nx", "ny"}, sc.id + ".grid");
      sc.n_radial = g.value("nx", 64);
      sc.n_angular = g.value("ny", 64);
    } else {
      reject_unknown_keys(g, {"radial", "angular"}, sc.id + ".grid");
      sc.n_radial = g.value("radial", 64);
      sc.n_angular = g.value("angular", 128);
    }
    if (sc.n_radial < 8 || sc.n_angular < 8)
      config_error(sc.id, "grid too small (need >= 8 nodes per axis)");
    if ((sc.domain == DomainKind::annulus2d || sc.domain == DomainKind::disk2d) &&
        sc.n_angular % 2 != 0)
      config_error(sc.id, "angular grid must be even for planar domains");
  }

  if (j.contains("source")) {
    const auto& s = j.at("source");
    reject_unknown_keys(
        s, {"kind", "seed", "max_mode", "amplitude", "project_zero_mean"},
        sc.id + ".source");
    if (s.contains("kind"))
      sc.source.kind = source_kind_from_string(s.at("kind").get<std::string>());
    sc.source.seed = s.value("seed", std::uint64_t{1});
    sc.source.max_mode = s.value("max_mode", 8);
    sc.source.amplitude = s.value("amplitude", 1.0);
    sc.source.project_zero_mean = s.value("project_zero_mean", true);
    if (sc.source.max_mode < 0 || sc.source.max_mode > 32)
      config_error(sc.id, "max_mode out of range [0, 32]");
  }
  if (sc.alpha1 == 0.0 && sc.alpha2 == 0.0 && !sc.source.project_zero_mean)
    config_error(sc.id, "Neumann compatibility violated");

  sc.refinement_levels = j.value("refinement_levels", 1);
  sc.emit_plot_data = j.value("emit_plot_data", false);
  if (sc.refinement_levels < 1 || sc.refinement_levels > 6)
    config_error(sc.id, "refinement_levels out of range [1, 6]");
  return sc;
}

}  // namespace

SuiteConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path);
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::runtime_error(std::string("config parse error: ") + e.what());
  }

  SuiteConfig cfg;
  reject_unknown_keys(j, {"schema_version", "tolerance", "output", "jobs", "scenarios"},
                      "");
  cfg.schema_version = j.value("schema_version", 1);
  if (cfg.schema_version != 1)
    config_error("", "unsupported schema_version");
  if (j.contains("tolerance")) {
    const auto& t = j.at("tolerance");
    reject_unknown_keys(t, {"c_tol", "violation_floor"}, "tolerance");
    cfg.tolerance.c_tol = t.value("c_tol", 10.0);
    cfg.tolerance.violation_floor = t.value("violation_floor", 1e-12);
    if (!(cfg.tolerance.c_tol > 0.0)) config_error("tolerance", "c_tol must be positive");
  }
  if (j.contains("output")) {
    const auto& o = j.at("output");
    reject_unknown_keys(o, {"dir"}, "output");
    cfg.out_dir = o.value("dir", "out");
  }
  cfg.jobs = j.value("jobs", 0);
  if (!j.contains("scenarios") || !j.at("scenarios").is_array() ||
      j.at("scenarios").empty())
    config_error("", "need a nonempty 'scenarios' array");
  std::set<std::string> ids;
  std::size_t index = 0;
  for (const auto& sj : j.at("scenarios")) {
    ScenarioSpec sc = parse_scenario(sj, index++);
    if (!ids.insert(sc.id).second) config_error(sc.id, "duplicate scenario id");
    cfg.scenarios.push_back(std::move(sc));
  }
  return cfg;
}

int run_suite(const SuiteConfig& config, std::ostream& log) {
  namespace fs = std::filesystem;
  if (!fs::exists(config.out_dir) || !fs::is_directory(config.out_dir)) {
    log << "error: output directory missing: " << config.out_dir << "\n";
    return 2;
  }
  if (config.jobs > 0) par::set_max_threads(config.jobs);

  std::vector<ScenarioOutcome> outcomes(config.scenarios.size());
  par::parallel_for(config.scenarios.size(), [&](std::size_t i) {
    outcomes[i] = run_scenario_full(config.scenarios[i], config.tolerance);
  });

  bool any_error = false, any_violation = false;
  for (const auto& oc : outcomes) {
    const ComparisonReport& r = oc.report;
    if (!r.error.empty()) {
      any_error = true;
      log << "[ERROR] " << r.scenario_id << ": " << r.error << "\n";
    } else if (!r.pass) {
      any_violation = true;
      log << "[FAIL]  " << r.scenario_id << " max_violation=" << r.max_violation
          << " tol=" << r.tolerance << " checks:";
      for (const auto& f : r.failures) log << " " << f;
      log << "\n";
    } else {
      log << "[PASS]  " << r.scenario_id << " max_violation=" << r.max_violation
          << " tol=" << r.tolerance << "\n";
    }
  }
  try {
    write_suite_outputs(config, outcomes);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << "\n";
    return 2;
  }
  if (any_error) return 2;
  if (any_violation) return 1;
  return 0;
}

CalibrationResult calibrate_domain(DomainKind kind, int levels,
                                   std::uint64_t seed0, std::ostream& log) {
  CalibrationResult out;
  out.domain = kind;
  const int n_seeds = 5;
  double worst_ratio = 0.0;
  for (int lvl = 0; lvl < levels; ++lvl) {
    CalibrationLevel row;
    row.n_radial = std::size_t{32} << lvl;
    for (int s = 0; s < n_seeds; ++s) {
      ScenarioSpec sc;
      sc.id = "cal";
      sc.domain = kind;
      sc.n_radial = row.n_radial;
      sc.n_angular = (kind == DomainKind::cylinder_rect) ? row.n_radial
                                                         : 2 * row.n_radial;
      sc.alpha1 = (kind == DomainKind::disk2d || kind == DomainKind::ball3d_axisym)
                      ? 0.0
                      : 1.0;
      sc.alpha2 = 2.0;
      sc.source.seed = seed0 + static_cast<std::uint64_t>(s);
      ToleranceConfig unit_tol;
      unit_tol.c_tol = 1.0;  // report tolerances at c_tol = 1 to read off ratios
      const ComparisonReport rep = run_scenario(sc, unit_tol);
      if (!rep.error.empty()) throw std::runtime_error("calibration solve failed: " + rep.error);
      row.max_violation = std::max(row.max_violation, rep.max_violation);
      if (rep.v_symmetrization_defect)
        row.v_sym = std::max(row.v_sym, *rep.v_symmetrization_defect);
      if (rep.subharmonicity_margin)
        row.subharmonicity = std::max(row.subharmonicity, *rep.subharmonicity_margin);
      if (rep.commutativity_defect)
        row.commutativity = std::max(row.commutativity, *rep.commutativity_defect);
      double ratio = std::max(rep.max_violation / rep.tolerance, 0.0);
      if (rep.v_symmetrization_defect)
        ratio = std::max(ratio, *rep.v_symmetrization_defect / rep.tolerance);
      if (rep.mean_equality_defect)
        ratio = std::max(ratio, *rep.mean_equality_defect / rep.tolerance);
      if (rep.flux_constancy_defect)
        ratio = std::max(ratio, *rep.flux_constancy_defect / rep.tolerance);
      if (rep.subharmonicity_margin && rep.subharmonicity_tol)
        ratio = std::max(ratio, *rep.subharmonicity_margin / *rep.subharmonicity_tol);
      if (rep.commutativity_defect && rep.commutativity_tol)
        ratio = std::max(ratio, *rep.commutativity_defect / *rep.commutativity_tol);
      ratio = std::max(ratio, -rep.convex.worst_margin / rep.tolerance);
      row.worst_tol_ratio = std::max(row.worst_tol_ratio, ratio);
    }
    worst_ratio = std::max(worst_ratio, row.worst_tol_ratio);
    out.levels.push_back(row);
    log << "level " << lvl << " n=" << row.n_radial
        << " violation=" << row.max_violation << " v_sym=" << row.v_sym
        << " subharm=" << row.subharmonicity << " commut=" << row.commutativity
        << " worst_ratio=" << row.worst_tol_ratio << "\n";
  }
  out.fitted_c_tol = std::max(1.0, 2.0 * worst_ratio);

  // empirical decay order of the violation across levels, floored
  std::vector<double> v;
  for (const auto& row : out.levels) v.push_back(row.max_violation);
  double order_sum = 0.0;
  int order_count = 0;
  const double floor_abs = 1e-10;
  for (std::size_t i = 0; i + 1 < v.size(); ++i)
    if (v[i] > floor_abs && v[i + 1] > floor_abs) {
      order_sum += std::log2(v[i] / v[i + 1]);
      ++order_count;
    }
  out.empirical_order = (order_count > 0) ? order_sum / order_count : 99.0;
  log << "fitted c_tol = " << out.fitted_c_tol
      << ", empirical violation order = " << out.empirical_order << "\n";
  return out;
}

}  // namespace starcmp
