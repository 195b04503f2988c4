#include "starcmp/compare_harness.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "starcmp/axis_symmetry.hpp"
#include "starcmp/parallel.hpp"
#include "starcmp/sphere_symmetry.hpp"

namespace starcmp {

namespace {

constexpr double kPi = 3.14159265358979323846;

double inf_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

double domain_length(const RobinProblemSpec& spec) {
  if (is_radial_domain(spec.kind)) {
    const ShellField& f = spec.shell_source();
    return (f.inner_radius > 0.0) ? f.outer_radius - f.inner_radius
                                  : f.outer_radius;
  }
  const CylinderField& f = spec.cylinder_source();
  return std::max(f.base_length, f.height);
}

std::vector<double> uniform_theta_grid(std::size_t k) {
  std::vector<double> t(k + 1);
  for (std::size_t j = 0; j <= k; ++j)
    t[j] = kPi * static_cast<double>(j) / static_cast<double>(k);
  return t;
}

// Uniform theta grid for finite differencing of J-fields.  For n=2 each step
// must consume a whole +-phi node pair: sampling J at boundaries that split
// a pair injects an alternating O(h^2) component whose second difference is
// O(1).
std::size_t fd_theta_count(const SphereGrid& g) {
  return (g.dim == 2) ? g.size() / 2 : g.size();
}

WeightedSamples slice_samples(const ShellField& f, std::size_t i) {
  return WeightedSamples::create(
      std::vector<double>(f.slice(i), f.slice(i) + f.n_angular()),
      f.grid->weight);
}

WeightedSamples column_samples(const CylinderField& f, std::size_t i) {
  const double dy = f.height / static_cast<double>(f.n_y());
  return WeightedSamples::create(
      std::vector<double>(f.column(i), f.column(i) + f.n_y()),
      std::vector<double>(f.n_y(), dy));
}

// C^2 bump (1-s^2)^3 on |s|<1, zero outside
double bump(double s) {
  const double q = 1.0 - s * s;
  return (q > 0.0) ? q * q * q : 0.0;
}

struct SliceAggregates {
  ConvexSummary convex;
  LpSummary lp;
};

// per-slice convex means and Lp dominations shared by the three runners
template <class SliceFn>
SliceAggregates aggregate_slices(std::size_t n_slices, SliceFn&& slices,
                                 bool require_increasing, bool means_equal_regime,
                                 bool nonneg_source, const HarnessOptions& opts,
                                 double tol) {
  SliceAggregates out;
  out.convex.checked = true;
  out.convex.pass = true;
  out.convex.all_convex = !require_increasing;
  out.convex.tolerance = tol;
  out.convex.worst_margin = 0.0;

  out.lp.applicable = means_equal_regime || nonneg_source;
  out.lp.hypothesis = means_equal_regime ? "means_equal"
                      : nonneg_source    ? "nonneg"
                                         : "none";
  out.lp.pass = true;
  out.lp.worst_margin = 0.0;

  for (std::size_t i = 0; i < n_slices; ++i) {
    const auto [su, sv] = slices(i);
    const ConvexMeansReport cm = convex_means_compare(su, sv, require_increasing);
    out.convex.worst_margin = std::min(out.convex.worst_margin, cm.worst_margin);
    if (cm.worst_margin < -tol) out.convex.pass = false;
    if (!cm.agree) out.convex.star_agrees = false;

    if (out.lp.applicable) {
      const LpReport lr = lp_compare_report(su, sv, opts.lp_exponents,
                                            means_equal_regime, nonneg_source);
      if (out.lp.rows.empty()) out.lp.rows = lr.rows;
      for (std::size_t r = 0; r < lr.rows.size(); ++r) {
        if (lr.rows[r].margin < out.lp.rows[r].margin) out.lp.rows[r] = lr.rows[r];
        out.lp.worst_margin = std::min(out.lp.worst_margin, lr.rows[r].margin);
      }
      if (out.lp.worst_margin < -tol) out.lp.pass = false;
    }
  }
  return out;
}

void assemble_verdict(ComparisonReport& rep, double sub_tol, double commut_tol,
                      bool require_k1_zero) {
  const auto check = [&](const char* name, bool ok) {
    if (!ok) rep.failures.emplace_back(name);
  };
  check("violation", rep.max_violation <= rep.tolerance);
  if (rep.convex.checked) check("convex_means", rep.convex.pass);
  if (rep.convex.checked) check("convex_star_agreement", rep.convex.star_agrees);
  if (rep.lp.applicable) check("lp", rep.lp.pass);
  if (rep.mean_equality_defect)
    check("mean_equality", *rep.mean_equality_defect <= rep.tolerance);
  if (rep.flux_constancy_defect)
    check("flux_constancy", *rep.flux_constancy_defect <= rep.tolerance);
  if (rep.flux_k1 && require_k1_zero) check("flux_k1", *rep.flux_k1 <= rep.tolerance);
  if (rep.v_symmetrization_defect)
    check("v_symmetrized", *rep.v_symmetrization_defect <= rep.tolerance);
  if (rep.subharmonicity_margin) {
    rep.subharmonicity_tol = sub_tol;
    check("subharmonicity", *rep.subharmonicity_margin <= sub_tol);
  }
  if (rep.commutativity_defect) {
    rep.commutativity_tol = commut_tol;
    check("commutativity", *rep.commutativity_defect <= commut_tol);
  }
  rep.pass = rep.failures.empty() && rep.error.empty();
}

ComparisonReport run_radial(const RobinProblemSpec& spec, const HarnessOptions& opts,
                            bool ball_conclusions) {
  ComparisonReport rep;
  rep.domain = spec.kind;
  rep.alpha_inner = spec.alpha_inner;
  rep.alpha_outer = spec.alpha_outer;
  const ShellField& f = spec.shell_source();
  rep.n_radial = f.n_radial();
  rep.n_angular = f.n_angular();
  rep.dr = f.radial_step();
  rep.dtheta = kPi / static_cast<double>(f.n_angular());
  rep.source_inf_norm = inf_norm(f.value);
  rep.tolerance = tolerance_for(spec, opts);

  const SolveResult su = solve(spec);
  RobinProblemSpec spec_v = spec;
  spec_v.source = cap_symmetrize(f);
  const SolveResult sv = solve(spec_v);
  const ShellField& u = su.shell();
  const ShellField& v = sv.shell();
  rep.interior_residual_u = su.interior_residual;
  rep.interior_residual_v = sv.interior_residual;
  rep.boundary_residual_u = su.boundary_residual;
  rep.boundary_residual_v = sv.boundary_residual;

  const std::vector<double> thetas = cap_boundary_thetas(*f.grid);
  const PolarRectField ustar = star_shell(u, thetas);
  const PolarRectField jv = j_operator(v, thetas);
  rep.violation_profile.assign(u.n_radial(), 0.0);
  double worst = -1e300;
  for (std::size_t i = 0; i < u.n_radial(); ++i) {
    double row = -1e300;
    for (std::size_t k = 0; k < thetas.size(); ++k)
      row = std::max(row, ustar.at(i, k) - jv.at(i, k));
    rep.violation_profile[i] = row;
    worst = std::max(worst, row);
  }
  rep.max_violation = worst;

  // per-radius convex means and Lp tables
  const bool all_neumann = spec.all_neumann();
  const bool require_increasing = !ball_conclusions && !all_neumann;
  const bool means_equal_regime = ball_conclusions || all_neumann;
  double fmin = f.value.empty() ? 0.0 : f.value[0];
  for (double x : f.value) fmin = std::min(fmin, x);
  // the Lp corollary on shells wants both alphas positive with f >= 0; on
  // balls a positive alpha suffices (otherwise means_equal already covers it)
  const bool nonneg_source =
      fmin >= 0.0 && !means_equal_regime &&
      (ball_conclusions
           ? spec.alpha_outer > 0.0
           : spec.alpha_inner > 0.0 && spec.alpha_outer > 0.0);
  const SliceAggregates agg = aggregate_slices(
      u.n_radial(),
      [&](std::size_t i) {
        return std::pair<WeightedSamples, WeightedSamples>(slice_samples(u, i),
                                                           slice_samples(v, i));
      },
      require_increasing, means_equal_regime, nonneg_source, opts, rep.tolerance);
  rep.convex = agg.convex;
  rep.lp = agg.lp;

  if (means_equal_regime)
    rep.mean_equality_defect = check_equal_slice_means(
        u, v, spec.kind, spec.alpha_inner, spec.alpha_outer);
  const FluxDiagnostics flux = check_flux_constancy(u, v);
  rep.flux_constancy_defect = flux.defect;
  rep.flux_k1 = flux.k1;
  rep.v_symmetrization_defect = check_v_symmetrized(v);

  double sub_tol = 0.0, commut_tol = 0.0;
  if (opts.with_subharmonicity) {
    rep.subharmonicity_margin = check_subharmonicity_weak(spec, su, opts);
    sub_tol = rep.tolerance * sphere_measure(f.dim());
  }
  if (opts.with_commutativity) {
    rep.commutativity_defect = check_commutativity(
        spec.kind, f.inner_radius, f.outer_radius, f.n_radial(), f.n_angular());
    commut_tol = opts.c_tol * (rep.dr * rep.dr + rep.dtheta * rep.dtheta);
  }
  assemble_verdict(rep, sub_tol, commut_tol, ball_conclusions);
  return rep;
}

}  // namespace

double tolerance_for(const RobinProblemSpec& spec, const HarnessOptions& opts) {
  double dr, dth;
  if (is_radial_domain(spec.kind)) {
    const ShellField& f = spec.shell_source();
    dr = f.radial_step();
    dth = kPi / static_cast<double>(f.n_angular());
  } else {
    const CylinderField& f = spec.cylinder_source();
    dr = f.base_length / static_cast<double>(f.n_x());
    dth = f.height / static_cast<double>(f.n_y());
  }
  const double len = domain_length(spec);
  const double fscale =
      is_radial_domain(spec.kind) ? inf_norm(spec.shell_source().value)
                                  : inf_norm(spec.cylinder_source().value);
  return opts.c_tol * (dr * dr + dth * dth) * std::max(fscale, 1e-30) * len * len;
}

ComparisonReport run_shell_comparison(const RobinProblemSpec& spec,
                                      const HarnessOptions& opts) {
  if (spec.kind != DomainKind::annulus2d && spec.kind != DomainKind::shell3d_axisym)
    throw std::invalid_argument("run_shell_comparison: wrong domain kind");
  return run_radial(spec, opts, /*ball_conclusions=*/false);
}

ComparisonReport run_ball_comparison(const RobinProblemSpec& spec,
                                     const HarnessOptions& opts) {
  if (spec.kind != DomainKind::disk2d && spec.kind != DomainKind::ball3d_axisym)
    throw std::invalid_argument("run_ball_comparison: wrong domain kind");
  return run_radial(spec, opts, /*ball_conclusions=*/true);
}

ComparisonReport run_cylinder_comparison(const RobinProblemSpec& spec,
                                         const HarnessOptions& opts) {
  if (spec.kind != DomainKind::cylinder_rect)
    throw std::invalid_argument("run_cylinder_comparison: wrong domain kind");
  ComparisonReport rep;
  rep.domain = spec.kind;
  rep.alpha_inner = spec.alpha_inner;
  rep.alpha_outer = spec.alpha_outer;
  const CylinderField& f = spec.cylinder_source();
  rep.n_radial = f.n_x();
  rep.n_angular = f.n_y();
  rep.dr = f.base_length / static_cast<double>(f.n_x());
  rep.dtheta = f.height / static_cast<double>(f.n_y());
  rep.source_inf_norm = inf_norm(f.value);
  rep.tolerance = tolerance_for(spec, opts);

  const SolveResult su = solve(spec);
  RobinProblemSpec spec_v = spec;
  spec_v.source = y_rearrange(f);
  const SolveResult sv = solve(spec_v);
  const CylinderField& u = su.cylinder();
  const CylinderField& v = sv.cylinder();
  rep.interior_residual_u = su.interior_residual;
  rep.interior_residual_v = sv.interior_residual;
  rep.boundary_residual_u = su.boundary_residual;
  rep.boundary_residual_v = sv.boundary_residual;

  const CylinderField ustar = star_y(u);
  const CylinderField jv = j_y(v);
  rep.violation_profile.assign(u.n_x(), 0.0);
  double worst = -1e300;
  for (std::size_t i = 0; i < u.n_x(); ++i) {
    double row = -1e300;
    for (std::size_t j = 0; j < u.n_y(); ++j)
      row = std::max(row, ustar.at(i, j) - jv.at(i, j));
    rep.violation_profile[i] = row;
    worst = std::max(worst, row);
  }
  rep.max_violation = worst;

  double fmin = f.value.empty() ? 0.0 : f.value[0];
  for (double x : f.value) fmin = std::min(fmin, x);
  // per-column means agree for every alpha >= 0, so the corollary applies
  // with the means-equal hypothesis throughout
  const SliceAggregates agg = aggregate_slices(
      u.n_x(),
      [&](std::size_t i) {
        return std::pair<WeightedSamples, WeightedSamples>(column_samples(u, i),
                                                           column_samples(v, i));
      },
      /*require_increasing=*/false, /*means_equal_regime=*/true,
      /*nonneg_source=*/false, opts, rep.tolerance);
  rep.convex = agg.convex;
  rep.lp = agg.lp;
  rep.mean_equality_defect = check_equal_slice_means(u, v);
  rep.v_symmetrization_defect = check_v_symmetrized(v);

  double sub_tol = 0.0, commut_tol = 0.0;
  if (opts.with_subharmonicity) {
    rep.subharmonicity_margin = check_subharmonicity_weak(spec, su, opts);
    sub_tol = rep.tolerance;
  }
  if (opts.with_commutativity) {
    rep.commutativity_defect = check_commutativity(spec.kind, f.base_length,
                                                   f.height, f.n_x(), f.n_y());
    commut_tol = opts.c_tol * (rep.dr * rep.dr + rep.dtheta * rep.dtheta);
  }
  assemble_verdict(rep, sub_tol, commut_tol, false);
  return rep;
}

ComparisonReport run_comparison(const RobinProblemSpec& spec,
                                const HarnessOptions& opts) {
  switch (spec.kind) {
    case DomainKind::annulus2d:
    case DomainKind::shell3d_axisym:
      return run_shell_comparison(spec, opts);
    case DomainKind::disk2d:
    case DomainKind::ball3d_axisym:
      return run_ball_comparison(spec, opts);
    case DomainKind::cylinder_rect:
      return run_cylinder_comparison(spec, opts);
  }
  throw std::invalid_argument("run_comparison: unknown domain");
}

double check_equal_slice_means(const ShellField& u, const ShellField& v,
                               DomainKind kind, double alpha_inner,
                               double alpha_outer) {
  const bool shell =
      (kind == DomainKind::annulus2d || kind == DomainKind::shell3d_axisym);
  if (shell && (alpha_inner > 0.0 || alpha_outer > 0.0))
    throw std::invalid_argument("hypothesis unmet");
  double worst = 0.0;
  for (std::size_t i = 0; i < u.n_radial(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < u.n_angular(); ++j)
      d += u.grid->weight[j] * (u.at(i, j) - v.at(i, j));
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

double check_equal_slice_means(const CylinderField& u, const CylinderField& v) {
  const double dy = u.height / static_cast<double>(u.n_y());
  double worst = 0.0;
  for (std::size_t i = 0; i < u.n_x(); ++i) {
    double d = 0.0;
    for (std::size_t j = 0; j < u.n_y(); ++j) d += dy * (u.at(i, j) - v.at(i, j));
    worst = std::max(worst, std::abs(d));
  }
  return worst;
}

FluxDiagnostics check_flux_constancy(const ShellField& u, const ShellField& v) {
  const std::size_t nr = u.n_radial();
  const double dr = u.radial_step();
  const int nm1 = u.dim() - 1;
  std::vector<double> psi(nr, 0.0);
  for (std::size_t i = 0; i < nr; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < u.n_angular(); ++j)
      s += u.grid->weight[j] * (u.at(i, j) - v.at(i, j));
    psi[i] = s;
  }
  FluxDiagnostics out;
  double lo = 1e300, hi = -1e300;
  for (std::size_t i = 0; i + 1 < nr; ++i) {
    const double rf = u.radius[i] + dr / 2.0;
    double face = (psi[i + 1] - psi[i]) / dr;
    for (int p = 0; p < nm1; ++p) face *= rf;
    lo = std::min(lo, face);
    hi = std::max(hi, face);
    out.k1 = std::max(out.k1, std::abs(face));
  }
  out.defect = hi - lo;
  return out;
}

double check_v_symmetrized(const ShellField& v) {
  const ShellField vs = cap_symmetrize(v);
  double worst = 0.0;
  for (std::size_t idx = 0; idx < v.value.size(); ++idx)
    worst = std::max(worst, std::abs(v.value[idx] - vs.value[idx]));
  return worst;
}

double check_v_symmetrized(const CylinderField& v) {
  const CylinderField vs = y_rearrange(v);
  double worst = 0.0;
  for (std::size_t idx = 0; idx < v.value.size(); ++idx)
    worst = std::max(worst, std::abs(v.value[idx] - vs.value[idx]));
  return worst;
}

double check_commutativity(DomainKind kind, double geom_a, double geom_b,
                           std::size_t n_radial, std::size_t n_angular) {
  if (kind == DomainKind::cylinder_rect) {
    const double lx = geom_a, ly = geom_b;  // lengths, not radii
    const std::size_t nx = n_radial, ny = n_angular;
    CylinderField u = CylinderField::zeros(lx, ly, nx, ny);
    CylinderField lap = u;
    const double kx = kPi / lx, ky = kPi / ly;
    for (std::size_t i = 0; i < nx; ++i)
      for (std::size_t j = 0; j < ny; ++j) {
        const double val = std::cos(kx * u.x[i]) * std::cos(ky * u.y[j]);
        u.at(i, j) = val;
        lap.at(i, j) = -(kx * kx + ky * ky) * val;  // Delta of the probe
      }
    const CylinderField ju = j_y(u);
    const CylinderField jlap = j_y(lap);
    const double dx = lx / static_cast<double>(nx);
    const double dy = ly / static_cast<double>(ny);
    // Delta(Ju) with 5-point differences on the boundary-node grid; Ju = 0
    // at y = 0
    double worst = 0.0, scale = 0.0;
    for (double val : jlap.value) scale = std::max(scale, std::abs(val));
    for (std::size_t i = 1; i + 1 < nx; ++i)
      for (std::size_t j = 0; j + 1 < ny; ++j) {
        const double below = (j == 0) ? 0.0 : ju.at(i, j - 1);
        const double lap_ju =
            (ju.at(i + 1, j) - 2.0 * ju.at(i, j) + ju.at(i - 1, j)) / (dx * dx) +
            (ju.at(i, j + 1) - 2.0 * ju.at(i, j) + below) / (dy * dy);
        worst = std::max(worst, std::abs(jlap.at(i, j) - lap_ju));
      }
    return worst / std::max(scale, 1e-30);
  }

  const int dim =
      (kind == DomainKind::annulus2d || kind == DomainKind::disk2d) ? 2 : 3;
  auto grid = (dim == 2) ? SphereGrid::circle(n_angular)
                         : SphereGrid::sphere_gauss(n_angular);
  ShellField u = ShellField::zeros(geom_a, geom_b, n_radial, grid);
  ShellField lap = u;
  for (std::size_t i = 0; i < n_radial; ++i) {
    const double r = u.radius[i];
    for (std::size_t j = 0; j < u.n_angular(); ++j) {
      const double c = std::cos(grid->polar[j]);
      u.at(i, j) = r * r * c;
      // Delta(r^2 cos) = 3 cos (n=2) or 4 cos (n=3), by direct computation
      lap.at(i, j) = (dim == 2 ? 3.0 : 4.0) * c;
    }
  }
  const std::vector<double> thetas = uniform_theta_grid(fd_theta_count(*grid));
  const PolarRectField ju = j_operator_smooth(u, thetas);
  const PolarRectField jlap = j_operator_smooth(lap, thetas);
  const PolarRectField dsju = delta_star_apply(ju, dim);
  // balls/disks: evaluate away from the center, as in the shell exhaustion
  const double rmin = (geom_a > 0.0) ? geom_a : 0.2 * geom_b;
  double worst = 0.0, scale = 0.0;
  for (double val : jlap.value) scale = std::max(scale, std::abs(val));
  for (std::size_t i = 1; i + 1 < ju.n_radial(); ++i) {
    if (ju.radius[i] < rmin) continue;
    for (std::size_t k = 1; k + 1 < ju.n_theta(); ++k)
      worst = std::max(worst, std::abs(jlap.at(i, k) - dsju.at(i, k)));
  }
  return worst / std::max(scale, 1e-30);
}

PolarRectField violation_field(const RobinProblemSpec& spec) {
  if (is_radial_domain(spec.kind)) {
    const ShellField& f = spec.shell_source();
    const SolveResult su = solve(spec);
    RobinProblemSpec spec_v = spec;
    spec_v.source = cap_symmetrize(f);
    const SolveResult sv = solve(spec_v);
    const std::vector<double> thetas = cap_boundary_thetas(*f.grid);
    PolarRectField out = star_shell(su.shell(), thetas);
    const PolarRectField jv = j_operator(sv.shell(), thetas);
    for (std::size_t idx = 0; idx < out.value.size(); ++idx)
      out.value[idx] -= jv.value[idx];
    return out;
  }
  const CylinderField& f = spec.cylinder_source();
  const SolveResult su = solve(spec);
  RobinProblemSpec spec_v = spec;
  spec_v.source = y_rearrange(f);
  const SolveResult sv = solve(spec_v);
  const CylinderField ustar = star_y(su.cylinder());
  const CylinderField jv = j_y(sv.cylinder());
  PolarRectField out;
  out.radius = ustar.x;
  out.theta = ustar.y;
  out.value = ustar.value;
  for (std::size_t idx = 0; idx < out.value.size(); ++idx)
    out.value[idx] -= jv.value[idx];
  return out;
}

double check_subharmonicity_weak(const RobinProblemSpec& spec,
                                 const SolveResult& solved,
                                 const HarnessOptions& opts) {
  if (is_radial_domain(spec.kind)) {
    const ShellField& f = spec.shell_source();
    const ShellField& u = solved.shell();
    const int dim = f.dim();
    const std::size_t nt = fd_theta_count(*f.grid);
    const std::vector<double> thetas = uniform_theta_grid(nt);
    const PolarRectField ustar = star_shell_smooth(u, thetas);
    const PolarRectField fstar = star_shell_smooth(f, thetas);
    const double dr = f.radial_step();
    const double dth = kPi / static_cast<double>(nt);

    const double a = f.inner_radius, b = f.outer_radius;
    const double r_lo = (a > 0.0) ? a : 0.2 * b;  // keep bumps off the center
    // A fixed compact family: placements independent of the grid so the
    // margins measure one weak-inequality family at O(h^2) accuracy, and
    // clear of the poles where the adjoint's csc^2(theta) coefficient grows.
    const double r_margin = std::max(3.0 * dr, 0.02 * (b - r_lo));
    const double t_margin = std::max(3.0 * dth, 0.05 * kPi);
    double worst = -1e300;
    const std::size_t npl = opts.bump_placements_per_axis;
    for (double frac : opts.bump_width_fractions) {
      const double wr = frac * (b - r_lo);
      const double wt = frac * kPi;
      for (std::size_t pr = 0; pr < npl; ++pr) {
        for (std::size_t pt = 0; pt < npl; ++pt) {
          const double cr_lo = r_lo + r_margin + wr;
          const double cr_hi = b - r_margin - wr;
          const double ct_lo = t_margin + wt;
          const double ct_hi = kPi - t_margin - wt;
          if (cr_hi <= cr_lo || ct_hi <= ct_lo) continue;  // bank too wide here
          const double cr = cr_lo + (cr_hi - cr_lo) * static_cast<double>(pr) /
                                        static_cast<double>(npl - 1);
          const double ct = ct_lo + (ct_hi - ct_lo) * static_cast<double>(pt) /
                                        static_cast<double>(npl - 1);
          PolarRectField g;
          g.radius = ustar.radius;
          g.theta = ustar.theta;
          g.value.assign(g.radius.size() * g.theta.size(), 0.0);
          double gnorm = 0.0;
          for (std::size_t i = 0; i < g.radius.size(); ++i)
            for (std::size_t k = 0; k < g.theta.size(); ++k) {
              const double val =
                  bump((g.radius[i] - cr) / wr) * bump((g.theta[k] - ct) / wt);
              g.at(i, k) = val;
              gnorm += val * dr * dth;
            }
          if (gnorm <= 0.0) continue;
          const PolarRectField adj = delta_star_adjoint_apply(g, dim);
          double lhs = 0.0, rhs = 0.0;
          for (std::size_t i = 0; i < g.radius.size(); ++i)
            for (std::size_t k = 0; k < g.theta.size(); ++k) {
              lhs -= ustar.at(i, k) * adj.at(i, k) * dr * dth;
              rhs += fstar.at(i, k) * g.at(i, k) * dr * dth;
            }
          worst = std::max(worst, (lhs - rhs) / gnorm);
        }
      }
    }
    return worst;
  }

  const CylinderField& f = spec.cylinder_source();
  const CylinderField& u = solved.cylinder();
  const CylinderField ustar = star_y(u);  // y-nodes at boundaries dy..ell
  const CylinderField fstar = star_y(f);
  const std::size_t nx = f.n_x(), ny = f.n_y();
  const double dx = f.base_length / static_cast<double>(nx);
  const double dy = f.height / static_cast<double>(ny);
  const double x_margin = std::max(3.0 * dx, 0.02 * f.base_length);
  const double y_margin = std::max(3.0 * dy, 0.02 * f.height);
  double worst = -1e300;
  const std::size_t npl = opts.bump_placements_per_axis;
  for (double frac : opts.bump_width_fractions) {
    const double wx = frac * f.base_length;
    const double wy = frac * f.height;
    for (std::size_t px = 0; px < npl; ++px)
      for (std::size_t py = 0; py < npl; ++py) {
        const double cx_lo = x_margin + wx, cx_hi = f.base_length - x_margin - wx;
        const double cy_lo = y_margin + wy, cy_hi = f.height - y_margin - wy;
        if (cx_hi <= cx_lo || cy_hi <= cy_lo) continue;
        const double cx = cx_lo + (cx_hi - cx_lo) * static_cast<double>(px) /
                                      static_cast<double>(npl - 1);
        const double cy = cy_lo + (cy_hi - cy_lo) * static_cast<double>(py) /
                                      static_cast<double>(npl - 1);
        // G on the (x centers) x (y boundaries) grid
        std::vector<double> g(nx * ny, 0.0);
        double gnorm = 0.0;
        for (std::size_t i = 0; i < nx; ++i)
          for (std::size_t j = 0; j < ny; ++j) {
            const double val =
                bump((f.x[i] - cx) / wx) * bump((ustar.y[j] - cy) / wy);
            g[i * ny + j] = val;
            gnorm += val * dx * dy;
          }
        if (gnorm <= 0.0) continue;
        double lhs = 0.0, rhs = 0.0;
        for (std::size_t i = 1; i + 1 < nx; ++i)
          for (std::size_t j = 0; j + 1 < ny; ++j) {
            const double below = (j == 0) ? 0.0 : g[i * ny + j - 1];
            const double lap_g =
                (g[(i + 1) * ny + j] - 2.0 * g[i * ny + j] + g[(i - 1) * ny + j]) /
                    (dx * dx) +
                (g[i * ny + j + 1] - 2.0 * g[i * ny + j] + below) / (dy * dy);
            lhs -= ustar.at(i, j) * lap_g * dx * dy;
            rhs += fstar.at(i, j) * g[i * ny + j] * dx * dy;
          }
        worst = std::max(worst, (lhs - rhs) / gnorm);
      }
  }
  return worst;
}

}  // namespace starcmp
