#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "starcmp/reference.hpp"
#include "starcmp/robin_solver.hpp"

namespace starcmp {

namespace {
constexpr double kDisagreeTol = 1e-9;

double scale_of(const std::vector<double>& v) {
  double m = 1.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}
}  // namespace

ResidualDiagnostics residual_check(const RobinProblemSpec& spec,
                                   const SolveResult& result) {
  ResidualDiagnostics diag;
  if (is_radial_domain(spec.kind)) {
    if (!std::holds_alternative<ShellField>(result.solution))
      throw std::invalid_argument("grid mismatch");
    const ShellField& f = spec.shell_source();
    const ShellField& u = result.shell();
    if (u.n_radial() != f.n_radial() || u.n_angular() != f.n_angular() ||
        u.inner_radius != f.inner_radius || u.outer_radius != f.outer_radius ||
        u.dim() != f.dim())
      throw std::invalid_argument("grid mismatch");
    const ShellField lap = ref::apply_laplacian(spec, u);
    double worst = 0.0;
    for (std::size_t idx = 0; idx < lap.value.size(); ++idx)
      worst = std::max(worst, std::abs(lap.value[idx] + f.value[idx]));
    diag.interior_residual = worst;
    diag.boundary_residual = detail::boundary_defect_shell(spec, u);
    diag.interior_disagreement = std::abs(worst - result.interior_residual);
    diag.boundary_disagreement =
        std::abs(diag.boundary_residual - result.boundary_residual);
    const double tol = kDisagreeTol * scale_of(f.value);
    diag.pass = diag.interior_disagreement <= tol && diag.boundary_disagreement <= tol;
    return diag;
  }
  if (!std::holds_alternative<CylinderField>(result.solution))
    throw std::invalid_argument("grid mismatch");
  const CylinderField& f = spec.cylinder_source();
  const CylinderField& u = result.cylinder();
  if (u.n_x() != f.n_x() || u.n_y() != f.n_y() ||
      u.base_length != f.base_length || u.height != f.height)
    throw std::invalid_argument("grid mismatch");
  const CylinderField lap = ref::apply_laplacian(spec, u);
  double worst = 0.0;
  for (std::size_t idx = 0; idx < lap.value.size(); ++idx)
    worst = std::max(worst, std::abs(lap.value[idx] + f.value[idx]));
  diag.interior_residual = worst;
  diag.boundary_residual = detail::boundary_defect_cylinder(spec, u);
  diag.interior_disagreement = std::abs(worst - result.interior_residual);
  diag.boundary_disagreement =
      std::abs(diag.boundary_residual - result.boundary_residual);
  const double tol = kDisagreeTol * scale_of(f.value);
  diag.pass = diag.interior_disagreement <= tol && diag.boundary_disagreement <= tol;
  return diag;
}

}  // namespace starcmp
