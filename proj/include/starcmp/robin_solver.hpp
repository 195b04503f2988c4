#ifndef STARCMP_ROBIN_SOLVER_HPP
#define STARCMP_ROBIN_SOLVER_HPP

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "starcmp/axis_symmetry.hpp"
#include "starcmp/sphere_symmetry.hpp"

namespace starcmp {

enum class DomainKind {
  annulus2d,
  disk2d,
  shell3d_axisym,
  ball3d_axisym,
  cylinder_rect,
};

const char* to_string(DomainKind k);
DomainKind domain_from_string(const std::string& s);
bool is_radial_domain(DomainKind k);

// -Delta u = f with homogeneous Robin data du/dnu + alpha u = 0.
// Radial domains carry the source as a ShellField (inner_radius = 0 flags
// the disk/ball variants; alpha_inner is then unused and must be 0).  The
// cylinder carries a CylinderField: alpha_inner/alpha_outer act on the
// lateral faces x = 0 and x = L, the top and bottom faces are Neumann.
struct RobinProblemSpec {
  DomainKind kind = DomainKind::annulus2d;
  double alpha_inner = 0.0;
  double alpha_outer = 0.0;
  // Required true when all alphas vanish (pure Neumann): the compatible
  // singular system is solved with a zero-mean constraint.  Must be false
  // otherwise (the Robin solution is unique and may not be shifted).
  bool zero_mean_normalization = false;
  std::variant<ShellField, CylinderField> source;

  const ShellField& shell_source() const { return std::get<ShellField>(source); }
  const CylinderField& cylinder_source() const { return std::get<CylinderField>(source); }
  bool all_neumann() const { return alpha_inner == 0.0 && alpha_outer == 0.0; }

  void validate() const;  // throws std::invalid_argument
};

struct SolveResult {
  std::variant<ShellField, CylinderField> solution;
  double interior_residual = 0.0;  // max |Delta_h u + f| over all cells
  double boundary_residual = 0.0;  // max Robin defect at boundary ghosts
  double mean = 0.0;               // volume-weighted mean of u

  const ShellField& shell() const { return std::get<ShellField>(solution); }
  const CylinderField& cylinder() const { return std::get<CylinderField>(solution); }
};

// Direct solve: the angular/axial transform (DFT for n=2, Legendre on shared
// Gauss-Legendre nodes for n=3, DCT-II for the cylinder) exactly
// diagonalizes the canonical discrete Laplacian, and each mode reduces to a
// tridiagonal boundary-value problem with Robin closures (bordered by the
// zero-mean constraint for the singular all-Neumann mode).
SolveResult solve(const RobinProblemSpec& spec);

struct ResidualDiagnostics {
  double interior_residual = 0.0;       // recomputed independently
  double boundary_residual = 0.0;
  double interior_disagreement = 0.0;   // |recomputed - stored|
  double boundary_disagreement = 0.0;
  bool pass = false;                    // disagreements <= 1e-9 * scale
};

// A-posteriori certificate: reapplies the discrete operator with an
// independently coded stencil and compares against the stored residuals.
ResidualDiagnostics residual_check(const RobinProblemSpec& spec,
                                   const SolveResult& result);

// Volume quadrature weight of cell (i,j): r^{n-1} dr dsigma, or dx dy.
double domain_volume(const ShellField& f);
double domain_volume(const CylinderField& f);
double weighted_mean(const ShellField& f);
double weighted_mean(const CylinderField& f);

// Subtracts the volume-weighted mean; the result has |mean| <= 1e-13 * ||f||inf.
ShellField normalize_zero_mean(const ShellField& f);
CylinderField normalize_zero_mean(const CylinderField& f);

// Solves with f and with f + scale * (seeded smooth perturbation), returning
// ||u - u_pert||_{H1,discrete} / ||scale * df||_{L2,discrete}; bounded under
// grid refinement by continuous dependence on the data.
double stability_probe(const RobinProblemSpec& spec, double perturbation_scale,
                       std::uint64_t seed = 42);

// Canonical discrete Laplacian used by the solver and the residuals (exact
// for the solve up to roundoff).  Exposed for the structural-identity checks.
ShellField apply_discrete_laplacian(const RobinProblemSpec& spec, const ShellField& u);
CylinderField apply_discrete_laplacian(const RobinProblemSpec& spec, const CylinderField& u);

namespace detail {
// max |Robin ghost defect| over boundary nodes, shared by solve and
// residual_check
double boundary_defect_shell(const RobinProblemSpec& spec, const ShellField& u);
double boundary_defect_cylinder(const RobinProblemSpec& spec, const CylinderField& u);
}  // namespace detail

}  // namespace starcmp

#endif
