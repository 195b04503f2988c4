#ifndef STARCMP_SPHERE_SYMMETRY_HPP
#define STARCMP_SPHERE_SYMMETRY_HPP

#include <memory>
#include <vector>

#include "starcmp/measure_core.hpp"

namespace starcmp {

// sigma(K(theta)): surface measure of the polar cap of radius theta on
// S^{n-1}; 2*theta for n=2, 2*pi*(1-cos theta) for n=3.
double cap_measure(int dim, double theta);
// inverse of cap_measure in theta
double cap_angle(int dim, double sigma);
// total measure of S^{n-1}: 2*pi (n=2) or 4*pi (n=3)
double sphere_measure(int dim);

// Angular discretization of S^{n-1} shared by the symmetrization machinery
// and the solvers.  Nodes are cells of the cap-measure coordinate: cell j in
// cap order occupies [cap_boundary[j], cap_boundary[j+1]].
struct SphereGrid {
  int dim = 2;
  std::vector<double> angle;             // phi in (-pi,pi) for n=2, theta for n=3
  std::vector<double> weight;            // sigma-measure of each node cell
  std::vector<double> polar;             // polar distance theta of each node
  std::vector<std::size_t> cap_order;    // node indices by increasing theta
  std::vector<double> cap_boundary;      // size()+1 cumulative weights, cap order
  bool uniform_weight = false;

  std::size_t size() const { return angle.size(); }
  double total() const { return cap_boundary.back(); }

  // n=2: M uniform cells centered at phi_j = -pi + (j+1/2) 2pi/M (M even)
  static std::shared_ptr<const SphereGrid> circle(std::size_t m);
  // n=3 axisymmetric: K Gauss-Legendre nodes in x = cos(theta)
  static std::shared_ptr<const SphereGrid> sphere_gauss(std::size_t k);
  // n=3 axisymmetric: K midpoint cells uniform in x = cos(theta)
  static std::shared_ptr<const SphereGrid> sphere_uniform(std::size_t k);
};

// A function sampled on a sphere grid (a single radial slice).
struct SphereSlice {
  std::shared_ptr<const SphereGrid> grid;
  std::vector<double> value;
};

WeightedSamples to_weighted_samples(const SphereSlice& s);

// Symmetric-decreasing rearrangement about e1: the decreasing profile of the
// slice is remapped conservatively onto the cap-ordered cells, so cumulative
// cap integrals of the output coincide with the star function at every cell
// boundary.  On uniform-weight grids this is exactly the descending sort in
// cap order (multiset preserved); a slice already nonincreasing in cap order
// is returned unchanged, making the operation idempotent bit for bit.
SphereSlice spherical_rearrangement(const SphereSlice& s);

// kernel form used by field-level symmetrization
void spherical_rearrangement_values(const SphereGrid& grid,
                                    const std::vector<double>& in,
                                    std::vector<double>& out);

// Grid functions on a shell A(a,b) (inner_radius = 0 flags a ball) sampled on
// cell-centered radii r_i = a + (i+1/2)(b-a)/N, one sphere slice per radius.
struct ShellField {
  double inner_radius = 0.0;
  double outer_radius = 1.0;
  std::shared_ptr<const SphereGrid> grid;
  std::vector<double> radius;   // cell-centered, ascending
  std::vector<double> value;    // radius-major: value[i*K + j]

  std::size_t n_radial() const { return radius.size(); }
  std::size_t n_angular() const { return grid ? grid->size() : 0; }
  double radial_step() const {
    return (outer_radius - inner_radius) / static_cast<double>(radius.size());
  }
  int dim() const { return grid ? grid->dim : 2; }

  static ShellField zeros(double a, double b, std::size_t n_radial,
                          std::shared_ptr<const SphereGrid> grid);
  double* slice(std::size_t i) { return value.data() + i * n_angular(); }
  const double* slice(std::size_t i) const { return value.data() + i * n_angular(); }
  double& at(std::size_t i, std::size_t j) { return value[i * n_angular() + j]; }
  double at(std::size_t i, std::size_t j) const { return value[i * n_angular() + j]; }
};

// Functions on the polar rectangle (a,b) x (0,pi).
struct PolarRectField {
  std::vector<double> radius;
  std::vector<double> theta;
  std::vector<double> value;    // radius-major

  std::size_t n_radial() const { return radius.size(); }
  std::size_t n_theta() const { return theta.size(); }
  double& at(std::size_t i, std::size_t k) { return value[i * theta.size() + k]; }
  double at(std::size_t i, std::size_t k) const { return value[i * theta.size() + k]; }
};

// Per-slice spherical rearrangement at every radius; ball center convention
// f#(0) = f(0) is vacuous on cell-centered grids (no node sits at r = 0).
ShellField cap_symmetrize(const ShellField& f);

// Cumulative cap quadrature Ju(r,theta) = int_{K(theta)} u(r xi) dsigma with
// proportional splitting of the cell containing sigma(K(theta)); exact at
// cap-cell boundaries and Ju(r,pi) equals the full-sphere integral.
PolarRectField j_operator(const ShellField& u, const std::vector<double>& theta_grid);

// u* = J(u#); at cap-cell boundaries this equals the measure_core star
// profile of each slice evaluated at sigma(K(theta)).
PolarRectField star_shell(const ShellField& u, const std::vector<double>& theta_grid);

// J evaluated through a local cubic in cap measure through the exact
// cell-boundary prefix values.  The proportional-splitting reading is
// piecewise linear with cell-scale kinks, so its second differences do not
// converge; finite-difference checks (commutativity, weak subharmonicity)
// need this smooth variant.  Values at cell boundaries are unchanged.
PolarRectField j_operator_smooth(const ShellField& u,
                                 const std::vector<double>& theta_grid);
PolarRectField star_shell_smooth(const ShellField& u,
                                 const std::vector<double>& theta_grid);

// Canonical theta grid: cap angles of the interior cell boundaries plus pi.
std::vector<double> cap_boundary_thetas(const SphereGrid& grid);

// Second-order centered finite differences for
//   Delta* F = F_rr + (n-1)/r F_r + r^{-2} [F_tt - (n-2) cot(theta) F_t]
// at interior nodes of a uniformly spaced polar rectangle; the boundary ring
// is left as NaN.  Requires >= 5 nodes per axis.
PolarRectField delta_star_apply(const PolarRectField& f, int dim);

// Formal adjoint under dr dtheta,
//   Delta*t G = G_rr - (n-1)/r G_r + r^{-2}(n-1) G
//             + r^{-2} [G_tt + (n-2) cot(theta) G_t - (n-2) csc^2(theta) G],
// for G vanishing on a two-node margin (throws otherwise).
PolarRectField delta_star_adjoint_apply(const PolarRectField& g, int dim);

}  // namespace starcmp

#endif
