#ifndef STARCMP_REFERENCE_HPP
#define STARCMP_REFERENCE_HPP

#include <vector>

#include "starcmp/robin_solver.hpp"

// Straightforward serial re-implementations of the hot kernels.  They share
// no tables or loops with the OpenMP paths and exist to cross-check them:
// the parity tests compare outputs, residual_check uses the independent
// stencil, and the benchmark target compares running times.
namespace starcmp::ref {

// direct-summation DFT of one angular row, modes m = 0..M/2
void dft_forward(const std::vector<double>& row, std::vector<double>& re,
                 std::vector<double>& im);

// Laplace-Beltrami of one axisymmetric slice through a freshly built
// Legendre analysis/synthesis pair
void legendre_beltrami(const SphereGrid& grid, const std::vector<double>& slice,
                       std::vector<double>& out);

// canonical discrete Laplacian, plain loops
ShellField apply_laplacian(const RobinProblemSpec& spec, const ShellField& u);
CylinderField apply_laplacian(const RobinProblemSpec& spec, const CylinderField& u);

// per-slice symmetric-decreasing rearrangement, serial
ShellField cap_symmetrize_serial(const ShellField& f);
CylinderField y_rearrange_serial(const CylinderField& f);

}  // namespace starcmp::ref

#endif
