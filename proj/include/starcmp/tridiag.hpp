#ifndef STARCMP_TRIDIAG_HPP
#define STARCMP_TRIDIAG_HPP

#include <cstddef>
#include <vector>

namespace starcmp {

// Thomas algorithm, no pivoting.  All radial systems assembled by the solver
// are irreducibly diagonally dominant, which keeps this stable.
// lower[0] and upper[n-1] are ignored.
void solve_tridiag(const std::vector<double>& lower,
                   const std::vector<double>& diag,
                   const std::vector<double>& upper,
                   std::vector<double>& rhs_to_solution);

// Bordered system for the singular all-Neumann zero mode:
//   [ A   e ] [u]   [g]
//   [ w^T 0 ] [s] = [0]
// with A tridiagonal (nullspace = constants), e the all-ones column and w a
// positive weight vector implementing the zero-mean normalization.  Solved by
// arrow elimination in O(n); the leading principal part of A is nonsingular,
// so the elimination never meets a vanishing pivot before the border closes
// the system.
void solve_tridiag_bordered(const std::vector<double>& lower,
                            const std::vector<double>& diag,
                            const std::vector<double>& upper,
                            const std::vector<double>& mean_weights,
                            std::vector<double>& rhs_to_solution);

}  // namespace starcmp

#endif
