#ifndef STARCMP_GAUSS_LEGENDRE_HPP
#define STARCMP_GAUSS_LEGENDRE_HPP

#include <cstddef>
#include <vector>

namespace starcmp {

// Gauss-Legendre nodes (ascending, in (-1,1)) and weights on [-1,1] by
// Newton iteration on the Legendre recurrence.
void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w);

// Legendre polynomials P_0..P_{lmax} at point x via the three-term
// recurrence; out has size lmax+1.
void legendre_row(double x, std::size_t lmax, double* out);

}  // namespace starcmp

#endif
