#ifndef STARCMP_AXIS_SYMMETRY_HPP
#define STARCMP_AXIS_SYMMETRY_HPP

#include <cstddef>
#include <vector>

namespace starcmp {

// Grid functions on the rectangle cylinder (0,L) x (0,ell).  Source and
// solution fields live on cell-centered nodes in both directions; the
// cumulative operators j_y/star_y return fields whose y-nodes are the cell
// boundaries dy, 2dy, ..., ell.
struct CylinderField {
  double base_length = 1.0;   // L
  double height = 1.0;        // ell
  std::vector<double> x;      // ascending
  std::vector<double> y;      // ascending
  std::vector<double> value;  // x-major: value[i*y.size() + j]

  std::size_t n_x() const { return x.size(); }
  std::size_t n_y() const { return y.size(); }
  double& at(std::size_t i, std::size_t j) { return value[i * y.size() + j]; }
  double at(std::size_t i, std::size_t j) const { return value[i * y.size() + j]; }
  double* column(std::size_t i) { return value.data() + i * y.size(); }
  const double* column(std::size_t i) const { return value.data() + i * y.size(); }

  static CylinderField zeros(double length, double height, std::size_t nx,
                             std::size_t ny);
};

// Decreasing rearrangement of every column f(x_i, .) (descending sort,
// uniform cell weight ell/M); exact multiset equality per column.
CylinderField y_rearrange(const CylinderField& f);

// Per-column prefix quadrature Ju(x, j dy) = sum_{m<j} u(x, y_m) dy, returned
// on boundary y-nodes; Ju(x, ell) is the full column integral.
CylinderField j_y(const CylinderField& u);

// star function in the y-direction: j_y(y_rearrange(u))
CylinderField star_y(const CylinderField& u);

}  // namespace starcmp

#endif
