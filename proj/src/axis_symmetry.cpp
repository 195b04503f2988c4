#include "starcmp/axis_symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <stdexcept>

#include "starcmp/parallel.hpp"

namespace starcmp {

CylinderField CylinderField::zeros(double length, double height, std::size_t nx,
                                   std::size_t ny) {
  if (!(length > 0.0) || !(height > 0.0))
    throw std::invalid_argument("CylinderField: need L, ell > 0");
  if (nx == 0 || ny == 0)
    throw std::invalid_argument("CylinderField: empty grid");
  CylinderField f;
  f.base_length = length;
  f.height = height;
  f.x.resize(nx);
  f.y.resize(ny);
  const double dx = length / static_cast<double>(nx);
  const double dy = height / static_cast<double>(ny);
  for (std::size_t i = 0; i < nx; ++i) f.x[i] = (static_cast<double>(i) + 0.5) * dx;
  for (std::size_t j = 0; j < ny; ++j) f.y[j] = (static_cast<double>(j) + 0.5) * dy;
  f.value.assign(nx * ny, 0.0);
  return f;
}

CylinderField y_rearrange(const CylinderField& f) {
  CylinderField out = f;
  const std::size_t ny = f.n_y();
  par::parallel_for(f.n_x(), [&](std::size_t i) {
    double* col = out.column(i);
    std::sort(col, col + ny, std::greater<double>());
  });
  return out;
}

CylinderField j_y(const CylinderField& u) {
  CylinderField out = u;
  const std::size_t ny = u.n_y();
  const double dy = u.height / static_cast<double>(ny);
  for (std::size_t j = 0; j < ny; ++j)
    out.y[j] = static_cast<double>(j + 1) * dy;  // boundary nodes
  par::parallel_for(u.n_x(), [&](std::size_t i) {
    const double* col = u.column(i);
    double* res = out.column(i);
    double acc = 0.0;
    for (std::size_t j = 0; j < ny; ++j) {
      acc += col[j] * dy;
      res[j] = acc;
    }
  });
  return out;
}

CylinderField star_y(const CylinderField& u) { return j_y(y_rearrange(u)); }

}  // namespace starcmp
