#include "starcmp/gauss_legendre.hpp"

#include <cmath>
#include <stdexcept>

namespace starcmp {

void gauss_legendre(std::size_t n, std::vector<double>& x, std::vector<double>& w) {
  if (n == 0) throw std::invalid_argument("gauss_legendre: n must be positive");
  x.assign(n, 0.0);
  w.assign(n, 0.0);
  const double eps = 1e-15;
  const std::size_t m = (n + 1) / 2;
  for (std::size_t i = 1; i <= m; ++i) {
    double z = std::cos(3.14159265358979323846 *
                        (static_cast<double>(i) - 0.25) /
                        (static_cast<double>(n) + 0.5));
    double z1, pp;
    int guard = 0;
    do {
      double p1 = 1.0, p2 = 0.0;
      for (std::size_t j = 1; j <= n; ++j) {
        const double p3 = p2;
        p2 = p1;
        const double dj = static_cast<double>(j);
        p1 = ((2.0 * dj - 1.0) * z * p2 - (dj - 1.0) * p3) / dj;
      }
      pp = static_cast<double>(n) * (z * p1 - p2) / (z * z - 1.0);
      z1 = z;
      z = z1 - p1 / pp;
    } while (std::abs(z - z1) > eps && ++guard < 100);
    x[i - 1] = -z;
    x[n - i] = z;
    w[i - 1] = 2.0 / ((1.0 - z * z) * pp * pp);
    w[n - i] = w[i - 1];
  }
}

void legendre_row(double x, std::size_t lmax, double* out) {
  out[0] = 1.0;
  if (lmax == 0) return;
  out[1] = x;
  for (std::size_t l = 1; l < lmax; ++l) {
    const double dl = static_cast<double>(l);
    out[l + 1] = ((2.0 * dl + 1.0) * x * out[l] - dl * out[l - 1]) / (dl + 1.0);
  }
}

}  // namespace starcmp
