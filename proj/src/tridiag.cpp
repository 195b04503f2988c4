#include "starcmp/tridiag.hpp"

#include <cmath>
#include <stdexcept>

namespace starcmp {

void solve_tridiag(const std::vector<double>& lower,
                   const std::vector<double>& diag,
                   const std::vector<double>& upper,
                   std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  if (n == 0 || lower.size() != n || upper.size() != n || rhs.size() != n)
    throw std::invalid_argument("solve_tridiag: size mismatch");

  std::vector<double> c(n), d(n);
  c[0] = upper[0] / diag[0];
  d[0] = rhs[0] / diag[0];
  for (std::size_t i = 1; i < n; ++i) {
    const double m = diag[i] - lower[i] * c[i - 1];
    c[i] = upper[i] / m;
    d[i] = (rhs[i] - lower[i] * d[i - 1]) / m;
  }
  rhs[n - 1] = d[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = d[i] - c[i] * rhs[i + 1];
}

void solve_tridiag_bordered(const std::vector<double>& lower,
                            const std::vector<double>& diag,
                            const std::vector<double>& upper,
                            const std::vector<double>& w,
                            std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  if (n < 2 || lower.size() != n || upper.size() != n || w.size() != n ||
      rhs.size() != n)
    throw std::invalid_argument("solve_tridiag_bordered: size mismatch");

  // Augmented unknowns: u[0..n-1], s.  Eliminate column i from row i+1 and
  // from the border row; the border column (all ones) picks up fill that we
  // carry in bc[i] (row i's coefficient on s) and in the border row itself.
  std::vector<double> di(diag), up(upper), bc(n, 1.0), r(rhs);
  std::vector<double> brow(w);  // border row coefficients on u
  double bs = 0.0;              // border row coefficient on s
  double br = 0.0;              // border row rhs

  for (std::size_t i = 0; i + 1 < n; ++i) {
    const double p = di[i];
    if (p == 0.0) throw std::runtime_error("solve_tridiag_bordered: zero pivot");
    // row i+1
    const double m1 = lower[i + 1] / p;
    di[i + 1] -= m1 * up[i];
    bc[i + 1] -= m1 * bc[i];
    r[i + 1] -= m1 * r[i];
    // border row
    const double m2 = brow[i] / p;
    brow[i + 1] -= m2 * up[i];
    bs -= m2 * bc[i];
    br -= m2 * r[i];
    brow[i] = 0.0;
  }
  // Closing 2x2 block in (u[n-1], s).  For the singular Neumann mode the
  // (n-1,n-1) entry has been eliminated to roundoff; the border column keeps
  // the block well conditioned, so solve it directly by Cramer.
  const double det = di[n - 1] * bs - bc[n - 1] * brow[n - 1];
  if (det == 0.0) throw std::runtime_error("solve_tridiag_bordered: singular border");
  const double u_last = (r[n - 1] * bs - bc[n - 1] * br) / det;
  const double s = (di[n - 1] * br - brow[n - 1] * r[n - 1]) / det;

  // back substitution
  rhs[n - 1] = u_last;
  for (std::size_t i = n - 1; i-- > 0;)
    rhs[i] = (r[i] - bc[i] * s - up[i] * rhs[i + 1]) / di[i];
}

}  // namespace starcmp
