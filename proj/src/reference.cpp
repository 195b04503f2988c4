#include "starcmp/reference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>

namespace starcmp::ref {

namespace {
constexpr double kPi = 3.14159265358979323846;

double powi(double r, int p) {
  double out = 1.0;
  for (int i = 0; i < p; ++i) out *= r;
  return out;
}
}  // namespace

void dft_forward(const std::vector<double>& row, std::vector<double>& re,
                 std::vector<double>& im) {
  const std::size_t m = row.size();
  const std::size_t h = m / 2;
  re.assign(h + 1, 0.0);
  im.assign(h + 1, 0.0);
  for (std::size_t k = 0; k <= h; ++k) {
    double sr = 0.0, si = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double arg = 2.0 * kPi * static_cast<double>(k) *
                         static_cast<double>(j) / static_cast<double>(m);
      sr += row[j] * std::cos(arg);
      si -= row[j] * std::sin(arg);
    }
    re[k] = sr;
    im[k] = si;
  }
}

void legendre_beltrami(const SphereGrid& grid, const std::vector<double>& slice,
                       std::vector<double>& out) {
  const std::size_t k = grid.size();
  // P_l(x_j) by the three-term recurrence, built locally
  std::vector<double> p(k * k);
  for (std::size_t j = 0; j < k; ++j) {
    const double x = std::cos(grid.angle[j]);
    p[0 * k + j] = 1.0;
    if (k > 1) p[1 * k + j] = x;
    for (std::size_t l = 1; l + 1 < k; ++l) {
      const double dl = static_cast<double>(l);
      p[(l + 1) * k + j] =
          ((2.0 * dl + 1.0) * x * p[l * k + j] - dl * p[(l - 1) * k + j]) / (dl + 1.0);
    }
  }
  std::vector<double> coeff(k, 0.0);
  for (std::size_t l = 0; l < k; ++l) {
    double s = 0.0;
    for (std::size_t j = 0; j < k; ++j)
      s += grid.weight[j] * p[l * k + j] * slice[j];
    coeff[l] = s * (2.0 * static_cast<double>(l) + 1.0) / (4.0 * kPi) *
               (-static_cast<double>(l) * (static_cast<double>(l) + 1.0));
  }
  out.assign(k, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    double s = 0.0;
    for (std::size_t l = 0; l < k; ++l) s += coeff[l] * p[l * k + j];
    out[j] = s;
  }
}

ShellField apply_laplacian(const RobinProblemSpec& spec, const ShellField& u) {
  const std::size_t nr = u.n_radial(), ka = u.n_angular();
  const double a = u.inner_radius, b = u.outer_radius;
  const double dr = u.radial_step();
  const int nm1 = u.dim() - 1;
  ShellField out = ShellField::zeros(a, b, nr, u.grid);
  const double dphi = 2.0 * kPi / static_cast<double>(ka);

  std::vector<double> ang(ka), slice(ka);
  for (std::size_t i = 0; i < nr; ++i) {
    const double r = u.radius[i];
    slice.assign(u.slice(i), u.slice(i) + ka);
    if (u.dim() == 3) {
      legendre_beltrami(*u.grid, slice, ang);
    } else {
      for (std::size_t j = 0; j < ka; ++j) {
        const double up = slice[(j + 1) % ka], dn = slice[(j + ka - 1) % ka];
        ang[j] = (up - 2.0 * slice[j] + dn) / (dphi * dphi);
      }
    }
    for (std::size_t j = 0; j < ka; ++j) {
      double flux_p, flux_m;
      if (i + 1 < nr)
        flux_p = powi(r + dr / 2.0, nm1) * (u.at(i + 1, j) - u.at(i, j)) / dr;
      else
        flux_p = powi(b, nm1) * (-spec.alpha_outer * u.at(i, j) /
                                 (1.0 + spec.alpha_outer * dr / 2.0));
      if (i > 0)
        flux_m = powi(r - dr / 2.0, nm1) * (u.at(i, j) - u.at(i - 1, j)) / dr;
      else if (a > 0.0)
        flux_m = powi(a, nm1) * (spec.alpha_inner * u.at(i, j) /
                                 (1.0 + spec.alpha_inner * dr / 2.0));
      else
        flux_m = 0.0;
      out.at(i, j) = (flux_p - flux_m) / (powi(r, nm1) * dr) + ang[j] / (r * r);
    }
  }
  return out;
}

CylinderField apply_laplacian(const RobinProblemSpec& spec, const CylinderField& u) {
  const std::size_t nx = u.n_x(), ny = u.n_y();
  const double dx = u.base_length / static_cast<double>(nx);
  const double dy = u.height / static_cast<double>(ny);
  CylinderField out = CylinderField::zeros(u.base_length, u.height, nx, ny);
  for (std::size_t i = 0; i < nx; ++i)
    for (std::size_t j = 0; j < ny; ++j) {
      double flux_p, flux_m;
      if (i + 1 < nx)
        flux_p = (u.at(i + 1, j) - u.at(i, j)) / dx;
      else
        flux_p = -spec.alpha_outer * u.at(i, j) / (1.0 + spec.alpha_outer * dx / 2.0);
      if (i > 0)
        flux_m = (u.at(i, j) - u.at(i - 1, j)) / dx;
      else
        flux_m = spec.alpha_inner * u.at(i, j) / (1.0 + spec.alpha_inner * dx / 2.0);
      const double yp = (j + 1 < ny) ? u.at(i, j + 1) : u.at(i, j);
      const double ym = (j > 0) ? u.at(i, j - 1) : u.at(i, j);
      out.at(i, j) = (flux_p - flux_m) / dx + (yp - 2.0 * u.at(i, j) + ym) / (dy * dy);
    }
  return out;
}

ShellField cap_symmetrize_serial(const ShellField& f) {
  ShellField out = f;
  const SphereGrid& g = *f.grid;
  const std::size_t k = g.size();
  std::vector<double> vals(k);
  for (std::size_t i = 0; i < f.n_radial(); ++i) {
    vals.assign(f.slice(i), f.slice(i) + k);
    if (g.uniform_weight) {
      std::sort(vals.begin(), vals.end(), std::greater<double>());
      bool already = true;
      for (std::size_t j = 0; j < k; ++j)
        if (f.at(i, g.cap_order[j]) != vals[j]) { already = false; break; }
      if (already) {
        std::copy(f.slice(i), f.slice(i) + k, out.slice(i));
      } else {
        for (std::size_t j = 0; j < k; ++j) out.at(i, g.cap_order[j]) = vals[j];
      }
    } else {
      // conservative remap, written directly against the profile definition
      std::vector<std::size_t> idx(k);
      std::iota(idx.begin(), idx.end(), std::size_t{0});
      std::stable_sort(idx.begin(), idx.end(), [&](std::size_t p, std::size_t q) {
        return vals[p] > vals[q];
      });
      bool sorted = true;
      for (std::size_t j = 0; j + 1 < k; ++j)
        if (vals[g.cap_order[j]] < vals[g.cap_order[j + 1]]) { sorted = false; break; }
      if (sorted) {
        std::copy(vals.begin(), vals.end(), out.slice(i));
        continue;
      }
      std::vector<double> cuts(k + 1, 0.0), integ(k + 1, 0.0);
      for (std::size_t j = 0; j < k; ++j) {
        cuts[j + 1] = cuts[j] + g.weight[idx[j]];
        integ[j + 1] = integ[j] + vals[idx[j]] * g.weight[idx[j]];
      }
      auto prof = [&](double t) {
        if (t <= 0.0) return 0.0;
        if (t >= cuts[k]) return integ[k];
        std::size_t j = 0;
        while (j + 1 < cuts.size() && cuts[j + 1] <= t) ++j;
        return integ[j] + vals[idx[j]] * (t - cuts[j]);
      };
      for (std::size_t j = 0; j < k; ++j) {
        const double lo = g.cap_boundary[j], hi = g.cap_boundary[j + 1];
        out.at(i, g.cap_order[j]) = (prof(hi) - prof(lo)) / (hi - lo);
      }
    }
  }
  return out;
}

CylinderField y_rearrange_serial(const CylinderField& f) {
  CylinderField out = f;
  for (std::size_t i = 0; i < f.n_x(); ++i) {
    double* col = out.column(i);
    std::sort(col, col + f.n_y(), std::greater<double>());
  }
  return out;
}

}  // namespace starcmp::ref
