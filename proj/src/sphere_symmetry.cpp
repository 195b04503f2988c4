#include "starcmp/sphere_symmetry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "starcmp/gauss_legendre.hpp"
#include "starcmp/parallel.hpp"

namespace starcmp {

namespace {
constexpr double kPi = 3.14159265358979323846;

void finalize_cap_structure(SphereGrid& g) {
  const std::size_t k = g.size();
  g.cap_order.resize(k);
  std::iota(g.cap_order.begin(), g.cap_order.end(), std::size_t{0});
  std::stable_sort(g.cap_order.begin(), g.cap_order.end(),
                   [&](std::size_t a, std::size_t b) { return g.polar[a] < g.polar[b]; });
  g.cap_boundary.assign(k + 1, 0.0);
  for (std::size_t j = 0; j < k; ++j)
    g.cap_boundary[j + 1] = g.cap_boundary[j] + g.weight[g.cap_order[j]];
  g.uniform_weight = std::all_of(g.weight.begin(), g.weight.end(),
                                 [&](double w) { return w == g.weight[0]; });
}

// Cap ordering of the symmetric circle grid, pairs (+phi, -phi) resolved by
// index.  The tie order alternates with the pair rank: a fixed order would
// give rearranged slices a smooth O(h) odd-in-phi component (the two nodes
// of a pair receive adjacent sorted values), which solutions then inherit;
// alternation turns it into a grid-scale oscillation that the solves damp.
void circle_cap_order(SphereGrid& g) {
  const std::size_t m = g.size();
  const std::size_t half = m / 2;
  g.cap_order.clear();
  g.cap_order.reserve(m);
  for (std::size_t k = 0; k < half; ++k) {
    const std::size_t neg = half - 1 - k;
    const std::size_t pos = half + k;
    if (k % 2 == 0) {
      g.cap_order.push_back(pos);
      g.cap_order.push_back(neg);
    } else {
      g.cap_order.push_back(neg);
      g.cap_order.push_back(pos);
    }
  }
  g.cap_boundary.assign(m + 1, 0.0);
  for (std::size_t j = 0; j < m; ++j)
    g.cap_boundary[j + 1] = g.cap_boundary[j] + g.weight[g.cap_order[j]];
  g.uniform_weight = true;
}
}  // namespace

double sphere_measure(int dim) {
  if (dim == 2) return 2.0 * kPi;
  if (dim == 3) return 4.0 * kPi;
  throw std::invalid_argument("sphere_measure: dim must be 2 or 3");
}

double cap_measure(int dim, double theta) {
  theta = std::clamp(theta, 0.0, kPi);
  if (dim == 2) return 2.0 * theta;
  if (dim == 3) return 2.0 * kPi * (1.0 - std::cos(theta));
  throw std::invalid_argument("cap_measure: dim must be 2 or 3");
}

double cap_angle(int dim, double sigma) {
  sigma = std::clamp(sigma, 0.0, sphere_measure(dim));
  if (dim == 2) return sigma / 2.0;
  return std::acos(1.0 - sigma / (2.0 * kPi));
}

std::shared_ptr<const SphereGrid> SphereGrid::circle(std::size_t m) {
  if (m < 4 || m % 2 != 0)
    throw std::invalid_argument("SphereGrid::circle: need even M >= 4");
  auto g = std::make_shared<SphereGrid>();
  g->dim = 2;
  const double dphi = 2.0 * kPi / static_cast<double>(m);
  g->angle.resize(m);
  g->weight.assign(m, dphi);
  g->polar.resize(m);
  for (std::size_t j = 0; j < m; ++j) {
    g->angle[j] = -kPi + (static_cast<double>(j) + 0.5) * dphi;
    // pair rank from the index so +phi and -phi agree bit for bit
    const std::size_t rank = (j < m / 2) ? (m / 2 - 1 - j) : (j - m / 2);
    g->polar[j] = (static_cast<double>(rank) + 0.5) * dphi;
  }
  circle_cap_order(*g);
  return g;
}

std::shared_ptr<const SphereGrid> SphereGrid::sphere_gauss(std::size_t k) {
  if (k < 2) throw std::invalid_argument("SphereGrid::sphere_gauss: need K >= 2");
  auto g = std::make_shared<SphereGrid>();
  g->dim = 3;
  std::vector<double> x, w;
  gauss_legendre(k, x, w);  // ascending x in (-1,1)
  g->angle.resize(k);
  g->weight.resize(k);
  g->polar.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    // theta ascending means x descending
    const std::size_t src = k - 1 - j;
    g->angle[j] = std::acos(x[src]);
    g->weight[j] = 2.0 * kPi * w[src];
    g->polar[j] = g->angle[j];
  }
  finalize_cap_structure(*g);
  return g;
}

std::shared_ptr<const SphereGrid> SphereGrid::sphere_uniform(std::size_t k) {
  if (k < 2) throw std::invalid_argument("SphereGrid::sphere_uniform: need K >= 2");
  auto g = std::make_shared<SphereGrid>();
  g->dim = 3;
  const double dx = 2.0 / static_cast<double>(k);
  g->angle.resize(k);
  g->weight.assign(k, 2.0 * kPi * dx);
  g->polar.resize(k);
  for (std::size_t j = 0; j < k; ++j) {
    const double x = 1.0 - (static_cast<double>(j) + 0.5) * dx;  // theta ascending
    g->angle[j] = std::acos(x);
    g->polar[j] = g->angle[j];
  }
  finalize_cap_structure(*g);
  return g;
}

WeightedSamples to_weighted_samples(const SphereSlice& s) {
  return WeightedSamples::create(s.value, s.grid->weight);
}

void spherical_rearrangement_values(const SphereGrid& grid,
                                    const std::vector<double>& in,
                                    std::vector<double>& out) {
  const std::size_t k = grid.size();
  if (in.size() != k) throw std::invalid_argument("slice size mismatch");
  out.resize(k);

  // already nonincreasing along the cap order: identity (exact idempotence)
  bool sorted = true;
  for (std::size_t j = 0; j + 1 < k; ++j) {
    if (in[grid.cap_order[j]] < in[grid.cap_order[j + 1]]) { sorted = false; break; }
  }
  if (sorted) {
    out = in;
    return;
  }

  if (grid.uniform_weight) {
    // descending sort assigned along the cap order; exact multiset equality
    std::vector<double> v(in);
    std::sort(v.begin(), v.end(), std::greater<double>());
    for (std::size_t j = 0; j < k; ++j) out[grid.cap_order[j]] = v[j];
    return;
  }

  // general weights: conservative remap of the decreasing profile onto the
  // cap-ordered cells (cell value = profile average over the cell)
  std::vector<std::size_t> idx(k);
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return in[a] > in[b]; });
  std::vector<double> cuts(k + 1, 0.0), integ(k + 1, 0.0);
  for (std::size_t j = 0; j < k; ++j) {
    const double w = grid.weight[idx[j]];
    cuts[j + 1] = cuts[j] + w;
    integ[j + 1] = integ[j] + in[idx[j]] * w;
  }
  const auto profile_integral = [&](double t) {
    if (t <= 0.0) return 0.0;
    if (t >= cuts[k]) return integ[k];
    const auto it = std::upper_bound(cuts.begin(), cuts.end(), t);
    const std::size_t j = static_cast<std::size_t>(it - cuts.begin()) - 1;
    return integ[j] + in[idx[j]] * (t - cuts[j]);
  };
  for (std::size_t j = 0; j < k; ++j) {
    const double lo = grid.cap_boundary[j];
    const double hi = grid.cap_boundary[j + 1];
    out[grid.cap_order[j]] = (profile_integral(hi) - profile_integral(lo)) / (hi - lo);
  }
}

SphereSlice spherical_rearrangement(const SphereSlice& s) {
  SphereSlice out;
  out.grid = s.grid;
  spherical_rearrangement_values(*s.grid, s.value, out.value);
  return out;
}

ShellField ShellField::zeros(double a, double b, std::size_t n_radial,
                             std::shared_ptr<const SphereGrid> grid) {
  if (!(a >= 0.0) || !(b > a))
    throw std::invalid_argument("ShellField: need 0 <= a < b");
  if (n_radial == 0) throw std::invalid_argument("ShellField: empty radial grid");
  ShellField f;
  f.inner_radius = a;
  f.outer_radius = b;
  f.grid = std::move(grid);
  f.radius.resize(n_radial);
  const double dr = (b - a) / static_cast<double>(n_radial);
  for (std::size_t i = 0; i < n_radial; ++i)
    f.radius[i] = a + (static_cast<double>(i) + 0.5) * dr;
  f.value.assign(n_radial * f.grid->size(), 0.0);
  return f;
}

ShellField cap_symmetrize(const ShellField& f) {
  ShellField out = f;
  const std::size_t k = f.n_angular();
  par::parallel_for(f.n_radial(), [&](std::size_t i) {
    std::vector<double> in(f.slice(i), f.slice(i) + k), res;
    spherical_rearrangement_values(*f.grid, in, res);
    std::copy(res.begin(), res.end(), out.slice(i));
  });
  return out;
}

PolarRectField j_operator(const ShellField& u, const std::vector<double>& theta_grid) {
  const SphereGrid& g = *u.grid;
  const std::size_t k = g.size();
  PolarRectField out;
  out.radius = u.radius;
  out.theta = theta_grid;
  out.value.assign(u.n_radial() * theta_grid.size(), 0.0);

  // cap measures of the requested angles, clamped into [0, total]
  std::vector<double> tmeas(theta_grid.size());
  for (std::size_t t = 0; t < theta_grid.size(); ++t)
    tmeas[t] = std::min(cap_measure(g.dim, theta_grid[t]), g.total());

  par::parallel_for(u.n_radial(), [&](std::size_t i) {
    const double* slice = u.slice(i);
    // prefix sums along the cap order
    std::vector<double> prefix(k + 1, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      prefix[j + 1] = prefix[j] + slice[g.cap_order[j]] * g.weight[g.cap_order[j]];
    for (std::size_t t = 0; t < theta_grid.size(); ++t) {
      const double s = tmeas[t];
      const auto it = std::upper_bound(g.cap_boundary.begin(), g.cap_boundary.end(), s);
      std::size_t j = static_cast<std::size_t>(it - g.cap_boundary.begin());
      j = (j == 0) ? 0 : j - 1;
      if (j >= k) {
        out.at(i, t) = prefix[k];
      } else {
        out.at(i, t) = prefix[j] + slice[g.cap_order[j]] * (s - g.cap_boundary[j]);
      }
    }
  });
  return out;
}

PolarRectField star_shell(const ShellField& u, const std::vector<double>& theta_grid) {
  return j_operator(cap_symmetrize(u), theta_grid);
}

PolarRectField j_operator_smooth(const ShellField& u,
                                 const std::vector<double>& theta_grid) {
  const SphereGrid& g = *u.grid;
  const std::size_t k = g.size();
  PolarRectField out;
  out.radius = u.radius;
  out.theta = theta_grid;
  out.value.assign(u.n_radial() * theta_grid.size(), 0.0);

  std::vector<double> tmeas(theta_grid.size());
  for (std::size_t t = 0; t < theta_grid.size(); ++t)
    tmeas[t] = std::min(cap_measure(g.dim, theta_grid[t]), g.total());

  par::parallel_for(u.n_radial(), [&](std::size_t i) {
    const double* slice = u.slice(i);
    std::vector<double> prefix(k + 1, 0.0);
    for (std::size_t j = 0; j < k; ++j)
      prefix[j + 1] = prefix[j] + slice[g.cap_order[j]] * g.weight[g.cap_order[j]];
    for (std::size_t t = 0; t < theta_grid.size(); ++t) {
      const double s = tmeas[t];
      const auto it = std::upper_bound(g.cap_boundary.begin(), g.cap_boundary.end(), s);
      std::size_t j = (it == g.cap_boundary.begin())
                          ? 0
                          : static_cast<std::size_t>(it - g.cap_boundary.begin()) - 1;
      if (j >= k) j = k - 1;
      // 4-point Lagrange through boundary prefix values around cell j
      std::size_t j0 = (j == 0) ? 0 : j - 1;
      if (j0 + 3 > k) j0 = k - 3;
      double acc = 0.0;
      for (std::size_t p = 0; p < 4; ++p) {
        double w = 1.0;
        for (std::size_t q = 0; q < 4; ++q) {
          if (q == p) continue;
          w *= (s - g.cap_boundary[j0 + q]) /
               (g.cap_boundary[j0 + p] - g.cap_boundary[j0 + q]);
        }
        acc += w * prefix[j0 + p];
      }
      out.at(i, t) = acc;
    }
  });
  return out;
}

PolarRectField star_shell_smooth(const ShellField& u,
                                 const std::vector<double>& theta_grid) {
  return j_operator_smooth(cap_symmetrize(u), theta_grid);
}

std::vector<double> cap_boundary_thetas(const SphereGrid& grid) {
  std::vector<double> thetas;
  thetas.reserve(grid.size());
  for (std::size_t j = 1; j < grid.size(); ++j)
    thetas.push_back(cap_angle(grid.dim, grid.cap_boundary[j]));
  thetas.push_back(kPi);
  return thetas;
}

namespace {
void require_uniform(const std::vector<double>& axis, const char* what) {
  if (axis.size() < 5) throw std::invalid_argument("grid too small");
  const double h = axis[1] - axis[0];
  for (std::size_t i = 1; i + 1 < axis.size(); ++i)
    if (std::abs((axis[i + 1] - axis[i]) - h) > 1e-9 * std::abs(h))
      throw std::invalid_argument(std::string("nonuniform axis: ") + what);
}
}  // namespace

PolarRectField delta_star_apply(const PolarRectField& f, int dim) {
  require_uniform(f.radius, "radius");
  require_uniform(f.theta, "theta");
  const std::size_t nr = f.n_radial(), nt = f.n_theta();
  const double dr = f.radius[1] - f.radius[0];
  const double dt = f.theta[1] - f.theta[0];
  PolarRectField out;
  out.radius = f.radius;
  out.theta = f.theta;
  out.value.assign(nr * nt, std::numeric_limits<double>::quiet_NaN());
  const double nm1 = static_cast<double>(dim - 1);
  const double nm2 = static_cast<double>(dim - 2);
  par::parallel_for(nr - 2, [&](std::size_t ii) {
    const std::size_t i = ii + 1;
    const double r = f.radius[i];
    for (std::size_t t = 1; t + 1 < nt; ++t) {
      const double frr = (f.at(i + 1, t) - 2.0 * f.at(i, t) + f.at(i - 1, t)) / (dr * dr);
      const double fr = (f.at(i + 1, t) - f.at(i - 1, t)) / (2.0 * dr);
      const double ftt = (f.at(i, t + 1) - 2.0 * f.at(i, t) + f.at(i, t - 1)) / (dt * dt);
      const double ft = (f.at(i, t + 1) - f.at(i, t - 1)) / (2.0 * dt);
      const double cot = std::cos(f.theta[t]) / std::sin(f.theta[t]);
      out.at(i, t) = frr + nm1 / r * fr + (ftt - nm2 * cot * ft) / (r * r);
    }
  });
  return out;
}

PolarRectField delta_star_adjoint_apply(const PolarRectField& g, int dim) {
  require_uniform(g.radius, "radius");
  require_uniform(g.theta, "theta");
  const std::size_t nr = g.n_radial(), nt = g.n_theta();
  for (std::size_t i = 0; i < nr; ++i)
    for (std::size_t t = 0; t < nt; ++t)
      if ((i < 2 || i >= nr - 2 || t < 2 || t >= nt - 2) && g.at(i, t) != 0.0)
        throw std::invalid_argument("support touches margin");
  const double dr = g.radius[1] - g.radius[0];
  const double dt = g.theta[1] - g.theta[0];
  PolarRectField out;
  out.radius = g.radius;
  out.theta = g.theta;
  out.value.assign(nr * nt, 0.0);
  const double nm1 = static_cast<double>(dim - 1);
  const double nm2 = static_cast<double>(dim - 2);
  par::parallel_for(nr - 2, [&](std::size_t ii) {
    const std::size_t i = ii + 1;
    const double r = g.radius[i];
    for (std::size_t t = 1; t + 1 < nt; ++t) {
      const double grr = (g.at(i + 1, t) - 2.0 * g.at(i, t) + g.at(i - 1, t)) / (dr * dr);
      const double gr = (g.at(i + 1, t) - g.at(i - 1, t)) / (2.0 * dr);
      const double gtt = (g.at(i, t + 1) - 2.0 * g.at(i, t) + g.at(i, t - 1)) / (dt * dt);
      const double gt = (g.at(i, t + 1) - g.at(i, t - 1)) / (2.0 * dt);
      const double st = std::sin(g.theta[t]);
      const double cot = std::cos(g.theta[t]) / st;
      out.at(i, t) = grr - nm1 / r * gr + nm1 / (r * r) * g.at(i, t) +
                     (gtt + nm2 * cot * gt - nm2 / (st * st) * g.at(i, t)) / (r * r);
    }
  });
  return out;
}

}  // namespace starcmp
