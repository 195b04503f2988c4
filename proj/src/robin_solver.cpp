#include "starcmp/robin_solver.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <stdexcept>

#include "starcmp/gauss_legendre.hpp"
#include "starcmp/parallel.hpp"
#include "starcmp/rng.hpp"
#include "starcmp/tridiag.hpp"

namespace starcmp {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kNeumannMeanTolRel = 1e-10;

double ipow(double r, int p) {
  double out = 1.0;
  for (int i = 0; i < p; ++i) out *= r;
  return out;
}

// ---------------------------------------------------------------------------
// angular/axial transforms

// complex DFT over the angular index, modes m = 0..M/2 (real input)
struct FourierPlan {
  std::size_t m_count;  // M
  std::size_t half;     // M/2
  std::vector<double> cos_t, sin_t;  // (half+1) x M tables

  explicit FourierPlan(std::size_t m) : m_count(m), half(m / 2) {
    cos_t.resize((half + 1) * m);
    sin_t.resize((half + 1) * m);
    for (std::size_t k = 0; k <= half; ++k)
      for (std::size_t j = 0; j < m; ++j) {
        const double arg = 2.0 * kPi * static_cast<double>(k * j % m) /
                           static_cast<double>(m);
        cos_t[k * m + j] = std::cos(arg);
        sin_t[k * m + j] = std::sin(arg);
      }
  }

  void forward(const double* row, double* re, double* im) const {
    for (std::size_t k = 0; k <= half; ++k) {
      const double* c = &cos_t[k * m_count];
      const double* s = &sin_t[k * m_count];
      double sr = 0.0, si = 0.0;
      for (std::size_t j = 0; j < m_count; ++j) {
        sr += row[j] * c[j];
        si -= row[j] * s[j];
      }
      re[k] = sr;
      im[k] = si;
    }
  }

  void inverse(const double* re, const double* im, double* row) const {
    const double inv = 1.0 / static_cast<double>(m_count);
    for (std::size_t j = 0; j < m_count; ++j) {
      double s = re[0];
      for (std::size_t k = 1; k < half; ++k)
        s += 2.0 * (re[k] * cos_t[k * m_count + j] - im[k] * sin_t[k * m_count + j]);
      s += re[half] * cos_t[half * m_count + j] - im[half] * sin_t[half * m_count + j];
      row[j] = s * inv;
    }
  }

  // eigenvalue of -D_phiphi (periodic 3-point) for mode k
  double eigenvalue(std::size_t k, double dphi) const {
    return (2.0 - 2.0 * std::cos(2.0 * kPi * static_cast<double>(k) /
                                 static_cast<double>(m_count))) /
           (dphi * dphi);
  }
};

// Legendre transform on the grid's Gauss-Legendre nodes (theta-ascending)
struct LegendrePlan {
  std::size_t k_count;
  std::vector<double> p;      // p[l*K + j] = P_l(x_j)
  std::vector<double> anal;   // anal[l*K + j] = (2l+1)/(4pi) * w_j * P_l(x_j)

  explicit LegendrePlan(const SphereGrid& grid) : k_count(grid.size()) {
    p.resize(k_count * k_count);
    anal.resize(k_count * k_count);
    std::vector<double> row(k_count);
    for (std::size_t j = 0; j < k_count; ++j) {
      const double x = std::cos(grid.angle[j]);
      legendre_row(x, k_count - 1, row.data());
      for (std::size_t l = 0; l < k_count; ++l) {
        p[l * k_count + j] = row[l];
        anal[l * k_count + j] = (2.0 * static_cast<double>(l) + 1.0) /
                                (4.0 * kPi) * grid.weight[j] * row[l];
      }
    }
  }

  void forward(const double* row, double* coeff) const {
    for (std::size_t l = 0; l < k_count; ++l) {
      const double* a = &anal[l * k_count];
      double s = 0.0;
      for (std::size_t j = 0; j < k_count; ++j) s += a[j] * row[j];
      coeff[l] = s;
    }
  }

  void inverse(const double* coeff, double* row) const {
    for (std::size_t j = 0; j < k_count; ++j) {
      double s = 0.0;
      for (std::size_t l = 0; l < k_count; ++l) s += coeff[l] * p[l * k_count + j];
      row[j] = s;
    }
  }

  // angular Laplace-Beltrami of one slice: sum_l -l(l+1) c_l P_l
  void apply_beltrami(const double* row, double* out) const {
    std::vector<double> c(k_count);
    forward(row, c.data());
    for (std::size_t l = 0; l < k_count; ++l)
      c[l] *= -static_cast<double>(l) * (static_cast<double>(l) + 1.0);
    inverse(c.data(), out);
  }
};

// DCT-II/III pair diagonalizing the 3-point second difference with
// even-reflection (Neumann) closures on a cell-centered grid
struct CosinePlan {
  std::size_t m_count;
  std::vector<double> psi;  // psi[k*M + j] = cos(pi k (j+1/2) / M)

  explicit CosinePlan(std::size_t m) : m_count(m) {
    psi.resize(m * m);
    for (std::size_t k = 0; k < m; ++k)
      for (std::size_t j = 0; j < m; ++j)
        psi[k * m + j] = std::cos(kPi * static_cast<double>(k) *
                                  (static_cast<double>(j) + 0.5) /
                                  static_cast<double>(m));
  }

  void forward(const double* col, double* coeff) const {
    for (std::size_t k = 0; k < m_count; ++k) {
      const double* ps = &psi[k * m_count];
      double s = 0.0;
      for (std::size_t j = 0; j < m_count; ++j) s += col[j] * ps[j];
      coeff[k] = s * ((k == 0) ? 1.0 : 2.0) / static_cast<double>(m_count);
    }
  }

  void inverse(const double* coeff, double* col) const {
    for (std::size_t j = 0; j < m_count; ++j) {
      double s = coeff[0];
      for (std::size_t k = 1; k < m_count; ++k) s += coeff[k] * psi[k * m_count + j];
      col[j] = s;
    }
  }

  double eigenvalue(std::size_t k, double dy) const {
    return (2.0 - 2.0 * std::cos(kPi * static_cast<double>(k) /
                                 static_cast<double>(m_count))) /
           (dy * dy);
  }
};

// ---------------------------------------------------------------------------
// radial / axial one-dimensional systems

struct RadialSystem {
  std::vector<double> lower, diag, upper;
};

// Conservative discretization of r^{1-n} d/dr (r^{n-1} du/dr) - shift(r) u on
// a cell-centered grid with Robin flux closures (nm1 = n-1; nm1 = 0 is the
// cylinder x-direction without the 1/r^2 scaling of the shift).
RadialSystem build_radial_system(double a, double b, std::size_t n, int nm1,
                                 double alpha_in, double alpha_out, double lambda,
                                 bool radial_shift) {
  RadialSystem sys;
  sys.lower.assign(n, 0.0);
  sys.diag.assign(n, 0.0);
  sys.upper.assign(n, 0.0);
  const double dr = (b - a) / static_cast<double>(n);
  const bool inner_is_boundary = (nm1 == 0) || (a > 0.0);
  for (std::size_t i = 0; i < n; ++i) {
    const double r = a + (static_cast<double>(i) + 0.5) * dr;
    const double fp_r = ipow(r, nm1);
    const double fp_p = ipow(r + dr / 2.0, nm1);
    const double fp_m = ipow(r - dr / 2.0, nm1);
    const double shift = lambda * (radial_shift ? 1.0 / (r * r) : 1.0);
    double d = -shift;
    if (i + 1 < n) {
      sys.upper[i] = fp_p / (fp_r * dr * dr);
      d -= fp_p / (fp_r * dr * dr);
    } else {
      d -= ipow(b, nm1) * alpha_out / ((1.0 + alpha_out * dr / 2.0) * fp_r * dr);
      d -= fp_m / (fp_r * dr * dr);
      sys.lower[i] = fp_m / (fp_r * dr * dr);
      sys.diag[i] = d;
      continue;
    }
    if (i > 0) {
      sys.lower[i] = fp_m / (fp_r * dr * dr);
      d -= fp_m / (fp_r * dr * dr);
    } else if (inner_is_boundary) {
      d -= ipow(a, nm1) * alpha_in / ((1.0 + alpha_in * dr / 2.0) * fp_r * dr);
    }
    sys.diag[i] = d;
  }
  return sys;
}

std::vector<double> radial_weights(double a, double b, std::size_t n, int nm1) {
  std::vector<double> w(n);
  const double dr = (b - a) / static_cast<double>(n);
  for (std::size_t i = 0; i < n; ++i)
    w[i] = ipow(a + (static_cast<double>(i) + 0.5) * dr, nm1) * dr;
  return w;
}

// ---------------------------------------------------------------------------

int radial_nm1(const ShellField& f) { return f.dim() - 1; }

void check_neumann_compatibility(double integral, double abs_integral) {
  if (std::abs(integral) > kNeumannMeanTolRel * std::max(abs_integral, 1e-300))
    throw std::invalid_argument("Neumann compatibility violated");
}

ShellField solve_shell(const RobinProblemSpec& spec) {
  const ShellField& f = spec.shell_source();
  const std::size_t nr = f.n_radial();
  const std::size_t ka = f.n_angular();
  const double a = f.inner_radius, b = f.outer_radius;
  const int nm1 = radial_nm1(f);
  ShellField u = ShellField::zeros(a, b, nr, f.grid);

  const auto rw = radial_weights(a, b, nr, nm1);
  const bool singular = spec.all_neumann();

  if (f.dim() == 2) {
    const FourierPlan plan(ka);
    const double dphi = 2.0 * kPi / static_cast<double>(ka);
    const std::size_t h = plan.half;
    std::vector<double> re(nr * (h + 1)), im(nr * (h + 1));
    par::parallel_for(nr, [&](std::size_t i) {
      plan.forward(f.slice(i), &re[i * (h + 1)], &im[i * (h + 1)]);
    });
    par::parallel_for(h + 1, [&](std::size_t m) {
      const double lam = plan.eigenvalue(m, dphi);
      const RadialSystem sys = build_radial_system(
          a, b, nr, nm1, spec.alpha_inner, spec.alpha_outer, lam, true);
      std::vector<double> rr(nr), ri(nr);
      for (std::size_t i = 0; i < nr; ++i) {
        rr[i] = -re[i * (h + 1) + m];
        ri[i] = -im[i * (h + 1) + m];
      }
      if (singular && m == 0) {
        solve_tridiag_bordered(sys.lower, sys.diag, sys.upper, rw, rr);
        solve_tridiag_bordered(sys.lower, sys.diag, sys.upper, rw, ri);
      } else {
        solve_tridiag(sys.lower, sys.diag, sys.upper, rr);
        solve_tridiag(sys.lower, sys.diag, sys.upper, ri);
      }
      for (std::size_t i = 0; i < nr; ++i) {
        re[i * (h + 1) + m] = rr[i];
        im[i * (h + 1) + m] = ri[i];
      }
    });
    par::parallel_for(nr, [&](std::size_t i) {
      plan.inverse(&re[i * (h + 1)], &im[i * (h + 1)], u.slice(i));
    });
  } else {
    const LegendrePlan plan(*f.grid);
    std::vector<double> coeff(nr * ka);
    par::parallel_for(nr, [&](std::size_t i) {
      plan.forward(f.slice(i), &coeff[i * ka]);
    });
    par::parallel_for(ka, [&](std::size_t l) {
      const double lam = static_cast<double>(l) * (static_cast<double>(l) + 1.0);
      const RadialSystem sys = build_radial_system(
          a, b, nr, nm1, spec.alpha_inner, spec.alpha_outer, lam, true);
      std::vector<double> rhs(nr);
      for (std::size_t i = 0; i < nr; ++i) rhs[i] = -coeff[i * ka + l];
      if (singular && l == 0)
        solve_tridiag_bordered(sys.lower, sys.diag, sys.upper, rw, rhs);
      else
        solve_tridiag(sys.lower, sys.diag, sys.upper, rhs);
      for (std::size_t i = 0; i < nr; ++i) coeff[i * ka + l] = rhs[i];
    });
    par::parallel_for(nr, [&](std::size_t i) {
      plan.inverse(&coeff[i * ka], u.slice(i));
    });
  }
  return u;
}

CylinderField solve_cylinder(const RobinProblemSpec& spec) {
  const CylinderField& f = spec.cylinder_source();
  const std::size_t nx = f.n_x(), ny = f.n_y();
  CylinderField u = CylinderField::zeros(f.base_length, f.height, nx, ny);
  const CosinePlan plan(ny);
  const double dy = f.height / static_cast<double>(ny);
  const bool singular = spec.all_neumann();
  const std::vector<double> xw(nx, f.base_length / static_cast<double>(nx));

  std::vector<double> coeff(nx * ny);
  par::parallel_for(nx, [&](std::size_t i) {
    plan.forward(f.column(i), &coeff[i * ny]);
  });
  par::parallel_for(ny, [&](std::size_t k) {
    const double lam = plan.eigenvalue(k, dy);
    const RadialSystem sys =
        build_radial_system(0.0, f.base_length, nx, 0, spec.alpha_inner,
                            spec.alpha_outer, lam, false);
    std::vector<double> rhs(nx);
    for (std::size_t i = 0; i < nx; ++i) rhs[i] = -coeff[i * ny + k];
    if (singular && k == 0)
      solve_tridiag_bordered(sys.lower, sys.diag, sys.upper, xw, rhs);
    else
      solve_tridiag(sys.lower, sys.diag, sys.upper, rhs);
    for (std::size_t i = 0; i < nx; ++i) coeff[i * ny + k] = rhs[i];
  });
  par::parallel_for(nx, [&](std::size_t i) {
    plan.inverse(&coeff[i * ny], u.column(i));
  });
  return u;
}

}  // namespace

const char* to_string(DomainKind k) {
  switch (k) {
    case DomainKind::annulus2d: return "annulus2d";
    case DomainKind::disk2d: return "disk2d";
    case DomainKind::shell3d_axisym: return "shell3d_axisym";
    case DomainKind::ball3d_axisym: return "ball3d_axisym";
    case DomainKind::cylinder_rect: return "cylinder_rect";
  }
  return "unknown";
}

DomainKind domain_from_string(const std::string& s) {
  if (s == "annulus2d") return DomainKind::annulus2d;
  if (s == "disk2d") return DomainKind::disk2d;
  if (s == "shell3d_axisym") return DomainKind::shell3d_axisym;
  if (s == "ball3d_axisym") return DomainKind::ball3d_axisym;
  if (s == "cylinder_rect") return DomainKind::cylinder_rect;
  throw std::invalid_argument("unknown domain kind: " + s);
}

bool is_radial_domain(DomainKind k) { return k != DomainKind::cylinder_rect; }

void RobinProblemSpec::validate() const {
  if (alpha_inner < 0.0 || alpha_outer < 0.0)
    throw std::invalid_argument("alpha must be nonnegative");
  if (all_neumann() && !zero_mean_normalization)
    throw std::invalid_argument(
        "zero_mean_normalization must be set when all alphas are zero");
  if (!all_neumann() && zero_mean_normalization)
    throw std::invalid_argument(
        "zero_mean_normalization applies only when all alphas are zero");
  if (is_radial_domain(kind)) {
    if (!std::holds_alternative<ShellField>(source))
      throw std::invalid_argument("radial domain requires a shell source");
    const ShellField& f = shell_source();
    const bool wants_ball = (kind == DomainKind::disk2d || kind == DomainKind::ball3d_axisym);
    const int wants_dim = (kind == DomainKind::annulus2d || kind == DomainKind::disk2d) ? 2 : 3;
    if (f.dim() != wants_dim)
      throw std::invalid_argument("source grid dimension does not match the domain");
    if (wants_ball && f.inner_radius != 0.0)
      throw std::invalid_argument("ball/disk source must have inner radius 0");
    if (!wants_ball && !(f.inner_radius > 0.0))
      throw std::invalid_argument("annulus/shell source must have inner radius > 0");
    if (wants_ball && alpha_inner != 0.0)
      throw std::invalid_argument("ball/disk domains have a single Robin boundary");
    if (f.n_radial() < 3) throw std::invalid_argument("radial grid too small");
  } else {
    if (!std::holds_alternative<CylinderField>(source))
      throw std::invalid_argument("cylinder domain requires a cylinder source");
    if (cylinder_source().n_x() < 3 || cylinder_source().n_y() < 3)
      throw std::invalid_argument("cylinder grid too small");
  }
  for (double v : is_radial_domain(kind) ? shell_source().value
                                         : cylinder_source().value)
    if (!std::isfinite(v))
      throw std::invalid_argument("source values must be finite");
}

double domain_volume(const ShellField& f) {
  const auto rw = radial_weights(f.inner_radius, f.outer_radius, f.n_radial(),
                                 radial_nm1(f));
  double vol = 0.0;
  for (double w : rw) vol += w;
  return vol * f.grid->total();
}

double domain_volume(const CylinderField& f) {
  return f.base_length * f.height;
}

double weighted_mean(const ShellField& f) {
  const auto rw = radial_weights(f.inner_radius, f.outer_radius, f.n_radial(),
                                 radial_nm1(f));
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < f.n_radial(); ++i) {
    const double* s = f.slice(i);
    double slice_sum = 0.0, wsum = 0.0;
    for (std::size_t j = 0; j < f.n_angular(); ++j) {
      slice_sum += s[j] * f.grid->weight[j];
      wsum += f.grid->weight[j];
    }
    num += rw[i] * slice_sum;
    den += rw[i] * wsum;
  }
  return num / den;
}

double weighted_mean(const CylinderField& f) {
  double s = 0.0;
  for (double v : f.value) s += v;
  return s / static_cast<double>(f.value.size());
}

ShellField normalize_zero_mean(const ShellField& f) {
  ShellField out = f;
  for (int pass = 0; pass < 2; ++pass) {
    const double mu = weighted_mean(out);
    for (double& v : out.value) v -= mu;
  }
  return out;
}

CylinderField normalize_zero_mean(const CylinderField& f) {
  CylinderField out = f;
  for (int pass = 0; pass < 2; ++pass) {
    const double mu = weighted_mean(out);
    for (double& v : out.value) v -= mu;
  }
  return out;
}

ShellField apply_discrete_laplacian(const RobinProblemSpec& spec, const ShellField& u) {
  const std::size_t nr = u.n_radial(), ka = u.n_angular();
  const double a = u.inner_radius, b = u.outer_radius;
  const double dr = u.radial_step();
  const int nm1 = radial_nm1(u);
  const bool inner_is_boundary = a > 0.0;
  ShellField out = ShellField::zeros(a, b, nr, u.grid);

  const LegendrePlan* lplan = nullptr;
  std::unique_ptr<LegendrePlan> lholder;
  if (u.dim() == 3) {
    lholder = std::make_unique<LegendrePlan>(*u.grid);
    lplan = lholder.get();
  }
  const double dphi = 2.0 * kPi / static_cast<double>(ka);

  par::parallel_for(nr, [&](std::size_t i) {
    const double r = u.radius[i];
    const double fp_r = ipow(r, nm1);
    const double fp_p = ipow(r + dr / 2.0, nm1);
    const double fp_m = ipow(r - dr / 2.0, nm1);
    std::vector<double> ang(ka);
    if (u.dim() == 3) {
      lplan->apply_beltrami(u.slice(i), ang.data());
    } else {
      const double* s = u.slice(i);
      for (std::size_t j = 0; j < ka; ++j) {
        const double up = s[(j + 1) % ka], dn = s[(j + ka - 1) % ka];
        ang[j] = (up - 2.0 * s[j] + dn) / (dphi * dphi);
      }
    }
    for (std::size_t j = 0; j < ka; ++j) {
      double flux_p, flux_m;
      if (i + 1 < nr)
        flux_p = fp_p * (u.at(i + 1, j) - u.at(i, j)) / dr;
      else
        flux_p = ipow(b, nm1) *
                 (-spec.alpha_outer * u.at(i, j) / (1.0 + spec.alpha_outer * dr / 2.0));
      if (i > 0)
        flux_m = fp_m * (u.at(i, j) - u.at(i - 1, j)) / dr;
      else if (inner_is_boundary)
        flux_m = ipow(a, nm1) *
                 (spec.alpha_inner * u.at(i, j) / (1.0 + spec.alpha_inner * dr / 2.0));
      else
        flux_m = 0.0;
      out.at(i, j) = (flux_p - flux_m) / (fp_r * dr) + ang[j] / (r * r);
    }
  });
  return out;
}

CylinderField apply_discrete_laplacian(const RobinProblemSpec& spec,
                                       const CylinderField& u) {
  const std::size_t nx = u.n_x(), ny = u.n_y();
  const double dx = u.base_length / static_cast<double>(nx);
  const double dy = u.height / static_cast<double>(ny);
  CylinderField out = CylinderField::zeros(u.base_length, u.height, nx, ny);
  par::parallel_for(nx, [&](std::size_t i) {
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
      const double xpart = (flux_p - flux_m) / dx;
      const double yp = (j + 1 < ny) ? u.at(i, j + 1) : u.at(i, j);  // even reflection
      const double ym = (j > 0) ? u.at(i, j - 1) : u.at(i, j);
      out.at(i, j) = xpart + (yp - 2.0 * u.at(i, j) + ym) / (dy * dy);
    }
  });
  return out;
}

namespace detail {

double boundary_defect_shell(const RobinProblemSpec& spec, const ShellField& u) {
  const std::size_t nr = u.n_radial(), ka = u.n_angular();
  const double dr = u.radial_step();
  double worst = 0.0;
  for (std::size_t j = 0; j < ka; ++j) {
    const double uo = u.slice(nr - 1)[j];
    const double go = uo * (1.0 - spec.alpha_outer * dr / 2.0) /
                      (1.0 + spec.alpha_outer * dr / 2.0);
    worst = std::max(worst, std::abs((go - uo) / dr + spec.alpha_outer * (go + uo) / 2.0));
    if (u.inner_radius > 0.0) {
      const double ui = u.slice(0)[j];
      const double gi = ui * (1.0 - spec.alpha_inner * dr / 2.0) /
                        (1.0 + spec.alpha_inner * dr / 2.0);
      worst = std::max(worst, std::abs(-(ui - gi) / dr + spec.alpha_inner * (gi + ui) / 2.0));
    }
  }
  return worst;
}

double boundary_defect_cylinder(const RobinProblemSpec& spec, const CylinderField& u) {
  const std::size_t nx = u.n_x(), ny = u.n_y();
  const double dx = u.base_length / static_cast<double>(nx);
  double worst = 0.0;
  for (std::size_t j = 0; j < ny; ++j) {
    const double u0 = u.at(0, j);
    const double g0 = u0 * (1.0 - spec.alpha_inner * dx / 2.0) /
                      (1.0 + spec.alpha_inner * dx / 2.0);
    worst = std::max(worst, std::abs(-(u0 - g0) / dx + spec.alpha_inner * (g0 + u0) / 2.0));
    const double u1 = u.at(nx - 1, j);
    const double g1 = u1 * (1.0 - spec.alpha_outer * dx / 2.0) /
                      (1.0 + spec.alpha_outer * dx / 2.0);
    worst = std::max(worst, std::abs((g1 - u1) / dx + spec.alpha_outer * (g1 + u1) / 2.0));
  }
  // top/bottom Neumann by even reflection: defect identically zero
  return worst;
}

}  // namespace detail

SolveResult solve(const RobinProblemSpec& spec) {
  spec.validate();
  SolveResult res;
  if (is_radial_domain(spec.kind)) {
    const ShellField& f = spec.shell_source();
    if (spec.all_neumann()) {
      double integral = 0.0, abs_integral = 0.0;
      const auto rw = radial_weights(f.inner_radius, f.outer_radius, f.n_radial(),
                                     radial_nm1(f));
      for (std::size_t i = 0; i < f.n_radial(); ++i)
        for (std::size_t j = 0; j < f.n_angular(); ++j) {
          const double w = rw[i] * f.grid->weight[j];
          integral += w * f.slice(i)[j];
          abs_integral += w * std::abs(f.slice(i)[j]);
        }
      check_neumann_compatibility(integral, abs_integral);
    }
    ShellField u = solve_shell(spec);
    if (spec.zero_mean_normalization) u = normalize_zero_mean(u);
    const ShellField lap = apply_discrete_laplacian(spec, u);
    double worst = 0.0;
    for (std::size_t idx = 0; idx < lap.value.size(); ++idx)
      worst = std::max(worst, std::abs(lap.value[idx] + f.value[idx]));
    res.interior_residual = worst;
    res.boundary_residual = detail::boundary_defect_shell(spec, u);
    res.mean = weighted_mean(u);
    res.solution = std::move(u);
  } else {
    const CylinderField& f = spec.cylinder_source();
    if (spec.all_neumann()) {
      double integral = 0.0, abs_integral = 0.0;
      for (double v : f.value) {
        integral += v;
        abs_integral += std::abs(v);
      }
      check_neumann_compatibility(integral, abs_integral);
    }
    CylinderField u = solve_cylinder(spec);
    if (spec.zero_mean_normalization) u = normalize_zero_mean(u);
    const CylinderField lap = apply_discrete_laplacian(spec, u);
    double worst = 0.0;
    for (std::size_t idx = 0; idx < lap.value.size(); ++idx)
      worst = std::max(worst, std::abs(lap.value[idx] + f.value[idx]));
    res.interior_residual = worst;
    res.boundary_residual = detail::boundary_defect_cylinder(spec, u);
    res.mean = weighted_mean(u);
    res.solution = std::move(u);
  }
  return res;
}

double stability_probe(const RobinProblemSpec& spec, double perturbation_scale,
                       std::uint64_t seed) {
  if (perturbation_scale == 0.0) return 0.0;
  const SolveResult base = solve(spec);
  RobinProblemSpec pert = spec;

  Xoshiro256pp rng(seed);
  // smooth low-mode perturbation, coefficients independent of the grid
  double c[4][4];
  for (auto& rowc : c)
    for (double& cc : rowc) cc = rng.uniform_pm1();

  if (is_radial_domain(spec.kind)) {
    ShellField df = spec.shell_source();
    const double a = df.inner_radius, b = df.outer_radius;
    for (std::size_t i = 0; i < df.n_radial(); ++i)
      for (std::size_t j = 0; j < df.n_angular(); ++j) {
        const double s = (df.radius[i] - a) / (b - a);
        const double t = std::cos(df.grid->polar[j]);
        double v = 0.0;
        for (int q = 0; q < 4; ++q)
          for (int m = 0; m < 4; ++m)
            v += c[q][m] * std::cos(q * kPi * s) * std::cos(m * std::acos(t));
        df.slice(i)[j] = v;
      }
    if (spec.all_neumann()) df = normalize_zero_mean(df);
    ShellField fp = spec.shell_source();
    for (std::size_t idx = 0; idx < fp.value.size(); ++idx)
      fp.value[idx] += perturbation_scale * df.value[idx];
    pert.source = fp;

    const SolveResult other = solve(pert);
    const ShellField& u0 = base.shell();
    const ShellField& u1 = other.shell();
    const auto rw = radial_weights(a, b, u0.n_radial(), radial_nm1(u0));
    double l2_df = 0.0, h1 = 0.0;
    const double dr = u0.radial_step();
    for (std::size_t i = 0; i < u0.n_radial(); ++i)
      for (std::size_t j = 0; j < u0.n_angular(); ++j) {
        const double w = rw[i] * u0.grid->weight[j];
        const double d = u1.slice(i)[j] - u0.slice(i)[j];
        l2_df += w * perturbation_scale * df.slice(i)[j] * perturbation_scale *
                 df.slice(i)[j];
        h1 += w * d * d;
        if (i + 1 < u0.n_radial()) {
          const double g = (u1.slice(i + 1)[j] - u0.slice(i + 1)[j] - d) / dr;
          h1 += w * g * g;
        }
        const std::size_t jn = (j + 1) % u0.n_angular();
        double darc = u0.radius[i] * std::abs(u0.grid->polar[jn] - u0.grid->polar[j]);
        if (u0.dim() == 2 && jn == 0) darc = 0.0;  // skip the wrap cell
        if (darc > 0.0) {
          const double g = (u1.slice(i)[jn] - u0.slice(i)[jn] - d) / darc;
          h1 += w * g * g;
        }
      }
    return std::sqrt(h1) / std::sqrt(l2_df);
  }

  CylinderField df = spec.cylinder_source();
  for (std::size_t i = 0; i < df.n_x(); ++i)
    for (std::size_t j = 0; j < df.n_y(); ++j) {
      const double s = df.x[i] / df.base_length;
      const double t = df.y[j] / df.height;
      double v = 0.0;
      for (int q = 0; q < 4; ++q)
        for (int m = 0; m < 4; ++m)
          v += c[q][m] * std::cos(q * kPi * s) * std::cos(m * kPi * t);
      df.at(i, j) = v;
    }
  if (spec.all_neumann()) df = normalize_zero_mean(df);
  CylinderField fp = spec.cylinder_source();
  for (std::size_t idx = 0; idx < fp.value.size(); ++idx)
    fp.value[idx] += perturbation_scale * df.value[idx];
  pert.source = fp;
  const SolveResult other = solve(pert);
  const CylinderField& u0 = base.cylinder();
  const CylinderField& u1 = other.cylinder();
  const double dx = u0.base_length / static_cast<double>(u0.n_x());
  const double dy = u0.height / static_cast<double>(u0.n_y());
  double l2_df = 0.0, h1 = 0.0;
  for (std::size_t i = 0; i < u0.n_x(); ++i)
    for (std::size_t j = 0; j < u0.n_y(); ++j) {
      const double w = dx * dy;
      const double d = u1.at(i, j) - u0.at(i, j);
      l2_df += w * perturbation_scale * df.at(i, j) * perturbation_scale * df.at(i, j);
      h1 += w * d * d;
      if (i + 1 < u0.n_x()) {
        const double g = (u1.at(i + 1, j) - u0.at(i + 1, j) - d) / dx;
        h1 += w * g * g;
      }
      if (j + 1 < u0.n_y()) {
        const double g = (u1.at(i, j + 1) - u0.at(i, j + 1) - d) / dy;
        h1 += w * g * g;
      }
    }
  return std::sqrt(h1) / std::sqrt(l2_df);
}

}  // namespace starcmp
