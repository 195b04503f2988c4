// Timing comparison of the OpenMP kernels against their serial reference
// implementations.  Outputs one line per kernel; the parity of the results
// themselves is asserted in tests/test_reference_parity.cpp.

#include <chrono>
#include <cstdio>
#include <vector>

#include "starcmp/parallel.hpp"
#include "starcmp/reference.hpp"
#include "starcmp/robin_solver.hpp"
#include "starcmp/scenario.hpp"

using clock_type = std::chrono::steady_clock;

namespace {

double ms_since(clock_type::time_point t0) {
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count();
}

template <class F>
double time_best_of(int reps, F&& fn) {
  double best = 1e300;
  for (int r = 0; r < reps; ++r) {
    const auto t0 = clock_type::now();
    fn();
    best = std::min(best, ms_since(t0));
  }
  return best;
}

}  // namespace

int main() {
  using namespace starcmp;
  std::printf("threads available: %d\n", par::max_threads());
  std::printf("%-28s %12s %12s %12s\n", "kernel", "omp [ms]", "serial [ms]",
              "reference [ms]");

  ScenarioSpec sc;
  sc.id = "bench";
  sc.domain = DomainKind::annulus2d;
  sc.alpha1 = 1.0;
  sc.alpha2 = 2.0;
  sc.n_radial = 128;
  sc.n_angular = 256;
  sc.source.seed = 7;
  const RobinProblemSpec spec = make_problem(sc);
  const ShellField& f = spec.shell_source();

  {
    ShellField out = f;
    const double t_omp = time_best_of(5, [&] {
      par::set_enabled(true);
      out = cap_symmetrize(f);
    });
    const double t_ser = time_best_of(5, [&] {
      par::set_enabled(false);
      out = cap_symmetrize(f);
    });
    const double t_ref = time_best_of(5, [&] { out = ref::cap_symmetrize_serial(f); });
    par::set_enabled(true);
    std::printf("%-28s %12.3f %12.3f %12.3f\n", "cap_symmetrize 128x256", t_omp,
                t_ser, t_ref);
  }
  {
    SolveResult res;
    const double t_omp = time_best_of(3, [&] {
      par::set_enabled(true);
      res = solve(spec);
    });
    const double t_ser = time_best_of(3, [&] {
      par::set_enabled(false);
      res = solve(spec);
    });
    par::set_enabled(true);
    std::printf("%-28s %12.3f %12.3f %12s\n", "solve annulus 128x256", t_omp,
                t_ser, "-");
  }
  {
    ShellField lap = f;
    const double t_omp = time_best_of(5, [&] {
      par::set_enabled(true);
      lap = apply_discrete_laplacian(spec, f);
    });
    const double t_ref =
        time_best_of(5, [&] { lap = ref::apply_laplacian(spec, f); });
    par::set_enabled(true);
    std::printf("%-28s %12.3f %12s %12.3f\n", "discrete laplacian 128x256",
                t_omp, "-", t_ref);
  }
  {
    // one angular row DFT: table-driven plan (inside solve) vs direct sums
    std::vector<double> row(f.slice(0), f.slice(0) + f.n_angular());
    std::vector<double> re, im;
    const double t_ref = time_best_of(5, [&] { ref::dft_forward(row, re, im); });
    std::printf("%-28s %12s %12s %12.3f\n", "dft row M=256 (reference)", "-",
                "-", t_ref);
  }

  ScenarioSpec cyl = sc;
  cyl.domain = DomainKind::cylinder_rect;
  cyl.n_radial = 128;
  cyl.n_angular = 128;
  const RobinProblemSpec cspec = make_problem(cyl);
  {
    CylinderField out = cspec.cylinder_source();
    const double t_omp = time_best_of(5, [&] {
      par::set_enabled(true);
      out = y_rearrange(cspec.cylinder_source());
    });
    const double t_ref = time_best_of(
        5, [&] { out = ref::y_rearrange_serial(cspec.cylinder_source()); });
    par::set_enabled(true);
    std::printf("%-28s %12.3f %12s %12.3f\n", "y_rearrange 128x128", t_omp, "-",
                t_ref);
  }
  return 0;
}
