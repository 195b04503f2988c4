#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "starcmp/measure_core.hpp"
#include "starcmp/rng.hpp"

using namespace starcmp;

namespace {

WeightedSamples ws(std::vector<double> v, std::vector<double> w) {
  return WeightedSamples::create(std::move(v), std::move(w));
}

// random sample sets with clustered weights so subset measures repeat
WeightedSamples random_samples(Xoshiro256pp& rng, std::size_t max_atoms) {
  const std::size_t n = 2 + rng.next() % (max_atoms - 1);
  static const double wpool[4] = {0.5, 1.0, 1.5, 2.0};
  std::vector<double> v(n), w(n);
  for (std::size_t i = 0; i < n; ++i) {
    v[i] = 10.0 * rng.uniform_pm1();
    w[i] = wpool[rng.next() % 4];
  }
  return ws(v, w);
}

}  // namespace

TEST_CASE("WeightedSamples validates inputs") {
  CHECK_THROWS_AS(ws({1.0}, {0.0}), std::invalid_argument);
  CHECK_THROWS_AS(ws({1.0}, {-1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ws({std::nan("")}, {1.0}), std::invalid_argument);
  CHECK_THROWS_AS(ws({}, {}), std::invalid_argument);
  CHECK_THROWS_AS(ws({1.0, 2.0}, {1.0}), std::invalid_argument);
  CHECK(ws({1.0, 2.0}, {1.0, 3.0}).total_mass == doctest::Approx(4.0));
}

TEST_CASE("is_rearrangement on permutations and atom splits") {
  CHECK(is_rearrangement(ws({1, 2}, {1, 1}), ws({2, 1}, {1, 1})).equal);
  // splitting an atom preserves the distribution function
  CHECK(is_rearrangement(ws({1}, {2}), ws({1, 1}, {1, 1})).equal);
  // mu({f>2.5}) = 1 but nu({g>2.5}) = 2
  const auto r = is_rearrangement(ws({1, 3, 2}, {1, 1, 1}), ws({3, 3, 2}, {1, 1, 1}));
  CHECK_FALSE(r.equal);
  CHECK(r.worst_defect == doctest::Approx(1.0));
}

TEST_CASE("is_rearrangement reports mass mismatch instead of throwing") {
  const auto r = is_rearrangement(ws({1.0}, {1.0}), ws({1.0}, {2.0}));
  CHECK_FALSE(r.equal);
  CHECK(r.mass_defect == doctest::Approx(1.0));
  CHECK(r.note.find("mass") != std::string::npos);
}

TEST_CASE("decreasing_rearrangement merges plateaus and sorts") {
  SUBCASE("constant function -> single plateau") {
    const auto p = decreasing_rearrangement(ws({5, 5, 5}, {1, 2, 3}));
    REQUIRE(p.plateau_values.size() == 1);
    CHECK(p.plateau_values[0] == 5.0);
    CHECK(p.breakpoints.front() == 0.0);
    CHECK(p.breakpoints.back() == doctest::Approx(6.0));
  }
  SUBCASE("unit weights sort") {
    const auto p = decreasing_rearrangement(ws({1, 3, 2}, {1, 1, 1}));
    CHECK(p.plateau_values == std::vector<double>{3, 2, 1});
    CHECK(p.breakpoints == std::vector<double>{0, 1, 2, 3});
  }
  SUBCASE("weighted atoms invert the distribution function") {
    const auto p = decreasing_rearrangement(ws({2, 5}, {0.5, 1.5}));
    CHECK(p.plateau_values == std::vector<double>{5, 2});
    CHECK(p.breakpoints[1] == doctest::Approx(1.5));
    CHECK(p.breakpoints[2] == doctest::Approx(2.0));
  }
  SUBCASE("order independence") {
    const auto p1 = decreasing_rearrangement(ws({3, 1, 2, 1}, {1, 2, 1, 1}));
    const auto p2 = decreasing_rearrangement(ws({1, 1, 2, 3}, {2, 1, 1, 1}));
    CHECK(p1.plateau_values == p2.plateau_values);
    CHECK(p1.breakpoints == p2.breakpoints);
  }
}

TEST_CASE("star_function endpoints and example values") {
  const auto f = ws({1, 3, 2}, {1, 1, 1});
  const auto s = star_function(f);
  CHECK(s(0.0) == 0.0);
  CHECK(s(1.0) == doctest::Approx(3.0));
  CHECK(s(2.0) == doctest::Approx(5.0));
  CHECK(s(3.0) == doctest::Approx(6.0));
  CHECK(s.node_values.back() == doctest::Approx(f.integral()));
}

TEST_CASE("star profile is concave") {
  Xoshiro256pp rng(11);
  for (int t = 0; t < 100; ++t) {
    const auto f = random_samples(rng, 12);
    const auto s = star_function(f);
    double prev = 1e300;
    for (std::size_t k = 0; k + 1 < s.breakpoints.size(); ++k) {
      const double slope = (s.node_values[k + 1] - s.node_values[k]) /
                           (s.breakpoints[k + 1] - s.breakpoints[k]);
      CHECK(slope <= prev + 1e-12);
      prev = slope;
    }
  }
}

TEST_CASE("star_brute_force oracle basics") {
  const auto f = ws({1, 3, 2}, {1, 1, 1});
  CHECK(star_brute_force(f, 2.0) == doctest::Approx(5.0));
  CHECK(star_brute_force(f, 0.0) == doctest::Approx(0.0));
  CHECK(star_brute_force(ws({4}, {2}), 2.0) == doctest::Approx(8.0));
  CHECK_THROWS_WITH_AS(star_brute_force(f, 0.6), "no subset of measure t",
                       std::invalid_argument);
  WeightedSamples big = ws(std::vector<double>(21, 1.0), std::vector<double>(21, 1.0));
  CHECK_THROWS_WITH_AS(star_brute_force(big, 1.0), "oracle size limit",
                       std::invalid_argument);
}

TEST_CASE("oracle equivalence: star_function == brute force at achievable t") {
  Xoshiro256pp rng(5);
  for (int trial = 0; trial < 60; ++trial) {
    const auto f = random_samples(rng, 12);
    const auto s = star_function(f);
    for (const auto& [t, brute] : star_brute_force_all(f)) {
      CHECK(std::abs(s(t) - brute) <= 1e-12 * std::max(1.0, std::abs(brute)));
    }
  }
}

TEST_CASE("equimeasurability of the decreasing rearrangement") {
  Xoshiro256pp rng(17);
  for (int trial = 0; trial < 100; ++trial) {
    const auto f = random_samples(rng, 14);
    const auto prof = decreasing_rearrangement(f);
    std::vector<double> v, w;
    for (std::size_t k = 0; k < prof.plateau_values.size(); ++k) {
      v.push_back(prof.plateau_values[k]);
      w.push_back(prof.breakpoints[k + 1] - prof.breakpoints[k]);
    }
    CHECK(is_rearrangement(f, ws(v, w)).equal);
  }
}

TEST_CASE("convex_means_compare spec examples") {
  SUBCASE("equal means, all convex family passes") {
    const auto rep = convex_means_compare(ws({0, 1}, {1, 1}), ws({-1, 2}, {1, 1}),
                                          /*require_increasing=*/false);
    CHECK(rep.pass);
    CHECK(rep.star_pass);
    CHECK(rep.agree);
    CHECK_FALSE(rep.misuse);
    CHECK(rep.mean_difference == doctest::Approx(0.0));
    // |x| advisory row: 1 vs 3
    bool found = false;
    for (const auto& m : rep.margins)
      if (m.phi == "abs") {
        CHECK(m.mean_u == doctest::Approx(1.0));
        CHECK(m.mean_v == doctest::Approx(3.0));
        found = true;
      }
    CHECK(found);
  }
  SUBCASE("identical inputs pass with zero margins") {
    const auto u = ws({2, -1, 0.5}, {1, 2, 1});
    const auto rep = convex_means_compare(u, u, true);
    CHECK(rep.pass);
    CHECK(rep.worst_margin == doctest::Approx(0.0));
  }
  SUBCASE("u=[2,2] vs v=[1,1] fails increasing-convex domination") {
    const auto rep = convex_means_compare(ws({2, 2}, {1, 1}), ws({1, 1}, {1, 1}), true);
    CHECK_FALSE(rep.pass);
    CHECK_FALSE(rep.star_pass);
    CHECK(rep.agree);
  }
  SUBCASE("total mass mismatch throws") {
    CHECK_THROWS_AS(convex_means_compare(ws({1}, {1}), ws({1}, {2}), true),
                    std::invalid_argument);
  }
  SUBCASE("misuse flag when means differ and all-convex requested") {
    const auto rep = convex_means_compare(ws({0, 0}, {1, 1}), ws({5, 5}, {1, 1}), false);
    CHECK(rep.misuse);
  }
}

TEST_CASE("majorization equivalence: phi-family verdict iff star domination") {
  Xoshiro256pp rng(23);
  int pass_count = 0, fail_count = 0;
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 3 + rng.next() % 6;
    std::vector<double> vu(n), vv(n), w(n, 1.0);
    for (auto& x : vu) x = 5.0 * rng.uniform_pm1();
    for (auto& x : vv) x = 5.0 * rng.uniform_pm1();
    const auto rep = convex_means_compare(ws(vu, w), ws(vv, w), true);
    CHECK(rep.agree);
    (rep.pass ? pass_count : fail_count)++;
  }
  // both directions must actually occur in the sample
  CHECK(pass_count > 0);
  CHECK(fail_count > 0);
}

TEST_CASE("majorization equivalence with equal means and all convex phi") {
  Xoshiro256pp rng(29);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 4;
    std::vector<double> vu(n), vv(n), w(n, 1.0);
    for (auto& x : vu) x = 3.0 * rng.uniform_pm1();
    for (auto& x : vv) x = 3.0 * rng.uniform_pm1();
    double mu = 0, mv = 0;
    for (double x : vu) mu += x;
    for (double x : vv) mv += x;
    for (auto& x : vv) x += (mu - mv) / static_cast<double>(n);
    const auto rep = convex_means_compare(ws(vu, w), ws(vv, w), false);
    CHECK_FALSE(rep.misuse);
    CHECK(rep.agree);
  }
}

TEST_CASE("lp_compare_report spec examples") {
  SUBCASE("means equal gives esssup/essinf/osc rows") {
    const auto rep = lp_compare_report(ws({0, 1}, {1, 1}), ws({-1, 2}, {1, 1}),
                                       {1.0}, /*means_equal=*/true, false);
    CHECK(rep.pass);
    bool sup = false, inf = false, osc = false, l1 = false;
    for (const auto& r : rep.rows) {
      if (r.name == "esssup") {
        CHECK(r.lhs == doctest::Approx(1.0));
        CHECK(r.rhs == doctest::Approx(2.0));
        sup = true;
      }
      if (r.name == "essinf") {
        CHECK(r.lhs == doctest::Approx(0.0));
        CHECK(r.rhs == doctest::Approx(-1.0));
        inf = true;
      }
      if (r.name == "osc") {
        CHECK(r.lhs == doctest::Approx(1.0));
        CHECK(r.rhs == doctest::Approx(3.0));
        osc = true;
      }
      if (r.name == "L1") {
        CHECK(r.lhs == doctest::Approx(1.0));
        CHECK(r.rhs == doctest::Approx(3.0));
        l1 = true;
      }
    }
    CHECK((sup && inf && osc && l1));
  }
  SUBCASE("identical nonnegative inputs are tight") {
    const auto u = ws({1, 0, 2}, {1, 1, 1});
    const auto rep = lp_compare_report(u, u, {1.0, 2.0}, false, true);
    CHECK(rep.pass);
    for (const auto& r : rep.rows) CHECK(r.margin == doctest::Approx(0.0));
  }
  SUBCASE("nonneg hypothesis L2 example") {
    const auto rep = lp_compare_report(ws({1, 1}, {1, 1}), ws({0, 2}, {1, 1}),
                                       {2.0}, false, true);
    for (const auto& r : rep.rows)
      if (r.name == "L2") {
        CHECK(r.lhs == doctest::Approx(std::sqrt(2.0)));
        CHECK(r.rhs == doctest::Approx(2.0));
      }
    CHECK(rep.pass);
  }
  SUBCASE("hypotheses unmet throws") {
    CHECK_THROWS_WITH_AS(
        lp_compare_report(ws({1}, {1}), ws({1}, {1}), {1.0}, false, false),
        "Cor 2.7 hypotheses unmet", std::invalid_argument);
  }
}
