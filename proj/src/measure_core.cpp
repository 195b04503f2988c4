#include "starcmp/measure_core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace starcmp {

namespace {

double abs_scale(const WeightedSamples& u, const WeightedSamples& v) {
  double m = 0.0;
  for (double x : u.values) m = std::max(m, std::abs(x));
  for (double x : v.values) m = std::max(m, std::abs(x));
  return std::max(m, 1.0) * std::max(u.total_mass, v.total_mass);
}

// indices of f.values sorted by value descending; stable for determinism
std::vector<std::size_t> desc_order(const std::vector<double>& values) {
  std::vector<std::size_t> idx(values.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return values[a] > values[b]; });
  return idx;
}

// mu({f > t}) for all t in `thresholds` (thresholds sorted ascending)
std::vector<double> distribution_at(const WeightedSamples& f,
                                    const std::vector<double>& thresholds) {
  // sort values ascending with weights, then sweep
  std::vector<std::size_t> idx(f.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::sort(idx.begin(), idx.end(),
            [&](std::size_t a, std::size_t b) { return f.values[a] < f.values[b]; });
  std::vector<double> out(thresholds.size());
  double above = f.total_mass;
  std::size_t j = 0;
  for (std::size_t k = 0; k < thresholds.size(); ++k) {
    while (j < idx.size() && f.values[idx[j]] <= thresholds[k]) {
      above -= f.weights[idx[j]];
      ++j;
    }
    out[k] = above;
  }
  return out;
}

}  // namespace

WeightedSamples WeightedSamples::create(std::vector<double> values,
                                        std::vector<double> weights) {
  if (values.size() != weights.size())
    throw std::invalid_argument("WeightedSamples: values/weights length mismatch");
  if (values.empty())
    throw std::invalid_argument("WeightedSamples: empty sample set");
  WeightedSamples out;
  out.total_mass = 0.0;
  for (double v : values)
    if (!std::isfinite(v))
      throw std::invalid_argument("WeightedSamples: non-finite value");
  for (double w : weights) {
    if (!(w > 0.0) || !std::isfinite(w))
      throw std::invalid_argument("WeightedSamples: weights must be strictly positive and finite");
    out.total_mass += w;
  }
  if (!(out.total_mass > 0.0))
    throw std::invalid_argument("WeightedSamples: total mass must be positive");
  out.values = std::move(values);
  out.weights = std::move(weights);
  return out;
}

double WeightedSamples::integral() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * weights[i];
  return s;
}

double DecreasingProfile::operator()(double t) const {
  if (t <= breakpoints.front()) return plateau_values.front();
  if (t >= breakpoints.back()) return plateau_values.back();
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  return plateau_values[std::min(k, plateau_values.size() - 1)];
}

double StarProfile::operator()(double t) const {
  if (t <= 0.0) return 0.0;
  if (t >= breakpoints.back()) return node_values.back();
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  const std::size_t k = static_cast<std::size_t>(it - breakpoints.begin()) - 1;
  const double slope = (node_values[k + 1] - node_values[k]) /
                       (breakpoints[k + 1] - breakpoints[k]);
  return node_values[k] + slope * (t - breakpoints[k]);
}

RearrangementCheck is_rearrangement(const WeightedSamples& f,
                                    const WeightedSamples& g,
                                    double eq_tol_rel) {
  RearrangementCheck out;
  const double tol = eq_tol_rel * std::max(f.total_mass, g.total_mass);
  out.mass_defect = std::abs(f.total_mass - g.total_mass);
  if (out.mass_defect > tol) {
    out.equal = false;
    out.note = "total mass mismatch";
    return out;
  }
  std::vector<double> merged(f.values);
  merged.insert(merged.end(), g.values.begin(), g.values.end());
  std::sort(merged.begin(), merged.end());
  merged.erase(std::unique(merged.begin(), merged.end()), merged.end());
  const std::vector<double> df = distribution_at(f, merged);
  const std::vector<double> dg = distribution_at(g, merged);
  double worst = 0.0;
  double worst_t = 0.0;
  for (std::size_t k = 0; k < merged.size(); ++k) {
    const double d = std::abs(df[k] - dg[k]);
    if (d > worst) { worst = d; worst_t = merged[k]; }
  }
  out.worst_defect = worst;
  out.equal = worst <= tol;
  if (!out.equal)
    out.note = "distribution functions differ at t = " + std::to_string(worst_t);
  return out;
}

DecreasingProfile decreasing_rearrangement(const WeightedSamples& f) {
  const auto idx = desc_order(f.values);
  DecreasingProfile out;
  out.breakpoints.push_back(0.0);
  double cum = 0.0;
  std::size_t i = 0;
  while (i < idx.size()) {
    const double v = f.values[idx[i]];
    double w = 0.0;
    while (i < idx.size() && f.values[idx[i]] == v) {  // merge exact ties
      w += f.weights[idx[i]];
      ++i;
    }
    cum += w;
    out.plateau_values.push_back(v);
    out.breakpoints.push_back(cum);
  }
  out.breakpoints.back() = f.total_mass;  // guard against cumulative roundoff
  return out;
}

StarProfile star_function(const WeightedSamples& f) {
  const DecreasingProfile prof = decreasing_rearrangement(f);
  StarProfile out;
  out.breakpoints = prof.breakpoints;
  out.node_values.resize(prof.breakpoints.size());
  out.node_values[0] = 0.0;
  for (std::size_t k = 0; k < prof.plateau_values.size(); ++k) {
    const double gap = prof.breakpoints[k + 1] - prof.breakpoints[k];
    out.node_values[k + 1] = out.node_values[k] + prof.plateau_values[k] * gap;
  }
  return out;
}

double star_brute_force(const WeightedSamples& f, double t, double eq_tol_rel) {
  const std::size_t n = f.size();
  if (n > 20) throw std::invalid_argument("oracle size limit");
  const double tol = eq_tol_rel * f.total_mass;
  const std::size_t count = std::size_t{1} << n;

  // Gray-code walk: one atom toggles per step.
  double wsum = 0.0, vsum = 0.0;
  bool in[21] = {false};
  double best = -std::numeric_limits<double>::infinity();
  if (std::abs(t) <= tol) best = 0.0;  // empty set
  std::size_t prev_gray = 0;
  for (std::size_t k = 1; k < count; ++k) {
    const std::size_t gray = k ^ (k >> 1);
    const std::size_t bit = gray ^ prev_gray;
    prev_gray = gray;
    int j = 0;
    while (!((bit >> j) & 1u)) ++j;
    if (in[j]) {
      wsum -= f.weights[j];
      vsum -= f.values[j] * f.weights[j];
      in[j] = false;
    } else {
      wsum += f.weights[j];
      vsum += f.values[j] * f.weights[j];
      in[j] = true;
    }
    if (std::abs(wsum - t) <= tol && vsum > best) best = vsum;
  }
  if (best == -std::numeric_limits<double>::infinity())
    throw std::invalid_argument("no subset of measure t");
  return best;
}

std::vector<std::pair<double, double>> star_brute_force_all(
    const WeightedSamples& f, double eq_tol_rel) {
  const std::size_t n = f.size();
  if (n > 20) throw std::invalid_argument("oracle size limit");
  const double tol = eq_tol_rel * f.total_mass;
  const std::size_t count = std::size_t{1} << n;
  std::vector<std::pair<double, double>> sums;  // (measure, integral)
  sums.reserve(count);
  double wsum = 0.0, vsum = 0.0;
  bool in[21] = {false};
  std::size_t prev_gray = 0;
  sums.emplace_back(0.0, 0.0);
  for (std::size_t k = 1; k < count; ++k) {
    const std::size_t gray = k ^ (k >> 1);
    const std::size_t bit = gray ^ prev_gray;
    prev_gray = gray;
    int j = 0;
    while (!((bit >> j) & 1u)) ++j;
    if (in[j]) {
      wsum -= f.weights[j];
      vsum -= f.values[j] * f.weights[j];
      in[j] = false;
    } else {
      wsum += f.weights[j];
      vsum += f.values[j] * f.weights[j];
      in[j] = true;
    }
    sums.emplace_back(wsum, vsum);
  }
  std::sort(sums.begin(), sums.end());
  std::vector<std::pair<double, double>> out;
  for (const auto& [w, v] : sums) {
    if (!out.empty() && std::abs(w - out.back().first) <= tol)
      out.back().second = std::max(out.back().second, v);
    else
      out.emplace_back(w, v);
  }
  return out;
}

ConvexMeansReport convex_means_compare(const WeightedSamples& u,
                                       const WeightedSamples& v,
                                       bool require_increasing,
                                       double eq_tol_rel) {
  ConvexMeansReport rep;
  const double mass_tol = eq_tol_rel * std::max(u.total_mass, v.total_mass);
  if (std::abs(u.total_mass - v.total_mass) > mass_tol)
    throw std::invalid_argument("convex_means_compare: total mass mismatch");

  const double tol = eq_tol_rel * abs_scale(u, v);
  rep.tolerance = tol;
  rep.mean_u = u.integral();
  rep.mean_v = v.integral();
  rep.mean_difference = rep.mean_v - rep.mean_u;
  const bool means_equal = std::abs(rep.mean_difference) <= tol;
  rep.misuse = !require_increasing && !means_equal;

  // hinge means via sorted prefix sums:
  //   int max(x-c,0) dmu = S(k) - c W(k), k = #values > c
  struct Pref {
    std::vector<double> val;   // descending
    std::vector<double> S, W;  // prefix integral / prefix mass
    double mass, total;
    void build(const WeightedSamples& f) {
      auto idx = desc_order(f.values);
      val.resize(idx.size());
      S.assign(idx.size() + 1, 0.0);
      W.assign(idx.size() + 1, 0.0);
      for (std::size_t k = 0; k < idx.size(); ++k) {
        val[k] = f.values[idx[k]];
        S[k + 1] = S[k] + f.values[idx[k]] * f.weights[idx[k]];
        W[k + 1] = W[k] + f.weights[idx[k]];
      }
      mass = f.total_mass;
      total = S.back();
    }
    double hinge_up(double c) const {
      // k = number of values strictly above c
      const std::size_t k = static_cast<std::size_t>(
          std::lower_bound(val.begin(), val.end(), c,
                           [](double a, double b) { return a > b; }) -
          val.begin());
      return S[k] - c * W[k];
    }
    double hinge_down(double c) const {
      // int max(c-x,0) = c*mass - total + hinge_up(c) since max(c-x,0) =
      // (c-x) + max(x-c,0)
      return c * mass - total + hinge_up(c);
    }
  } pu, pv;
  pu.build(u);
  pv.build(v);

  std::vector<double> cs(u.values);
  cs.insert(cs.end(), v.values.begin(), v.values.end());
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());

  bool phi_ok = true;
  double worst = 0.0;
  for (double c : cs) {
    PhiMargin m;
    m.phi = "hinge_up";
    m.c = c;
    m.mean_u = pu.hinge_up(c);
    m.mean_v = pv.hinge_up(c);
    m.margin = m.mean_v - m.mean_u;
    m.counts_for_verdict = true;
    if (m.margin < worst) worst = m.margin;
    if (m.margin < -tol) phi_ok = false;
    rep.margins.push_back(m);
  }
  if (!require_increasing) {
    for (double c : cs) {
      PhiMargin m;
      m.phi = "hinge_down";
      m.c = c;
      m.mean_u = pu.hinge_down(c);
      m.mean_v = pv.hinge_down(c);
      m.margin = m.mean_v - m.mean_u;
      m.counts_for_verdict = true;
      if (m.margin < worst) worst = m.margin;
      if (m.margin < -tol) phi_ok = false;
      rep.margins.push_back(m);
    }
  }

  // advisory rows; they enter the verdict only when equal means make every
  // convex function a valid test
  double scale = 1.0;
  for (double x : u.values) scale = std::max(scale, std::abs(x));
  for (double x : v.values) scale = std::max(scale, std::abs(x));
  const auto moment = [](const WeightedSamples& f, auto&& phi) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i) s += phi(f.values[i]) * f.weights[i];
    return s;
  };
  const bool extras_count = means_equal && !require_increasing;
  const double extra_tol_factor = scale;  // x^2 and exp grow the scale
  const auto add_extra = [&](const char* name, auto&& phi) {
    PhiMargin m;
    m.phi = name;
    m.mean_u = moment(u, phi);
    m.mean_v = moment(v, phi);
    m.margin = m.mean_v - m.mean_u;
    m.counts_for_verdict = extras_count;
    if (extras_count) {
      if (m.margin < worst) worst = m.margin;
      if (m.margin < -tol * extra_tol_factor) phi_ok = false;
    }
    rep.margins.push_back(m);
  };
  add_extra("square", [](double x) { return x * x; });
  add_extra("abs", [](double x) { return std::abs(x); });
  add_extra("exp", [scale](double x) { return std::exp(x / scale); });

  rep.pass = phi_ok;
  rep.worst_margin = worst;

  // equivalent star-profile test at merged breakpoints
  const StarProfile su = star_function(u);
  const StarProfile sv = star_function(v);
  std::vector<double> ts(su.breakpoints);
  ts.insert(ts.end(), sv.breakpoints.begin(), sv.breakpoints.end());
  std::sort(ts.begin(), ts.end());
  ts.erase(std::unique(ts.begin(), ts.end()), ts.end());
  double star_gap = 0.0;
  for (double t : ts) star_gap = std::min(star_gap, sv(t) - su(t));
  rep.star_worst_gap = star_gap;
  // with unequal means the hinge-down family can fail while u* <= v* holds;
  // the star test matches the increasing-convex (hinge-up) verdict
  bool star_ok = star_gap >= -tol;
  if (!require_increasing && !rep.misuse) {
    // equal means: all-convex verdict corresponds to u* <= v* plus equality
    // of total integrals, already enforced above
  }
  rep.star_pass = star_ok;
  rep.agree = (rep.pass == rep.star_pass) || rep.misuse;
  return rep;
}

LpReport lp_compare_report(const WeightedSamples& u, const WeightedSamples& v,
                           const std::vector<double>& p_list, bool means_equal,
                           bool nonneg, double eq_tol_rel) {
  if (!means_equal && !nonneg)
    throw std::invalid_argument("Cor 2.7 hypotheses unmet");
  LpReport rep;
  const double tol = eq_tol_rel * abs_scale(u, v);
  rep.tolerance = tol;
  const auto norm = [](const WeightedSamples& f, double p) {
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      s += std::pow(std::abs(f.values[i]), p) * f.weights[i];
    return std::pow(s, 1.0 / p);
  };
  const auto maxabs = [](const WeightedSamples& f) {
    double m = 0.0;
    for (double x : f.values) m = std::max(m, std::abs(x));
    return m;
  };
  bool ok = true;
  for (double p : p_list) {
    LpRow row;
    row.name = "L" + std::to_string(static_cast<int>(p));
    row.lhs = norm(u, p);
    row.rhs = norm(v, p);
    row.margin = row.rhs - row.lhs;
    if (row.margin < -tol) ok = false;
    rep.rows.push_back(row);
  }
  {
    LpRow row;
    row.name = "Linf";
    row.lhs = maxabs(u);
    row.rhs = maxabs(v);
    row.margin = row.rhs - row.lhs;
    if (row.margin < -tol) ok = false;
    rep.rows.push_back(row);
  }
  if (means_equal) {
    const auto minmax = [](const WeightedSamples& f) {
      double lo = f.values[0], hi = f.values[0];
      for (double x : f.values) { lo = std::min(lo, x); hi = std::max(hi, x); }
      return std::pair<double, double>{lo, hi};
    };
    const auto [ulo, uhi] = minmax(u);
    const auto [vlo, vhi] = minmax(v);
    LpRow sup{"esssup", uhi, vhi, vhi - uhi};
    LpRow inf{"essinf", ulo, vlo, ulo - vlo};  // pass iff essinf u >= essinf v
    LpRow osc{"osc", uhi - ulo, vhi - vlo, (vhi - vlo) - (uhi - ulo)};
    for (const LpRow& r : {sup, inf, osc}) {
      if (r.margin < -tol) ok = false;
      rep.rows.push_back(r);
    }
  }
  rep.pass = ok;
  return rep;
}

}  // namespace starcmp
