#ifndef STARCMP_MEASURE_CORE_HPP
#define STARCMP_MEASURE_CORE_HPP

#include <cstddef>
#include <string>
#include <vector>

namespace starcmp {

// Default relative tolerance for measure comparisons; absolute tolerances are
// derived as eq_tol_rel * total_mass.
inline constexpr double kEqTolRel = 1e-12;

// A finite discrete measure space together with a sampled function: atom i
// has measure weights[i] > 0 and function value values[i].
struct WeightedSamples {
  std::vector<double> values;
  std::vector<double> weights;
  double total_mass = 0.0;

  // Validates (finite values, strictly positive finite weights) and fills
  // total_mass.  Throws std::invalid_argument on violation.
  static WeightedSamples create(std::vector<double> values,
                                std::vector<double> weights);

  std::size_t size() const { return values.size(); }
  // integral of the sampled function over the whole space
  double integral() const;
};

// The decreasing rearrangement as a step function on [0, total_mass]:
// value plateau_values[k] on [breakpoints[k], breakpoints[k+1]).
// plateau_values is strictly decreasing (equal sample values are merged).
struct DecreasingProfile {
  std::vector<double> breakpoints;      // size m+1, 0 = t0 < ... < tm = mass
  std::vector<double> plateau_values;   // size m, strictly decreasing

  double operator()(double t) const;    // step-function evaluation
};

// The star function: concave piecewise-linear on [0, total_mass] with
// F(0) = 0 and slopes equal to the decreasing-rearrangement plateaus.
struct StarProfile {
  std::vector<double> breakpoints;
  std::vector<double> node_values;      // F at breakpoints, node_values[0] = 0

  double operator()(double t) const;    // linear interpolation between nodes
  double total_mass() const { return breakpoints.back(); }
};

struct RearrangementCheck {
  bool equal = false;
  double worst_defect = 0.0;   // worst |mu(f>t) - nu(g>t)| over tested t
  double mass_defect = 0.0;    // |total_mass(f) - total_mass(g)|
  std::string note;            // diagnostic when equal == false
};

// Distribution-function equality mu({f>t}) = nu({g>t}) tested at every t in
// the merged value set, which is sufficient for step distributions.  A total
// mass mismatch beyond tolerance reports false rather than throwing.
RearrangementCheck is_rearrangement(const WeightedSamples& f,
                                    const WeightedSamples& g,
                                    double eq_tol_rel = kEqTolRel);

DecreasingProfile decreasing_rearrangement(const WeightedSamples& f);

StarProfile star_function(const WeightedSamples& f);

// Exponential-time oracle: max of sum_E value*weight over atom subsets E of
// measure t.  Requires t to be an achievable subset measure (throws
// "no subset of measure t" otherwise) and at most 20 atoms (throws
// "oracle size limit").
double star_brute_force(const WeightedSamples& f, double t,
                        double eq_tol_rel = kEqTolRel);

// All achievable subset measures together with the brute-force star value at
// each, deduplicated at tolerance; same enumeration as star_brute_force.
std::vector<std::pair<double, double>> star_brute_force_all(
    const WeightedSamples& f, double eq_tol_rel = kEqTolRel);

struct PhiMargin {
  std::string phi;          // "hinge_up", "hinge_down", "square", "abs", "exp"
  double c = 0.0;           // hinge location (hinge families only)
  double mean_u = 0.0;
  double mean_v = 0.0;
  double margin = 0.0;      // mean_v - mean_u; pass iff >= -tol
  bool counts_for_verdict = false;
};

struct ConvexMeansReport {
  bool pass = false;         // phi-family verdict
  bool star_pass = false;    // u* <= v* at merged breakpoints
  bool agree = false;        // pass == star_pass
  double mean_u = 0.0;
  double mean_v = 0.0;
  double mean_difference = 0.0;
  bool misuse = false;       // require_increasing=false while means differ
  double worst_margin = 0.0; // most negative verdict-relevant margin
  double star_worst_gap = 0.0;  // most negative v*(t) - u*(t)
  double tolerance = 0.0;
  std::vector<PhiMargin> margins;
};

// Tests int phi(u) dmu <= int phi(v) dnu over the finite certificate family:
// hinges max(x-c,0) at all merged sample values (plus max(c-x,0) when
// require_increasing is false), with x^2, |x| and exp(x/scale) reported as
// advisory rows.  Spaces must have equal total mass.
ConvexMeansReport convex_means_compare(const WeightedSamples& u,
                                       const WeightedSamples& v,
                                       bool require_increasing,
                                       double eq_tol_rel = kEqTolRel);

struct LpRow {
  std::string name;   // "L1", "L2", "Linf", "esssup", "essinf", "osc"
  double lhs = 0.0;   // value for u
  double rhs = 0.0;   // value for v
  double margin = 0.0;  // signed, pass iff >= -tol
};

struct LpReport {
  bool pass = false;
  double tolerance = 0.0;
  std::vector<LpRow> rows;
};

// Lp-norm domination report under the hypotheses of the majorization
// corollary: requires means_equal or nonneg (throws "Cor 2.7 hypotheses
// unmet" when neither is set).  esssup/essinf/osc rows appear only when
// means_equal.
LpReport lp_compare_report(const WeightedSamples& u, const WeightedSamples& v,
                           const std::vector<double>& p_list, bool means_equal,
                           bool nonneg, double eq_tol_rel = kEqTolRel);

}  // namespace starcmp

#endif
