#include "starcmp/report_io.hpp"

#include <chrono>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "starcmp/parallel.hpp"

namespace starcmp {

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json optional_to_json(const std::optional<double>& v) {
  if (v) return *v;
  return nullptr;
}

std::optional<double> optional_from_json(const nlohmann::json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  return j.at(key).get<double>();
}

void write_file(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  out << content;
  if (!out) throw std::runtime_error("write failed for " + path.string());
}

}  // namespace

ordered_json report_to_json(const ComparisonReport& rep) {
  ordered_json j;
  j["scenario_id"] = rep.scenario_id;
  j["seed"] = rep.seed;
  j["domain"] = to_string(rep.domain);
  j["alpha"] = {rep.alpha_inner, rep.alpha_outer};
  j["grid"] = {{"n_radial", rep.n_radial}, {"n_angular", rep.n_angular}};
  j["dr"] = rep.dr;
  j["dtheta"] = rep.dtheta;
  j["max_violation"] = rep.max_violation;
  j["tolerance"] = rep.tolerance;
  j["violation_profile"] = rep.violation_profile;
  {
    ordered_json c;
    c["checked"] = rep.convex.checked;
    c["pass"] = rep.convex.pass;
    c["all_convex"] = rep.convex.all_convex;
    c["worst_margin"] = rep.convex.worst_margin;
    c["tolerance"] = rep.convex.tolerance;
    c["star_agrees"] = rep.convex.star_agrees;
    j["convex_means"] = c;
  }
  {
    ordered_json l;
    l["applicable"] = rep.lp.applicable;
    l["hypothesis"] = rep.lp.hypothesis;
    l["pass"] = rep.lp.pass;
    l["worst_margin"] = rep.lp.worst_margin;
    ordered_json rows = ordered_json::array();
    for (const auto& r : rep.lp.rows) {
      ordered_json row;
      row["name"] = r.name;
      row["u"] = r.lhs;
      row["v"] = r.rhs;
      row["margin"] = r.margin;
      rows.push_back(row);
    }
    l["rows"] = rows;
    j["lp"] = l;
  }
  j["mean_equality_defect"] = optional_to_json(rep.mean_equality_defect);
  j["flux_constancy_defect"] = optional_to_json(rep.flux_constancy_defect);
  j["flux_k1"] = optional_to_json(rep.flux_k1);
  j["v_symmetrization_defect"] = optional_to_json(rep.v_symmetrization_defect);
  j["subharmonicity_margin"] = optional_to_json(rep.subharmonicity_margin);
  j["subharmonicity_tol"] = optional_to_json(rep.subharmonicity_tol);
  j["commutativity_defect"] = optional_to_json(rep.commutativity_defect);
  j["commutativity_tol"] = optional_to_json(rep.commutativity_tol);
  j["interior_residual_u"] = rep.interior_residual_u;
  j["interior_residual_v"] = rep.interior_residual_v;
  j["boundary_residual_u"] = rep.boundary_residual_u;
  j["boundary_residual_v"] = rep.boundary_residual_v;
  j["source_inf_norm"] = rep.source_inf_norm;
  j["pass"] = rep.pass;
  j["failures"] = rep.failures;
  j["error"] = rep.error;
  return j;
}

ComparisonReport report_from_json(const nlohmann::json& j) {
  ComparisonReport rep;
  rep.scenario_id = j.at("scenario_id").get<std::string>();
  rep.seed = j.at("seed").get<std::uint64_t>();
  rep.domain = domain_from_string(j.at("domain").get<std::string>());
  rep.alpha_inner = j.at("alpha").at(0).get<double>();
  rep.alpha_outer = j.at("alpha").at(1).get<double>();
  rep.n_radial = j.at("grid").at("n_radial").get<std::size_t>();
  rep.n_angular = j.at("grid").at("n_angular").get<std::size_t>();
  rep.dr = j.at("dr").get<double>();
  rep.dtheta = j.at("dtheta").get<double>();
  rep.max_violation = j.at("max_violation").get<double>();
  rep.tolerance = j.at("tolerance").get<double>();
  rep.violation_profile = j.at("violation_profile").get<std::vector<double>>();
  const auto& c = j.at("convex_means");
  rep.convex.checked = c.at("checked").get<bool>();
  rep.convex.pass = c.at("pass").get<bool>();
  rep.convex.all_convex = c.at("all_convex").get<bool>();
  rep.convex.worst_margin = c.at("worst_margin").get<double>();
  rep.convex.tolerance = c.at("tolerance").get<double>();
  rep.convex.star_agrees = c.at("star_agrees").get<bool>();
  const auto& l = j.at("lp");
  rep.lp.applicable = l.at("applicable").get<bool>();
  rep.lp.hypothesis = l.at("hypothesis").get<std::string>();
  rep.lp.pass = l.at("pass").get<bool>();
  rep.lp.worst_margin = l.at("worst_margin").get<double>();
  for (const auto& row : l.at("rows")) {
    LpRow r;
    r.name = row.at("name").get<std::string>();
    r.lhs = row.at("u").get<double>();
    r.rhs = row.at("v").get<double>();
    r.margin = row.at("margin").get<double>();
    rep.lp.rows.push_back(r);
  }
  rep.mean_equality_defect = optional_from_json(j, "mean_equality_defect");
  rep.flux_constancy_defect = optional_from_json(j, "flux_constancy_defect");
  rep.flux_k1 = optional_from_json(j, "flux_k1");
  rep.v_symmetrization_defect = optional_from_json(j, "v_symmetrization_defect");
  rep.subharmonicity_margin = optional_from_json(j, "subharmonicity_margin");
  rep.subharmonicity_tol = optional_from_json(j, "subharmonicity_tol");
  rep.commutativity_defect = optional_from_json(j, "commutativity_defect");
  rep.commutativity_tol = optional_from_json(j, "commutativity_tol");
  rep.interior_residual_u = j.at("interior_residual_u").get<double>();
  rep.interior_residual_v = j.at("interior_residual_v").get<double>();
  rep.boundary_residual_u = j.at("boundary_residual_u").get<double>();
  rep.boundary_residual_v = j.at("boundary_residual_v").get<double>();
  rep.source_inf_norm = j.at("source_inf_norm").get<double>();
  rep.pass = j.at("pass").get<bool>();
  rep.failures = j.at("failures").get<std::vector<std::string>>();
  rep.error = j.at("error").get<std::string>();
  return rep;
}

ordered_json config_to_json(const SuiteConfig& config) {
  ordered_json j;
  j["schema_version"] = config.schema_version;
  j["tolerance"] = {{"c_tol", config.tolerance.c_tol},
                    {"violation_floor", config.tolerance.violation_floor}};
  j["output"] = {{"dir", config.out_dir}};
  j["jobs"] = config.jobs;
  ordered_json arr = ordered_json::array();
  for (const auto& sc : config.scenarios) {
    ordered_json s;
    s["id"] = sc.id;
    s["domain"] = to_string(sc.domain);
    if (sc.domain == DomainKind::annulus2d || sc.domain == DomainKind::shell3d_axisym)
      s["geometry"] = {{"a", sc.geom_a}, {"b", sc.geom_b}};
    else if (sc.domain == DomainKind::cylinder_rect)
      s["geometry"] = {{"length", sc.length}, {"height", sc.height}};
    else
      s["geometry"] = {{"radius", sc.geom_b}};
    s["alpha"] = {sc.alpha1, sc.alpha2};
    if (sc.domain == DomainKind::cylinder_rect)
      s["grid"] = {{"nx", sc.n_radial}, {"ny", sc.n_angular}};
    else
      s["grid"] = {{"radial", sc.n_radial}, {"angular", sc.n_angular}};
    s["source"] = {{"kind", to_string(sc.source.kind)},
                   {"seed", sc.source.seed},
                   {"max_mode", sc.source.max_mode},
                   {"amplitude", sc.source.amplitude},
                   {"project_zero_mean", sc.source.project_zero_mean}};
    s["refinement_levels"] = sc.refinement_levels;
    s["emit_plot_data"] = sc.emit_plot_data;
    arr.push_back(s);
  }
  j["scenarios"] = arr;
  return j;
}

std::string csv_summary(const std::vector<ComparisonReport>& reports) {
  std::ostringstream out;
  out.precision(17);
  out << "scenario_id,seed,domain,alpha1,alpha2,n_radial,n_angular,"
         "max_violation,tolerance,verdict,mean_equality_defect,"
         "flux_constancy_defect,v_symmetrization_defect,subharmonicity_margin,"
         "commutativity_defect,convex_worst_margin,lp_worst_margin,"
         "interior_residual_u,error\n";
  const auto opt = [](const std::optional<double>& v) {
    return v ? std::to_string(*v) : std::string("");
  };
  for (const auto& r : reports) {
    out << r.scenario_id << ',' << r.seed << ',' << to_string(r.domain) << ','
        << r.alpha_inner << ',' << r.alpha_outer << ',' << r.n_radial << ','
        << r.n_angular << ',' << r.max_violation << ',' << r.tolerance << ','
        << (r.error.empty() ? (r.pass ? "pass" : "fail") : "error") << ','
        << opt(r.mean_equality_defect) << ',' << opt(r.flux_constancy_defect)
        << ',' << opt(r.v_symmetrization_defect) << ','
        << opt(r.subharmonicity_margin) << ',' << opt(r.commutativity_defect)
        << ',' << r.convex.worst_margin << ',' << r.lp.worst_margin << ','
        << r.interior_residual_u << ',' << r.error << "\n";
  }
  return out.str();
}

void write_suite_outputs(const SuiteConfig& config,
                         const std::vector<ScenarioOutcome>& outcomes) {
  namespace fs = std::filesystem;
  const fs::path dir(config.out_dir);

  ordered_json top;
  top["schema_version"] = config.schema_version;
  top["config"] = config_to_json(config);
  ordered_json arr = ordered_json::array();
  std::size_t passed = 0, violations = 0, errors = 0;
  std::vector<ComparisonReport> reports;
  for (const auto& oc : outcomes) {
    arr.push_back(report_to_json(oc.report));
    reports.push_back(oc.report);
    if (!oc.report.error.empty())
      ++errors;
    else if (oc.report.pass)
      ++passed;
    else
      ++violations;
  }
  top["reports"] = arr;
  top["summary"] = {{"total", outcomes.size()},
                    {"passed", passed},
                    {"violations", violations},
                    {"errors", errors}};
  write_file(dir / "reports.json", top.dump(2) + "\n");
  write_file(dir / "summary.csv", csv_summary(reports));

  for (const auto& oc : outcomes) {
    if (!oc.plot) continue;
    std::ostringstream out;
    out.precision(17);
    out << "axis1,axis2,violation\n";
    const auto& p = *oc.plot;
    for (std::size_t i = 0; i < p.axis1.size(); ++i)
      for (std::size_t k = 0; k < p.axis2.size(); ++k)
        out << p.axis1[i] << ',' << p.axis2[k] << ','
            << p.violation[i * p.axis2.size() + k] << "\n";
    write_file(dir / (oc.report.scenario_id + "_violation.csv"), out.str());
  }

  // wall-clock data lives apart from the reproducible reports
  ordered_json meta;
  const auto now = std::chrono::system_clock::now().time_since_epoch();
  meta["timestamp_unix_ms"] =
      std::chrono::duration_cast<std::chrono::milliseconds>(now).count();
  meta["threads"] = par::max_threads();
  write_file(dir / "metadata.json", meta.dump(2) + "\n");
}

}  // namespace starcmp
