#ifndef STARCMP_REPORT_IO_HPP
#define STARCMP_REPORT_IO_HPP

#include <string>
#include <vector>

#include <json.hpp>

#include "starcmp/compare_harness.hpp"
#include "starcmp/scenario.hpp"

namespace starcmp {

// Report serialization is byte-deterministic for fixed inputs: ordered keys,
// shortest-roundtrip doubles, no timestamps (wall-clock metadata goes to the
// separate metadata.json).
nlohmann::ordered_json report_to_json(const ComparisonReport& rep);
ComparisonReport report_from_json(const nlohmann::json& j);

nlohmann::ordered_json config_to_json(const SuiteConfig& config);

// flat CSV: one row per scenario
std::string csv_summary(const std::vector<ComparisonReport>& reports);

// writes reports.json / summary.csv / <id>_violation.csv / metadata.json;
// throws std::runtime_error on IO failure
void write_suite_outputs(const SuiteConfig& config,
                         const std::vector<ScenarioOutcome>& outcomes);

}  // namespace starcmp

#endif
