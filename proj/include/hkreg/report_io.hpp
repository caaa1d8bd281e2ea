#pragma once

#include <string>

#include "hkreg/config.hpp"
#include "hkreg/solver.hpp"
#include "hkreg/theorem_harness.hpp"

namespace hkreg {

/// 17 significant digits; round-trips doubles bit-stably.
std::string format_g17(double v);

/// CSV with a "# schema_version 1" comment line, a header row, and g17 floats.
void write_csv(const std::string& path, const std::vector<std::string>& columns,
               const std::vector<std::vector<double>>& rows);

void write_json_file(const std::string& path, const Json& j);

Json model_to_json(const FittedModel& model);
Json report_to_json(const TheoremReport& report);

/// Writes <theorem_id>_<seed>.json and .csv under dir; returns the two paths.
std::pair<std::string, std::string> write_theorem_report(const std::string& dir,
                                                         const TheoremReport& report);

void write_predictions_csv(const std::string& path, const FittedModel& model, const Points& probe);
void write_dataset_csv(const std::string& path, const Dataset& data);
void write_rate_summary_csv(const std::string& path, const std::vector<RateSummaryRow>& rows);

}  // namespace hkreg
