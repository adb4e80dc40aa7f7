#pragma once

#include <filesystem>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "fingerlab/dataset/stats.hpp"
#include "fingerlab/eval/protocol.hpp"
#include "fingerlab/eval/roc.hpp"

namespace fingerlab::eval {

// FAR targets of the usual GAR table: 0.001 %, 0.01 %, 0.1 %.
inline const std::vector<double> kDefaultFarTargets{1e-5, 1e-4, 1e-3};

struct ScenarioResult {
    std::string name;  // [A-Za-z0-9._-]+, used in file names
    ScoreSet scores;
    std::optional<double> rejection_fraction;
};

struct CountRow {
    std::string label;
    dataset::CountStats stats;
};

struct ReportInput {
    std::vector<CountRow> counts;
    std::vector<ScenarioResult> scenarios;
    std::vector<double> far_targets = kDefaultFarTargets;
};

struct ScenarioSummary {
    std::string name;
    std::vector<OperatingPoint> points;  // one per FAR target
};

// `label,images,mean,std,min,max`, statistics with three decimals.
void write_counts_csv(std::ostream& out, const std::vector<CountRow>& rows);

// "low - value - high" in percent with one decimal, e.g. "89.2 - 90.0 - 90.8".
std::string format_gar_cell(const OperatingPoint& point);

std::vector<ScenarioSummary> summarize(const ReportInput& input);

// Writes counts.csv, gar_table.csv, gar_points.csv and roc_<name>.csv into
// `dir` (created if needed). Throws InvalidArgument without scenarios or
// with bad/duplicate names, Error on filesystem failures.
std::vector<ScenarioSummary> emit_report(const ReportInput& input, const std::filesystem::path& dir);

}  // namespace fingerlab::eval
