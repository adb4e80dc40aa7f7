#include "fingerlab/eval/report.hpp"

#include <cstdio>
#include <fstream>
#include <set>

#include "csv_util.hpp"
#include "fingerlab/error.hpp"

namespace fingerlab::eval {

namespace {

bool valid_name(const std::string& name) {
    if (name.empty()) return false;
    for (const char c : name) {
        const bool ok = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '.' ||
                        c == '_' || c == '-';
        if (!ok) return false;
    }
    return true;
}

std::string far_column(double target) { return "FAR " + detail::format_double(target * 100.0) + "%"; }

std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write " + path.string());
    return out;
}

void finish(std::ofstream& out, const std::filesystem::path& path) {
    out.close();
    if (!out) throw Error("failed writing " + path.string());
}

std::string fixed1(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.1f", v);
    return buf;
}

std::string fixed3(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.3f", v);
    return buf;
}

}  // namespace

void write_counts_csv(std::ostream& out, const std::vector<CountRow>& rows) {
    out << "label,images,mean,std,min,max\n";
    for (const auto& row : rows) {
        out << row.label << ',' << row.stats.images << ',' << fixed3(row.stats.mean) << ',' << fixed3(row.stats.std)
            << ',' << row.stats.min << ',' << row.stats.max << '\n';
    }
}

std::string format_gar_cell(const OperatingPoint& p) {
    return fixed1(p.ci_low * 100.0) + " - " + fixed1(p.gar * 100.0) + " - " + fixed1(p.ci_high * 100.0);
}

std::vector<ScenarioSummary> summarize(const ReportInput& input) {
    if (input.scenarios.empty()) throw InvalidArgument("report needs at least one scenario");
    std::set<std::string> names;
    for (const auto& s : input.scenarios) {
        if (!valid_name(s.name)) throw InvalidArgument("bad scenario name '" + s.name + "'");
        if (!names.insert(s.name).second) throw InvalidArgument("duplicate scenario name '" + s.name + "'");
    }
    std::vector<ScenarioSummary> out;
    for (const auto& s : input.scenarios) {
        const auto roc = compute_roc(s.scores);
        ScenarioSummary summary{s.name, {}};
        for (const double t : input.far_targets) summary.points.push_back(gar_at_far(roc, t));
        out.push_back(std::move(summary));
    }
    return out;
}

std::vector<ScenarioSummary> emit_report(const ReportInput& input, const std::filesystem::path& dir) {
    const auto summaries = summarize(input);
    std::error_code ec;
    std::filesystem::create_directories(dir, ec);
    if (ec) throw Error("cannot create " + dir.string() + ": " + ec.message());

    {
        const auto path = dir / "counts.csv";
        auto out = open_output(path);
        write_counts_csv(out, input.counts);
        finish(out, path);
    }
    {
        const auto path = dir / "gar_table.csv";
        auto out = open_output(path);
        out << "scenario,genuine,imposter,rejected %";
        for (const double t : input.far_targets) out << ',' << far_column(t);
        out << '\n';
        for (std::size_t i = 0; i < summaries.size(); ++i) {
            const auto& s = input.scenarios[i];
            out << s.name << ',' << s.scores.genuine_scores().size() << ',' << s.scores.imposter_scores().size() << ',';
            if (s.rejection_fraction) out << fixed1(*s.rejection_fraction * 100.0);
            for (const auto& p : summaries[i].points) out << ',' << format_gar_cell(p);
            out << '\n';
        }
        finish(out, path);
    }
    {
        const auto path = dir / "gar_points.csv";
        auto out = open_output(path);
        out << "scenario,target_far,threshold,achieved_far,gar,ci_low,ci_high\n";
        for (const auto& s : summaries) {
            for (const auto& p : s.points) {
                out << s.name << ',' << detail::format_double(p.target_far) << ','
                    << detail::format_double(p.threshold) << ',' << detail::format_double(p.achieved_far) << ','
                    << detail::format_double(p.gar) << ',' << detail::format_double(p.ci_low) << ','
                    << detail::format_double(p.ci_high) << '\n';
            }
        }
        finish(out, path);
    }
    for (const auto& s : input.scenarios) {
        const auto path = dir / ("roc_" + s.name + ".csv");
        auto out = open_output(path);
        out << "threshold,far,gar\n";
        for (const auto& p : compute_roc(s.scores).points) {
            out << detail::format_double(p.threshold) << ',' << detail::format_double(p.far) << ','
                << detail::format_double(p.gar) << '\n';
        }
        finish(out, path);
    }
    return summaries;
}

}  // namespace fingerlab::eval
