#include "fingerlab/cli/cli.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>

#include "fingerlab/dataset/labels.hpp"
#include "fingerlab/dataset/manifest.hpp"
#include "fingerlab/dataset/stats.hpp"
#include "fingerlab/dataset/templates.hpp"
#include "fingerlab/eval/pairs.hpp"
#include "fingerlab/eval/protocol.hpp"
#include "fingerlab/eval/quality.hpp"
#include "fingerlab/eval/report.hpp"
#include "fingerlab/fmr/codec.hpp"
#include "fingerlab/fmr/text_form.hpp"
#include "fingerlab/fmr/validate.hpp"
#include "fingerlab/marking/http_api.hpp"
#include "fingerlab/marking/schedule.hpp"
#include "fingerlab/marking/service.hpp"
#include "fingerlab/matcher/matcher.hpp"

namespace fingerlab::cli {

namespace fs = std::filesystem;

namespace {

// Raised for bad flag combinations the parser cannot express.
class UsageError : public Error {
public:
    using Error::Error;
};

// Writes to a file, or to `fallback` when the path is empty or "-".
class Output {
public:
    Output(const std::string& path, std::ostream& fallback) : path_(path) {
        if (path.empty() || path == "-") {
            stream_ = &fallback;
            return;
        }
        if (fs::path(path).has_parent_path()) fs::create_directories(fs::path(path).parent_path());
        file_.open(path, std::ios::binary | std::ios::trunc);
        if (!file_) throw Error("cannot write " + path);
        stream_ = &file_;
    }
    std::ostream& stream() { return *stream_; }
    void close() {
        if (!file_.is_open()) return;
        file_.close();
        if (!file_) throw Error("failed writing " + path_);
    }

private:
    std::string path_;
    std::ofstream file_;
    std::ostream* stream_ = nullptr;
};

std::ifstream open_input(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path);
    return in;
}

// "label=path", or a bare path labelled by its last component.
std::pair<std::string, std::string> labelled(const std::string& arg) {
    const auto eq = arg.find('=');
    if (eq != std::string::npos) return {arg.substr(0, eq), arg.substr(eq + 1)};
    auto name = fs::path(arg).lexically_normal().filename().string();
    if (name.empty()) name = fs::path(arg).lexically_normal().parent_path().filename().string();
    return {name, arg};
}

// How an invocation names the set of images: a manifest, or the F×K shape.
struct ShapeArgs {
    std::string manifest;
    std::string db = "DB";
    int fingers = 0;
    int impressions = 0;

    void add_to(CLI::App* app) {
        app->add_option("--manifest", manifest, "Database manifest (JSON)");
        app->add_option("--db", db, "Database id when no manifest is given")->capture_default_str();
        app->add_option("--fingers", fingers, "Number of fingers F")->check(CLI::PositiveNumber);
        app->add_option("--impressions", impressions, "Impressions per finger K")->check(CLI::PositiveNumber);
    }
    void require() const {
        if (!manifest.empty() && (fingers > 0 || impressions > 0)) {
            throw UsageError("--manifest and --fingers/--impressions are mutually exclusive");
        }
        if (manifest.empty() && (fingers <= 0 || impressions <= 0)) {
            throw UsageError("give --manifest or both --fingers and --impressions");
        }
    }
};

struct MatcherArgs {
    matcher::MatcherParams params;
    std::string external;
    int workers = 1;

    void add_to(CLI::App* app) {
        app->add_option("--distance-tolerance", params.distance_tolerance, "Pair distance in pixels at 197 px/cm")
            ->capture_default_str();
        app->add_option("--angle-tolerance", params.angle_tolerance, "Pair direction difference in degrees")
            ->capture_default_str();
        app->add_option("--min-overlap", params.min_overlap, "Pairs below this score 0")->capture_default_str();
        app->add_option("--external", external, "External matcher command, run as CMD PROBE GALLERY");
        app->add_option("--workers", workers, "Worker threads")->check(CLI::PositiveNumber)->capture_default_str();
    }
};

std::vector<eval::MatchPair> pairs_from_shape(const ShapeArgs& shape) {
    shape.require();
    if (!shape.manifest.empty()) return eval::generate_match_pairs(dataset::load_manifest(shape.manifest));
    return eval::generate_match_pairs(shape.db, shape.fingers, shape.impressions);
}

eval::QualityLabels load_quality(const std::string& path) {
    const auto labels = dataset::ingest_quality_csv(path);
    return eval::QualityLabels(labels.begin(), labels.end());
}

// Adds "<name>-filtered" scenarios after the unfiltered ones.
std::vector<eval::ScenarioResult> scenarios_with_quality(std::vector<eval::ScenarioResult> scenarios,
                                                         const std::optional<eval::QualityLabels>& labels) {
    if (!labels) return scenarios;
    const auto n = scenarios.size();
    for (std::size_t i = 0; i < n; ++i) {
        double rejected = 0.0;
        auto filtered = eval::filter_by_quality(scenarios[i].scores, *labels, &rejected);
        scenarios.push_back({scenarios[i].name + "-filtered", std::move(filtered), rejected});
    }
    return scenarios;
}

void print_summaries(std::ostream& out, const std::vector<eval::ScenarioSummary>& summaries) {
    for (const auto& s : summaries) {
        out << s.name;
        for (const auto& p : s.points) {
            char buf[64];
            std::snprintf(buf, sizeof buf, "%g%%", p.target_far * 100.0);
            out << "  FAR " << buf << ": " << eval::format_gar_cell(p);
        }
        out << '\n';
    }
}

// validate ------------------------------------------------------------------

struct ValidateArgs {
    std::vector<std::string> paths;
    bool strict = false;
    std::string manifest;
};

std::vector<fs::path> expand_templates(const std::vector<std::string>& paths) {
    std::vector<fs::path> files;
    for (const auto& p : paths) {
        if (fs::is_directory(p)) {
            std::vector<fs::path> found;
            for (const auto& e : fs::directory_iterator(p)) {
                if (e.is_regular_file() && e.path().extension() == ".iso-fmr") found.push_back(e.path());
            }
            std::sort(found.begin(), found.end());
            files.insert(files.end(), found.begin(), found.end());
        } else {
            files.emplace_back(p);
        }
    }
    return files;
}

int cmd_validate(const ValidateArgs& a, std::ostream& out, std::ostream& err) {
    fmr::ValidateOptions options;
    options.strict = a.strict;
    if (!a.manifest.empty()) {
        const auto m = dataset::load_manifest(a.manifest);
        options.bound_width = m.spec.image_width;
        options.bound_height = m.spec.image_height;
    }
    std::size_t valid = 0, invalid = 0;
    for (const auto& path : expand_templates(a.paths)) {
        try {
            const auto record = fmr::decode_record(dataset::read_file_bytes(path));
            const auto violations = fmr::validate_record(record, options);
            if (violations.empty()) {
                ++valid;
                continue;
            }
            ++invalid;
            for (const auto& v : violations) err << path.string() << ": " << v.code << " at " << v.path << ": " << v.message << '\n';
        } catch (const fmr::DecodeError& e) {
            ++invalid;
            err << path.string() << ": " << fmr::to_string(e.kind()) << " at byte " << e.offset() << ": " << e.what()
                << '\n';
        } catch (const Error& e) {
            ++invalid;
            err << path.string() << ": " << e.what() << '\n';
        }
    }
    out << valid << " valid";
    if (invalid) out << ", " << invalid << " invalid";
    out << '\n';
    if (invalid) err << invalid << " of " << valid + invalid << " templates failed\n";
    return invalid ? kExitDataError : kExitOk;
}

// convert -------------------------------------------------------------------

struct ConvertArgs {
    std::string input;
    std::string output;
    std::string to;
};

int cmd_convert(const ConvertArgs& a, std::ostream& out, std::ostream&) {
    const auto bytes = dataset::read_file_bytes(a.input);
    const bool binary_in = bytes.size() >= 4 && bytes[0] == 'F' && bytes[1] == 'M' && bytes[2] == 'R' && bytes[3] == 0;
    const auto record = binary_in ? fmr::decode_record(bytes)
                                  : fmr::from_text(std::string_view(reinterpret_cast<const char*>(bytes.data()), bytes.size()));
    const std::string to = a.to.empty() ? (binary_in ? "text" : "binary") : a.to;
    Output o(a.output, out);
    if (to == "text") {
        o.stream() << fmr::to_text(record);
    } else {
        const auto encoded = fmr::encode_record(record);
        o.stream().write(reinterpret_cast<const char*>(encoded.data()), static_cast<std::streamsize>(encoded.size()));
    }
    o.close();
    return kExitOk;
}

// stats ---------------------------------------------------------------------

struct StatsArgs {
    std::string manifest;
    std::vector<std::string> templates;
    std::string histogram;
    std::string out;
};

int cmd_stats(const StatsArgs& a, std::ostream& out, std::ostream& err) {
    std::optional<dataset::DatabaseManifest> manifest;
    if (!a.manifest.empty()) manifest = dataset::load_manifest(a.manifest);
    if (a.templates.empty() && a.histogram.empty()) throw UsageError("give --templates or --histogram");
    if (!a.histogram.empty() && !manifest) throw UsageError("--histogram needs --manifest");
    Output o(a.out, out);
    if (!a.templates.empty()) {
        std::vector<eval::CountRow> rows;
        for (const auto& arg : a.templates) {
            const auto [label, dir] = labelled(arg);
            const auto set = manifest ? dataset::load_template_set(*manifest, dir) : dataset::load_template_dir(dir);
            for (const auto& f : set.failures) err << "warning: " << f.ref.label() << ": " << f.message << '\n';
            if (!set.missing.empty()) err << "warning: " << label << ": " << set.missing.size() << " templates missing\n";
            rows.push_back({label, dataset::minutiae_count_stats(set.records)});
        }
        eval::write_counts_csv(o.stream(), rows);
    }
    if (!a.histogram.empty()) {
        const auto source = a.histogram == "nfiq" ? dataset::QualitySource::nfiq : dataset::QualitySource::perceived;
        const auto h = dataset::quality_histogram(*manifest, source);
        o.stream() << "bucket,images,fraction\n";
        for (const auto& [bucket, n] : h.buckets) {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.3f", h.fraction(bucket));
            o.stream() << bucket << ',' << n << ',' << buf << '\n';
        }
        if (h.unlabeled) o.stream() << "unlabeled," << h.unlabeled << ",\n";
    }
    o.close();
    return kExitOk;
}

// pairs ---------------------------------------------------------------------

struct PairsArgs {
    ShapeArgs shape;
    std::string out;
};

int cmd_pairs(const PairsArgs& a, std::ostream& out, std::ostream&) {
    const auto pairs = pairs_from_shape(a.shape);
    Output o(a.out, out);
    eval::write_pairs_csv(o.stream(), pairs);
    o.close();
    if (!a.out.empty() && a.out != "-") {
        const auto c = eval::count_pairs(pairs);
        out << pairs.size() << " pairs (" << c.genuine << " genuine, " << c.imposter << " imposter)\n";
    }
    return kExitOk;
}

// eval ----------------------------------------------------------------------

struct EvalArgs {
    std::string pairs;
    ShapeArgs shape;
    std::string templates_a;
    std::string templates_b;
    std::string name_a = "a";
    std::string name_b = "b";
    MatcherArgs matcher;
    std::string out;
    std::string report;
    std::string quality;
    std::vector<double> far = eval::kDefaultFarTargets;
};

eval::ScoreSet score_templates(const std::vector<eval::MatchPair>& pairs, const std::string& dir,
                               const std::string& name, const EvalArgs& a, std::ostream& err,
                               std::vector<eval::CountRow>& counts) {
    eval::ProtocolOptions options;
    options.workers = a.matcher.workers;
    options.extractor = name;
    const std::string db_id = pairs.empty() ? std::string() : pairs.front().probe.db_id;
    if (!a.matcher.external.empty()) {
        options.matcher = a.matcher.external;
        const auto set = dataset::load_template_dir(dir, db_id);
        counts.push_back({name, dataset::minutiae_count_stats(set.records)});
        return eval::execute_protocol(pairs, eval::external_matcher(a.matcher.external, eval::template_paths(pairs, dir)),
                                      options);
    }
    dataset::TemplateSet set;
    if (!a.shape.manifest.empty()) {
        set = dataset::load_template_set(dataset::load_manifest(a.shape.manifest), dir);
        for (const auto& v : set.violations) {
            err << "warning: " << v.ref.label() << ": " << v.violation.code << " at " << v.violation.path << '\n';
        }
    } else {
        set = dataset::load_template_dir(dir, db_id);
    }
    for (const auto& f : set.failures) err << "warning: " << f.ref.label() << ": " << f.message << '\n';
    counts.push_back({name, dataset::minutiae_count_stats(set.records)});
    const matcher::Matcher m(a.matcher.params);
    auto scores = eval::execute_protocol(pairs, set.records, m, options);
    scores.db_id = db_id;
    return scores;
}

void write_scores_file(const fs::path& path, const eval::ScoreSet& scores) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw Error("cannot write " + path.string());
    eval::write_scores_csv(f, scores);
    f.close();
    if (!f) throw Error("failed writing " + path.string());
}

int cmd_eval(const EvalArgs& a, std::ostream& out, std::ostream& err) {
    matcher::validate(a.matcher.params);
    std::vector<eval::MatchPair> pairs;
    if (!a.pairs.empty()) {
        if (a.shape.fingers > 0 || a.shape.impressions > 0) throw UsageError("--pairs excludes --fingers/--impressions");
        auto in = open_input(a.pairs);
        pairs = eval::read_pairs_csv(in);
    } else {
        pairs = pairs_from_shape(a.shape);
    }
    if (!a.templates_b.empty() && a.report.empty() && a.out.empty()) {
        throw UsageError("two template sets need --report or --out");
    }
    if (!a.templates_b.empty() && a.name_a == a.name_b) throw UsageError("--name-a and --name-b must differ");

    std::vector<eval::CountRow> counts;
    std::vector<eval::ScenarioResult> scenarios;
    scenarios.push_back({a.name_a, score_templates(pairs, a.templates_a, a.name_a, a, err, counts), std::nullopt});
    if (!a.templates_b.empty()) {
        scenarios.push_back({a.name_b, score_templates(pairs, a.templates_b, a.name_b, a, err, counts), std::nullopt});
    }

    if (!a.out.empty()) {
        if (scenarios.size() == 1) {
            Output o(a.out, out);
            eval::write_scores_csv(o.stream(), scenarios[0].scores);
            o.close();
        } else {
            // Several score sets: --out names a directory.
            fs::create_directories(a.out);
            for (const auto& s : scenarios) write_scores_file(fs::path(a.out) / ("scores_" + s.name + ".csv"), s.scores);
        }
    }
    if (!a.report.empty()) {
        fs::create_directories(a.report);
        for (const auto& s : scenarios) write_scores_file(fs::path(a.report) / ("scores_" + s.name + ".csv"), s.scores);
        std::optional<eval::QualityLabels> labels;
        if (!a.quality.empty()) labels = load_quality(a.quality);
        eval::ReportInput input{counts, scenarios_with_quality(scenarios, labels), a.far};
        print_summaries(out, eval::emit_report(input, a.report));
    }
    if (a.out.empty() && a.report.empty()) eval::write_scores_csv(out, scenarios[0].scores);
    return kExitOk;
}

// report --------------------------------------------------------------------

struct ReportArgs {
    std::vector<std::string> scores;
    std::vector<std::string> counts;
    std::string manifest;
    std::string quality;
    std::vector<double> far = eval::kDefaultFarTargets;
    std::string out;
};

int cmd_report(const ReportArgs& a, std::ostream& out, std::ostream& err) {
    std::optional<dataset::DatabaseManifest> manifest;
    if (!a.manifest.empty()) manifest = dataset::load_manifest(a.manifest);
    std::vector<eval::ScenarioResult> scenarios;
    for (const auto& arg : a.scores) {
        auto [name, path] = labelled(arg);
        if (arg.find('=') == std::string::npos) name = fs::path(path).stem().string();
        auto in = open_input(path);
        scenarios.push_back({name, eval::read_scores_csv(in), std::nullopt});
    }
    std::vector<eval::CountRow> counts;
    for (const auto& arg : a.counts) {
        const auto [label, dir] = labelled(arg);
        const auto set = manifest ? dataset::load_template_set(*manifest, dir) : dataset::load_template_dir(dir);
        for (const auto& f : set.failures) err << "warning: " << f.ref.label() << ": " << f.message << '\n';
        counts.push_back({label, dataset::minutiae_count_stats(set.records)});
    }
    std::optional<eval::QualityLabels> labels;
    if (!a.quality.empty()) {
        labels = load_quality(a.quality);
    } else if (manifest) {
        const auto from_manifest = dataset::quality_labels(*manifest);
        if (!from_manifest.empty()) labels = eval::QualityLabels(from_manifest.begin(), from_manifest.end());
    }
    eval::ReportInput input{counts, scenarios_with_quality(std::move(scenarios), labels), a.far};
    print_summaries(out, eval::emit_report(input, a.out));
    return kExitOk;
}

// schedule ------------------------------------------------------------------

struct ScheduleArgs {
    ShapeArgs shape;
    int subjects = 4;
    int capacity = 14;
    std::string out;
};

int cmd_schedule(const ScheduleArgs& a, std::ostream& out, std::ostream&) {
    a.shape.require();
    const auto schedule =
        a.shape.manifest.empty()
            ? marking::generate_marking_schedule(a.shape.db, a.shape.fingers, a.shape.impressions, a.subjects, a.capacity)
            : marking::generate_marking_schedule(dataset::load_manifest(a.shape.manifest), a.subjects, a.capacity);
    Output o(a.out, out);
    marking::write_schedule_csv(o.stream(), schedule);
    o.close();
    return kExitOk;
}

// serve / export --------------------------------------------------------------

struct ServiceArgs {
    std::string config;
    std::string data_root;
    std::string host;
    int port = -1;
    int subjects = 0;
    int capacity = 0;
    std::vector<std::string> manifests;

    void add_to(CLI::App* app, bool network) {
        app->add_option("--config", config, "Service config file (JSON)");
        app->add_option("--data-root", data_root, "Marking data directory");
        if (network) {
            app->add_option("--host", host, "Listen address");
            app->add_option("--port", port, "Listen port (0 = any free port)")->check(CLI::Range(0, 65535));
            app->add_option("--subjects", subjects, "Marking subjects S")->check(CLI::PositiveNumber);
            app->add_option("--capacity", capacity, "Images per subject per day")->check(CLI::PositiveNumber);
            app->add_option("--manifest", manifests, "Register a database manifest (repeatable)");
        }
    }

    marking::ServiceConfig resolve() const {
        auto c = marking::load_service_config(config.empty() ? std::nullopt : std::optional<fs::path>(config));
        if (!data_root.empty()) c.data_root = data_root;
        if (!host.empty()) c.host = host;
        if (port >= 0) c.port = port;
        if (subjects > 0) c.subjects = subjects;
        if (capacity > 0) c.capacity = capacity;
        for (const auto& m : manifests) c.manifests.emplace_back(m);
        return c;
    }
};

int cmd_serve(const ServiceArgs& a, std::ostream& out, std::ostream&) {
    const auto config = a.resolve();
    marking::MarkingService service(config);
    marking::HttpApi api(service);
    const int port = api.bind(config.host, config.port);
    out << "serving " << service.databases().size() << " database(s) on http://" << config.host << ':' << port
        << "/api/v1\n"
        << std::flush;
    api.serve();
    return kExitOk;
}

struct ExportArgs {
    ServiceArgs service;
    std::string db;
    std::string out;
};

int cmd_export(const ExportArgs& a, std::ostream& out, std::ostream&) {
    marking::MarkingService service(a.service.resolve());
    const auto report = service.export_database(a.db, a.out);
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.1f", report.completeness * 100.0);
    out << "exported " << report.final_templates << " of " << report.total << " templates (" << buf
        << "% complete) to " << a.out << '\n';
    return kExitOk;
}

}  // namespace

int run_command(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app("Fingerprint template toolkit: ISO minutiae records, matching protocol and marking service.",
                 "fingerlab");
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "Help for every subcommand");

    ValidateArgs validate_args;
    auto* validate = app.add_subcommand("validate", "Decode and validate ISO minutiae templates");
    validate->add_option("paths", validate_args.paths, "Template files or directories")->required();
    validate->add_flag("--strict", validate_args.strict, "Also require quality > 0 and a known finger");
    validate->add_option("--manifest", validate_args.manifest, "Check coordinates against the database image size");

    ConvertArgs convert_args;
    auto* convert = app.add_subcommand("convert", "Convert between binary and text template forms");
    convert->add_option("input", convert_args.input, "Input template")->required();
    convert->add_option("output", convert_args.output, "Output path ('-' for stdout)")->required();
    convert->add_option("--to", convert_args.to, "Output form; default is the other form")
        ->check(CLI::IsMember({"text", "binary"}));

    StatsArgs stats_args;
    auto* stats = app.add_subcommand("stats", "Minutiae count statistics per template set");
    stats->add_option("--manifest", stats_args.manifest, "Database manifest");
    stats->add_option("--templates", stats_args.templates, "[label=]directory (repeatable)");
    stats->add_option("--histogram", stats_args.histogram, "Quality histogram from the manifest labels")
        ->check(CLI::IsMember({"perceived", "nfiq"}));
    stats->add_option("--out", stats_args.out, "Output CSV (default stdout)");

    PairsArgs pairs_args;
    auto* pairs = app.add_subcommand("pairs", "Write the matching protocol pair list");
    pairs_args.shape.add_to(pairs);
    pairs->add_option("--out", pairs_args.out, "Output CSV (default stdout)");

    EvalArgs eval_args;
    auto* evalc = app.add_subcommand("eval", "Score protocol pairs with the reference or an external matcher");
    evalc->add_option("--pairs", eval_args.pairs, "Pair CSV from `pairs`");
    eval_args.shape.add_to(evalc);
    evalc->add_option("--templates-a", eval_args.templates_a, "Template directory")->required();
    evalc->add_option("--templates-b", eval_args.templates_b, "Second template directory, scored on the same pairs");
    evalc->add_option("--name-a", eval_args.name_a, "Scenario name of the first set")->capture_default_str();
    evalc->add_option("--name-b", eval_args.name_b, "Scenario name of the second set")->capture_default_str();
    eval_args.matcher.add_to(evalc);
    evalc->add_option("--out", eval_args.out, "Scores CSV (a directory with two template sets)");
    evalc->add_option("--report", eval_args.report, "Write scores and a report bundle into this directory");
    evalc->add_option("--quality", eval_args.quality, "Perceived quality labels CSV; adds filtered scenarios");
    evalc->add_option("--far", eval_args.far, "FAR targets for the GAR table")->capture_default_str();

    ReportArgs report_args;
    auto* report = app.add_subcommand("report", "Build the report bundle from score CSVs");
    report->add_option("--scores", report_args.scores, "[name=]scores.csv (repeatable)")->required();
    report->add_option("--counts", report_args.counts, "[label=]template directory for counts.csv (repeatable)");
    report->add_option("--manifest", report_args.manifest, "Manifest; its quality labels are used without --quality");
    report->add_option("--quality", report_args.quality, "Perceived quality labels CSV; adds filtered scenarios");
    report->add_option("--far", report_args.far, "FAR targets")->capture_default_str();
    report->add_option("--out", report_args.out, "Output directory")->required();

    ScheduleArgs schedule_args;
    auto* schedule = app.add_subcommand("schedule", "Write the marking assignment schedule");
    schedule_args.shape.add_to(schedule);
    schedule->add_option("--subjects", schedule_args.subjects, "Marking subjects S")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    schedule->add_option("--capacity", schedule_args.capacity, "Images per subject per day")
        ->check(CLI::PositiveNumber)
        ->capture_default_str();
    schedule->add_option("--out", schedule_args.out, "Output CSV (default stdout)");

    ServiceArgs serve_args;
    auto* serve = app.add_subcommand("serve", "Run the marking service HTTP API");
    serve_args.add_to(serve, true);

    ExportArgs export_args;
    auto* exportc = app.add_subcommand("export", "Export final templates of a database");
    export_args.service.add_to(exportc, false);
    exportc->add_option("--db", export_args.db, "Database id")->required();
    exportc->add_option("--out", export_args.out, "Destination: a .zip file or a directory")->required();

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) {
            app.exit(e, out, err);
            return kExitOk;
        }
        err << "error: " << e.what() << '\n';
        const CLI::App* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
        err << sub->help();
        return kExitUsage;
    }

    try {
        if (*validate) return cmd_validate(validate_args, out, err);
        if (*convert) return cmd_convert(convert_args, out, err);
        if (*stats) return cmd_stats(stats_args, out, err);
        if (*pairs) return cmd_pairs(pairs_args, out, err);
        if (*evalc) return cmd_eval(eval_args, out, err);
        if (*report) return cmd_report(report_args, out, err);
        if (*schedule) return cmd_schedule(schedule_args, out, err);
        if (*serve) return cmd_serve(serve_args, out, err);
        if (*exportc) return cmd_export(export_args, out, err);
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const marking::ServiceError& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitDataError;
    }
    return kExitUsage;
}

}  // namespace fingerlab::cli
