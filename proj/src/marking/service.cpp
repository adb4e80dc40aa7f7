#include "fingerlab/marking/service.hpp"

#include <cmath>
#include <cstdlib>
#include <ctime>
#include <fstream>
#include <mutex>
#include <set>
#include <shared_mutex>
#include <sstream>

#include "fingerlab/dataset/image_io.hpp"
#include "fingerlab/dataset/templates.hpp"
#include "fingerlab/fmr/codec.hpp"
#include "json_form.hpp"
#include "zip_writer.hpp"

namespace fs = std::filesystem;

namespace fingerlab::marking {

using detail::json;

std::string_view to_string(TemplateStatus status) {
    switch (status) {
        case TemplateStatus::draft: return "draft";
        case TemplateStatus::marked: return "marked";
        case TemplateStatus::under_review: return "under_review";
        case TemplateStatus::final: return "final";
    }
    return "draft";
}

std::string_view to_string(ReviewAction action) { return action == ReviewAction::approve ? "approve" : "modify"; }

std::optional<ReviewAction> parse_review_action(std::string_view text) {
    if (text == "approve") return ReviewAction::approve;
    if (text == "modify") return ReviewAction::modify;
    return std::nullopt;
}

ValidationFailed::ValidationFailed(std::vector<fmr::Violation> violations)
    : ServiceError(422, "invalid-record", "template violates the record format:\n" + fmr::describe(violations)),
      violations_(std::move(violations)) {}

RevisionConflict::RevisionConflict(int current)
    : ServiceError(409, "revision-conflict", "template is at revision " + std::to_string(current)),
      current_(current) {}

namespace {

ServiceError not_found(const std::string& what) { return ServiceError(404, "not-found", what + " not found"); }

std::string read_text(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Write-then-rename so readers never see a partial file.
void write_atomic(const fs::path& path, const std::string& text) {
    fs::create_directories(path.parent_path());
    const auto tmp = fs::path(path.string() + ".tmp");
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        out << text;
        out.close();
        if (!out) throw Error("cannot write " + tmp.string());
    }
    fs::rename(tmp, path);
}

void append_line(const fs::path& path, const std::string& line) {
    fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::app);
    out << line << '\n';
    out.flush();
    if (!out) throw Error("cannot append to " + path.string());
}

std::int64_t epoch_day(std::chrono::system_clock::time_point t) {
    return std::chrono::floor<std::chrono::days>(t).time_since_epoch().count();
}

std::string iso_timestamp(std::chrono::system_clock::time_point t) {
    const std::time_t tt = std::chrono::system_clock::to_time_t(t);
    std::tm tm{};
    gmtime_r(&tt, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

int env_int(const char* name, int fallback) {
    const char* v = std::getenv(name);
    if (!v || !*v) return fallback;
    char* end = nullptr;
    const long n = std::strtol(v, &end, 10);
    if (*end != '\0' || n < 1 || n > 1'000'000) throw InvalidArgument(std::string(name) + " must be a positive integer");
    return static_cast<int>(n);
}

struct ExportContent {
    std::vector<std::pair<std::string, std::vector<std::uint8_t>>> files;
    std::string manifest_json;
    std::string report_json;
    ExportReport report;
};

struct Database {
    dataset::DatabaseManifest manifest;
    std::vector<MarkingAssignment> schedule;
    std::map<dataset::ImageRef, std::pair<int, int>> assignment;  // subject, day
    std::int64_t start_day = 0;
};

}  // namespace

ServiceConfig load_service_config(const std::optional<fs::path>& file) {
    ServiceConfig c;
    if (file) {
        json j;
        try {
            j = json::parse(read_text(*file));
        } catch (const json::exception& e) {
            throw InvalidArgument("bad config " + file->string() + ": " + e.what());
        }
        const auto base = file->parent_path();
        try {
            if (j.contains("data_root")) {
                const fs::path root = j["data_root"].get<std::string>();
                c.data_root = root.is_absolute() ? root : base / root;
            }
            c.host = j.value("host", c.host);
            c.port = j.value("port", c.port);
            c.capacity = j.value("capacity", c.capacity);
            c.subjects = j.value("subjects", c.subjects);
            for (const auto& m : j.value("manifests", json::array())) {
                const fs::path p = m.get<std::string>();
                c.manifests.push_back(p.is_absolute() ? p : base / p);
            }
        } catch (const json::exception& e) {
            throw InvalidArgument("bad config " + file->string() + ": " + e.what());
        }
    }
    if (const char* root = std::getenv("FINGERLAB_DATA_ROOT"); root && *root) c.data_root = root;
    if (const char* host = std::getenv("FINGERLAB_HOST"); host && *host) c.host = host;
    c.port = env_int("FINGERLAB_PORT", c.port);
    c.capacity = env_int("FINGERLAB_CAPACITY", c.capacity);
    c.subjects = env_int("FINGERLAB_SUBJECTS", c.subjects);
    if (c.port < 0 || c.port > 65535) throw InvalidArgument("port out of range");
    if (c.capacity < 1 || c.subjects < 1) throw InvalidArgument("capacity and subjects must be positive");
    return c;
}

struct MarkingService::Impl {
    ServiceConfig config;
    Clock clock;

    // Shared by ordinary calls, exclusive for export.
    mutable std::shared_mutex batch;

    mutable std::mutex registry_mutex;
    std::map<std::string, Database> dbs;

    mutable std::mutex locks_mutex;
    mutable std::map<dataset::ImageRef, std::unique_ptr<std::mutex>> locks;

    std::mutex views_mutex;
    // (db, subject, finger, epoch day) -> impression served that day
    std::map<std::tuple<std::string, int, int, std::int64_t>, int> views;

    std::chrono::system_clock::time_point now() const { return clock ? clock() : std::chrono::system_clock::now(); }

    fs::path db_dir(const std::string& db) const { return config.data_root / "databases" / db; }
    fs::path template_dir(const dataset::ImageRef& r) const {
        return config.data_root / "templates" / r.db_id / r.stem();
    }
    fs::path export_file(const dataset::ImageRef& r) const {
        return config.data_root / "export" / r.db_id / (r.stem() + ".iso-fmr");
    }
    fs::path views_log(const std::string& db) const { return config.data_root / "views" / (db + ".jsonl"); }

    std::mutex& lock_for(const dataset::ImageRef& r) const {
        std::lock_guard g(locks_mutex);
        auto& slot = locks[r];
        if (!slot) slot = std::make_unique<std::mutex>();
        return *slot;
    }

    const Database& db(const std::string& id) const {
        std::lock_guard g(registry_mutex);
        const auto it = dbs.find(id);
        if (it == dbs.end()) throw not_found("database " + id);
        return it->second;
    }

    const dataset::ManifestEntry& entry(const dataset::ImageRef& r) const {
        const auto* e = db(r.db_id).manifest.find(r);
        if (!e) throw not_found("image " + r.label());
        return *e;
    }

    std::pair<int, int> assignment(const dataset::ImageRef& r) const {
        const auto& d = db(r.db_id);
        const auto it = d.assignment.find(r);
        if (it == d.assignment.end()) throw not_found("image " + r.label());
        return it->second;
    }

    // Callers hold the template lock.
    std::optional<TemplateState> load_state(const dataset::ImageRef& r) const {
        const auto path = template_dir(r) / "state.json";
        if (!fs::exists(path)) return std::nullopt;
        return detail::state_from_disk(json::parse(read_text(path)));
    }

    void commit(const TemplateState& state, const std::optional<RevisionEntry>& revision, const ReviewRecord* review) {
        const auto dir = template_dir(state.image);
        if (revision) append_line(dir / "log.jsonl", detail::revision_to_disk(*revision).dump());
        if (review && review->action == ReviewAction::approve) {
            // Approvals do not change the record; log them without it.
            json j{{"revision", review->revision},
                   {"actor", review->reviewer},
                   {"event", "approve"},
                   {"timestamp", review->timestamp}};
            append_line(dir / "log.jsonl", j.dump());
        }
        write_atomic(dir / "state.json", detail::state_to_disk(state).dump(1));
        if (revision) {
            const auto bytes = fmr::encode_record(state.record);
            write_atomic(export_file(state.image), std::string(bytes.begin(), bytes.end()));
        }
    }

    fmr::MinutiaeRecord build_record(const dataset::ImageRef& r, const Submission& s,
                                     const std::optional<dataset::PerceivedQuality>& quality) const {
        const auto& spec = db(r.db_id).manifest.spec;
        fmr::MinutiaeRecord rec;
        rec.image_width = spec.image_width;
        rec.image_height = spec.image_height;
        rec.resolution_x = rec.resolution_y = spec.px_per_cm();
        fmr::FingerView v;
        v.finger_quality = quality ? dataset::finger_quality_code(*quality) : 0;
        v.minutiae = s.minutiae;
        v.singular_points = s.singular_points;
        rec.views.push_back(std::move(v));
        auto violations = fmr::validate_record(rec, fmr::ValidateOptions{});
        if (!violations.empty()) throw ValidationFailed(std::move(violations));
        return rec;
    }

    int subjects() const { return config.subjects; }

    void load_views(const std::string& db_id) {
        const auto path = views_log(db_id);
        if (!fs::exists(path)) return;
        std::ifstream in(path);
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            const auto j = json::parse(line, nullptr, false);
            if (j.is_discarded()) continue;
            views[{db_id, j.value("subject", 0), j.value("finger", 0), j.value("day", std::int64_t{0})}] =
                j.value("impression", 0);
        }
    }

    ExportContent collect_export(const std::string& db_id) const {
        ExportContent c;
        auto manifest = db(db_id).manifest;
        std::vector<dataset::ManifestEntry> kept;
        for (const auto& e : manifest.entries) {
            const auto st = load_state(e.ref);
            ++c.report.total;
            if (!st || st->status != TemplateStatus::final) {
                c.report.missing.push_back(e.ref);
                continue;
            }
            ++c.report.final_templates;
            const auto name = e.ref.stem() + ".iso-fmr";
            c.files.emplace_back(name, fmr::encode_record(st->record));
            auto out = e;
            out.image_path = fs::path(e.image_path).filename().string();
            out.template_path = name;
            out.perceived_quality = st->perceived_quality;
            kept.push_back(std::move(out));
        }
        c.report.completeness = c.report.total ? static_cast<double>(c.report.final_templates) /
                                                     static_cast<double>(c.report.total)
                                               : 0.0;
        manifest.entries = std::move(kept);
        c.manifest_json = dataset::manifest_to_json(manifest);
        json missing = json::array();
        for (const auto& r : c.report.missing) missing.push_back(r.stem());
        c.report_json = json{{"db", db_id},
                             {"final", c.report.final_templates},
                             {"total", c.report.total},
                             {"completeness", c.report.completeness},
                             {"missing", missing}}
                            .dump(1) +
                        "\n";
        return c;
    }
};

MarkingService::MarkingService(ServiceConfig config, Clock clock) : impl_(std::make_unique<Impl>()) {
    impl_->config = std::move(config);
    impl_->clock = std::move(clock);
    fs::create_directories(impl_->config.data_root);
    const auto dbs = impl_->config.data_root / "databases";
    if (fs::exists(dbs)) {
        std::vector<fs::path> dirs;
        for (const auto& d : fs::directory_iterator(dbs)) {
            if (d.is_directory() && fs::exists(d.path() / "manifest.json")) dirs.push_back(d.path());
        }
        std::sort(dirs.begin(), dirs.end());
        for (const auto& d : dirs) register_database(dataset::load_manifest(d / "manifest.json"), d);
    }
    for (const auto& m : impl_->config.manifests) register_database(dataset::load_manifest(m), m.parent_path());
}

MarkingService::~MarkingService() = default;

const ServiceConfig& MarkingService::config() const { return impl_->config; }

void MarkingService::register_database(const dataset::DatabaseManifest& manifest, const fs::path& base_dir) {
    std::unique_lock batch(impl_->batch);
    Database d;
    d.manifest = manifest;
    for (auto& e : d.manifest.entries) {
        if (!e.image_path.empty() && fs::path(e.image_path).is_relative()) {
            e.image_path = fs::absolute(base_dir / e.image_path).lexically_normal().string();
        }
    }
    d.schedule = generate_marking_schedule(d.manifest, impl_->config.subjects, impl_->config.capacity);
    for (const auto& a : d.schedule) {
        for (const auto& img : a.images) d.assignment[img] = {a.subject_id, a.day_index};
    }
    const std::string id = d.manifest.spec.db_id;
    const auto dir = impl_->db_dir(id);
    const auto meta_path = dir / "meta.json";
    if (fs::exists(meta_path)) {
        d.start_day = json::parse(read_text(meta_path)).at("start_epoch_day").get<std::int64_t>();
    } else {
        d.start_day = epoch_day(impl_->now());
        write_atomic(meta_path, json{{"start_epoch_day", d.start_day}}.dump());
    }
    dataset::save_manifest(d.manifest, dir / "manifest.json");
    {
        std::lock_guard g(impl_->registry_mutex);
        impl_->dbs[id] = std::move(d);
    }
    std::lock_guard v(impl_->views_mutex);
    impl_->load_views(id);
}

std::vector<std::string> MarkingService::databases() const {
    std::lock_guard g(impl_->registry_mutex);
    std::vector<std::string> out;
    for (const auto& [id, d] : impl_->dbs) out.push_back(id);
    return out;
}

const dataset::DatabaseManifest& MarkingService::manifest(const std::string& db_id) const {
    return impl_->db(db_id).manifest;
}

std::vector<MarkingAssignment> MarkingService::schedule(const std::string& db_id) const {
    return impl_->db(db_id).schedule;
}

std::vector<MarkingAssignment> MarkingService::schedule_for(const std::string& db_id, int subject) const {
    std::vector<MarkingAssignment> out;
    for (const auto& a : impl_->db(db_id).schedule) {
        if (a.subject_id == subject) out.push_back(a);
    }
    return out;
}

int MarkingService::assigned_subject(const dataset::ImageRef& image) const { return impl_->assignment(image).first; }

int MarkingService::scheduled_day(const dataset::ImageRef& image) const { return impl_->assignment(image).second; }

int MarkingService::current_day(const std::string& db_id) const {
    return static_cast<int>(epoch_day(impl_->now()) - impl_->db(db_id).start_day) + 1;
}

SubmitResult MarkingService::submit_template(int subject, const dataset::ImageRef& image,
                                             const Submission& submission) {
    std::shared_lock batch(impl_->batch);
    const auto [owner, day] = impl_->assignment(image);
    if (subject != owner) {
        throw ServiceError(403, "not-assigned",
                           image.label() + " is assigned to subject " + std::to_string(owner) + ", not " +
                               std::to_string(subject));
    }
    if (!submission.perceived_quality) {
        throw ServiceError(422, "missing-quality", "perceived image quality is required");
    }
    const auto record = impl_->build_record(image, submission, submission.perceived_quality);

    std::lock_guard lock(impl_->lock_for(image));
    auto state = impl_->load_state(image).value_or(TemplateState{});
    if (state.status == TemplateStatus::under_review || state.status == TemplateStatus::final) {
        throw ServiceError(409, "invalid-state",
                           image.label() + " is " + std::string(to_string(state.status)) + "; use a review");
    }
    if (submission.expected_revision && *submission.expected_revision != state.revision) {
        throw RevisionConflict(state.revision);
    }
    const auto now = impl_->now();
    SubmitResult result;
    const int today = static_cast<int>(epoch_day(now) - impl_->db(image.db_id).start_day) + 1;
    if (today != day) {
        result.warnings.push_back(image.label() + " is scheduled for day " + std::to_string(day) +
                                  ", submitted on day " + std::to_string(today));
    }
    state.image = image;
    state.revision += 1;
    state.marker = subject;
    state.record = record;
    state.perceived_quality = submission.perceived_quality;
    state.status = TemplateStatus::marked;
    state.fingerprint_class = submission.fingerprint_class;
    state.completeness = submission.completeness;
    const RevisionEntry rev{state.revision, subject, "submit", iso_timestamp(now), record, state.perceived_quality};
    impl_->commit(state, rev, nullptr);
    result.state = std::move(state);
    return result;
}

TemplateState MarkingService::submit_review(int reviewer, const dataset::ImageRef& image, ReviewAction action,
                                            const std::optional<Submission>& modification) {
    std::shared_lock batch(impl_->batch);
    impl_->entry(image);
    if (reviewer < 1 || reviewer > impl_->subjects()) {
        throw ServiceError(403, "unknown-subject", "subject " + std::to_string(reviewer) + " is not on the roster");
    }
    if (action == ReviewAction::modify && !modification) {
        throw InvalidArgument("a modify review needs the modified template");
    }

    std::lock_guard lock(impl_->lock_for(image));
    auto loaded = impl_->load_state(image);
    if (!loaded || loaded->status == TemplateStatus::draft) {
        throw ServiceError(409, "invalid-state", image.label() + " has not been marked yet");
    }
    auto state = std::move(*loaded);
    if (state.status == TemplateStatus::final) {
        throw ServiceError(409, "invalid-state", image.label() + " is already final");
    }
    if (reviewer == state.marker) throw ServiceError(403, "self-review", "the marker cannot review their own template");
    if (modification && modification->expected_revision && *modification->expected_revision != state.revision) {
        throw RevisionConflict(state.revision);
    }

    const auto now = impl_->now();
    std::optional<RevisionEntry> rev;
    ReviewRecord review{reviewer, action, state.revision, iso_timestamp(now)};
    if (action == ReviewAction::modify) {
        const auto quality = modification->perceived_quality ? modification->perceived_quality : state.perceived_quality;
        state.record = impl_->build_record(image, *modification, quality);
        state.perceived_quality = quality;
        state.revision += 1;
        review.revision = state.revision;
        // A new record invalidates every approval given so far.
        std::erase_if(state.reviews, [](const ReviewRecord& r) { return r.action == ReviewAction::approve; });
        rev = RevisionEntry{state.revision, reviewer, "modify", review.timestamp, state.record, quality};
    }
    std::erase_if(state.reviews, [&](const ReviewRecord& r) { return r.reviewer == reviewer; });
    state.reviews.push_back(review);

    std::set<int> approvals;
    for (const auto& r : state.reviews) {
        if (r.action == ReviewAction::approve) approvals.insert(r.reviewer);
    }
    bool all = true;
    for (int s = 1; s <= impl_->subjects(); ++s) {
        if (s != state.marker && !approvals.contains(s)) all = false;
    }
    state.status = all ? TemplateStatus::final : TemplateStatus::under_review;
    impl_->commit(state, rev, &review);
    return state;
}

std::optional<TemplateState> MarkingService::get_template(const dataset::ImageRef& image) const {
    std::shared_lock batch(impl_->batch);
    impl_->entry(image);
    std::lock_guard lock(impl_->lock_for(image));
    return impl_->load_state(image);
}

std::vector<RevisionEntry> MarkingService::history(const dataset::ImageRef& image) const {
    std::shared_lock batch(impl_->batch);
    impl_->entry(image);
    std::lock_guard lock(impl_->lock_for(image));
    std::vector<RevisionEntry> out;
    const auto path = impl_->template_dir(image) / "log.jsonl";
    if (!fs::exists(path)) return out;
    std::ifstream in(path);
    std::string line;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        const auto j = json::parse(line);
        if (j.contains("record")) out.push_back(detail::revision_from_disk(j));
    }
    return out;
}

RenderedImage MarkingService::render_image(const dataset::ImageRef& image, double display_height_cm,
                                           std::optional<int> subject) {
    std::shared_lock batch(impl_->batch);
    if (!(display_height_cm > 0.0) || !std::isfinite(display_height_cm)) {
        throw InvalidArgument("display height must be a positive number of centimetres");
    }
    const auto& e = impl_->entry(image);
    if (subject && *subject == impl_->assignment(image).first) {
        const auto today = epoch_day(impl_->now());
        std::lock_guard v(impl_->views_mutex);
        const auto key = std::make_tuple(image.db_id, *subject, image.finger, today);
        const auto it = impl_->views.find(key);
        if (it != impl_->views.end() && it->second != image.impression) {
            throw ServiceError(403, "same-finger-today",
                               "impression " + std::to_string(it->second) + " of finger " +
                                   std::to_string(image.finger) + " was already shown today");
        }
        if (it == impl_->views.end()) {
            impl_->views[key] = image.impression;
            append_line(impl_->views_log(image.db_id), json{{"subject", *subject},
                                                            {"finger", image.finger},
                                                            {"impression", image.impression},
                                                            {"day", today}}
                                                           .dump());
        }
    }
    RenderedImage out;
    dataset::ImageInfo info;
    try {
        out.png = dataset::transcode_to_png(e.image_path, &info);
    } catch (const dataset::ImageError& err) {
        throw ServiceError(422, "unreadable-image", err.what());
    }
    out.width = info.width;
    out.height = info.height;
    out.px_per_cm = impl_->db(image.db_id).manifest.spec.px_per_cm();
    out.display_height_cm = display_height_cm;
    return out;
}

DatabaseStats MarkingService::stats(const std::string& db_id) const {
    std::shared_lock batch(impl_->batch);
    DatabaseStats s;
    for (const auto st : {TemplateStatus::draft, TemplateStatus::marked, TemplateStatus::under_review,
                          TemplateStatus::final}) {
        s.by_status[st] = 0;
    }
    s.perceived_quality = {{"G", 0}, {"F", 0}, {"P", 0}};
    const auto& manifest = impl_->db(db_id).manifest;
    for (const auto& e : manifest.entries) {
        std::lock_guard lock(impl_->lock_for(e.ref));
        const auto st = impl_->load_state(e.ref);
        ++s.total;
        ++s.by_status[st ? st->status : TemplateStatus::draft];
        if (st && st->perceived_quality) {
            const auto q = *st->perceived_quality;
            ++s.perceived_quality[q == dataset::PerceivedQuality::good   ? "G"
                                  : q == dataset::PerceivedQuality::fair ? "F"
                                                                         : "P"];
        }
    }
    s.completeness = s.total ? static_cast<double>(s.by_status[TemplateStatus::final]) / static_cast<double>(s.total)
                             : 0.0;
    return s;
}

std::vector<std::uint8_t> MarkingService::export_zip(const std::string& db_id, ExportReport* report) {
    std::unique_lock batch(impl_->batch);
    const auto c = impl_->collect_export(db_id);
    detail::ZipWriter zip;
    for (const auto& [name, bytes] : c.files) zip.add(name, bytes);
    zip.add("manifest.json", c.manifest_json);
    zip.add("export_report.json", c.report_json);
    if (report) *report = c.report;
    return zip.finish();
}

ExportReport MarkingService::export_database(const std::string& db_id, const fs::path& destination) {
    if (destination.extension() == ".zip") {
        ExportReport report;
        const auto bytes = export_zip(db_id, &report);
        write_atomic(destination, std::string(bytes.begin(), bytes.end()));
        return report;
    }
    std::unique_lock batch(impl_->batch);
    const auto c = impl_->collect_export(db_id);
    fs::create_directories(destination);
    for (const auto& [name, bytes] : c.files) write_atomic(destination / name, std::string(bytes.begin(), bytes.end()));
    write_atomic(destination / "manifest.json", c.manifest_json);
    write_atomic(destination / "export_report.json", c.report_json);
    return c.report;
}

}  // namespace fingerlab::marking
