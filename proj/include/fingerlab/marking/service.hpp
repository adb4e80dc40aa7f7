#pragma once

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "fingerlab/dataset/manifest.hpp"
#include "fingerlab/fmr/record.hpp"
#include "fingerlab/fmr/validate.hpp"
#include "fingerlab/marking/schedule.hpp"

namespace fingerlab::marking {

enum class TemplateStatus { draft, marked, under_review, final };
enum class ReviewAction { approve, modify };

std::string_view to_string(TemplateStatus status);
std::string_view to_string(ReviewAction action);
std::optional<ReviewAction> parse_review_action(std::string_view text);

struct ReviewRecord {
    int reviewer = 0;
    ReviewAction action = ReviewAction::approve;
    int revision = 0;  // template revision after the action
    std::string timestamp;

    friend bool operator==(const ReviewRecord&, const ReviewRecord&) = default;
};

struct TemplateState {
    dataset::ImageRef image;
    int revision = 0;
    int marker = 0;
    fmr::MinutiaeRecord record;
    std::optional<dataset::PerceivedQuality> perceived_quality;
    TemplateStatus status = TemplateStatus::draft;
    std::vector<ReviewRecord> reviews;
    // Stored with the template but not used for anything else.
    std::string fingerprint_class;
    std::string completeness;

    friend bool operator==(const TemplateState&, const TemplateState&) = default;
};

// One entry of a template's audit log.
struct RevisionEntry {
    int revision = 0;
    int actor = 0;
    std::string event;  // "submit", "approve" or "modify"
    std::string timestamp;
    fmr::MinutiaeRecord record;
    std::optional<dataset::PerceivedQuality> perceived_quality;
};

// What a marker or reviewer sends; image size, resolution and finger
// quality are filled in from the database.
struct Submission {
    std::vector<fmr::Minutia> minutiae;
    std::vector<fmr::SingularPoint> singular_points;
    std::optional<dataset::PerceivedQuality> perceived_quality;
    std::optional<int> expected_revision;
    std::string fingerprint_class;
    std::string completeness;
};

struct SubmitResult {
    TemplateState state;
    std::vector<std::string> warnings;
};

// Errors carry the HTTP status the API answers with.
class ServiceError : public Error {
public:
    ServiceError(int http_status, std::string code, const std::string& message)
        : Error(message), http_status_(http_status), code_(std::move(code)) {}
    int http_status() const noexcept { return http_status_; }
    const std::string& code() const noexcept { return code_; }

private:
    int http_status_;
    std::string code_;
};

class ValidationFailed : public ServiceError {
public:
    explicit ValidationFailed(std::vector<fmr::Violation> violations);
    const std::vector<fmr::Violation>& violations() const noexcept { return violations_; }

private:
    std::vector<fmr::Violation> violations_;
};

class RevisionConflict : public ServiceError {
public:
    explicit RevisionConflict(int current);
    int current_revision() const noexcept { return current_; }

private:
    int current_;
};

struct ServiceConfig {
    std::filesystem::path data_root = "fingerlab-data";
    std::string host = "127.0.0.1";
    int port = 8080;
    int capacity = 14;
    int subjects = 4;
    std::vector<std::filesystem::path> manifests;  // registered at startup
};

// JSON file with the ServiceConfig field names (all optional), then the
// environment: FINGERLAB_DATA_ROOT, FINGERLAB_HOST, FINGERLAB_PORT,
// FINGERLAB_CAPACITY, FINGERLAB_SUBJECTS. Throws InvalidArgument.
ServiceConfig load_service_config(const std::optional<std::filesystem::path>& file);

using Clock = std::function<std::chrono::system_clock::time_point()>;

struct RenderedImage {
    std::vector<std::uint8_t> png;
    int width = 0;
    int height = 0;
    int px_per_cm = 0;
    double display_height_cm = 22.0;
};

struct DatabaseStats {
    std::size_t total = 0;
    std::map<TemplateStatus, std::size_t> by_status;
    double completeness = 0.0;  // final / total
    std::map<std::string, int> perceived_quality;  // G/F/P over marked templates
};

struct ExportReport {
    std::size_t final_templates = 0;
    std::size_t total = 0;
    double completeness = 0.0;
    std::vector<dataset::ImageRef> missing;  // not final
};

// File-backed store plus workflow rules. Layout under data_root:
//   databases/<db>/manifest.json, meta.json
//   templates/<db>/<finger>_<impression>/state.json, log.jsonl
//   export/<db>/<finger>_<impression>.iso-fmr   latest submitted bytes
//   views/<db>.jsonl                            images served to subjects
// Safe for concurrent use. Calls on one template are serialized.
class MarkingService {
public:
    explicit MarkingService(ServiceConfig config, Clock clock = nullptr);
    ~MarkingService();
    MarkingService(const MarkingService&) = delete;
    MarkingService& operator=(const MarkingService&) = delete;

    const ServiceConfig& config() const;

    // Adds (or replaces) a database and computes its schedule. Relative
    // image paths are resolved against `base_dir`. The schedule's day 1 is
    // the registration date unless one was already recorded.
    void register_database(const dataset::DatabaseManifest& manifest, const std::filesystem::path& base_dir = {});
    std::vector<std::string> databases() const;
    const dataset::DatabaseManifest& manifest(const std::string& db_id) const;

    std::vector<MarkingAssignment> schedule(const std::string& db_id) const;
    std::vector<MarkingAssignment> schedule_for(const std::string& db_id, int subject) const;
    int assigned_subject(const dataset::ImageRef& image) const;
    int scheduled_day(const dataset::ImageRef& image) const;
    // 1 on the start date, counting calendar days.
    int current_day(const std::string& db_id) const;

    SubmitResult submit_template(int subject, const dataset::ImageRef& image, const Submission& submission);
    TemplateState submit_review(int reviewer, const dataset::ImageRef& image, ReviewAction action,
                                const std::optional<Submission>& modification);

    std::optional<TemplateState> get_template(const dataset::ImageRef& image) const;
    std::vector<RevisionEntry> history(const dataset::ImageRef& image) const;

    // PNG of the source image. When `subject` is the image's assigned
    // marker, refuses a second impression of the same finger on one
    // calendar day (HTTP 403, code "same-finger-today").
    RenderedImage render_image(const dataset::ImageRef& image, double display_height_cm = 22.0,
                               std::optional<int> subject = std::nullopt);

    DatabaseStats stats(const std::string& db_id) const;

    // Final templates as <finger>_<impression>.iso-fmr plus manifest.json
    // and export_report.json, either as a stored ZIP (path ends in .zip)
    // or into a directory.
    ExportReport export_database(const std::string& db_id, const std::filesystem::path& destination);
    std::vector<std::uint8_t> export_zip(const std::string& db_id, ExportReport* report = nullptr);

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace fingerlab::marking
