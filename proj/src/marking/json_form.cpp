#include "json_form.hpp"

#include "fingerlab/fmr/angle.hpp"
#include "fingerlab/fmr/text_form.hpp"

namespace fingerlab::marking::detail {

namespace {

json quality_json(const std::optional<dataset::PerceivedQuality>& q) {
    return q ? json(std::string(dataset::to_string(*q))) : json(nullptr);
}

std::optional<dataset::PerceivedQuality> quality_from(const json& j) {
    if (j.is_null()) return std::nullopt;
    const auto q = dataset::parse_perceived_quality(j.get<std::string>());
    if (!q) throw InvalidArgument("unknown perceived quality '" + j.get<std::string>() + "'");
    return q;
}

TemplateStatus status_from(const std::string& s) {
    for (const auto st : {TemplateStatus::draft, TemplateStatus::marked, TemplateStatus::under_review,
                          TemplateStatus::final}) {
        if (to_string(st) == s) return st;
    }
    throw InvalidArgument("unknown status '" + s + "'");
}

json review_json(const ReviewRecord& r) {
    return {{"reviewer", r.reviewer},
            {"action", std::string(to_string(r.action))},
            {"revision", r.revision},
            {"timestamp", r.timestamp}};
}

ReviewRecord review_from(const json& j) {
    const auto action = parse_review_action(j.at("action").get<std::string>());
    if (!action) throw InvalidArgument("unknown review action");
    return {j.at("reviewer").get<int>(), *action, j.at("revision").get<int>(), j.at("timestamp").get<std::string>()};
}

int int_field(const json& j, const char* name) {
    const auto& v = j.at(name);
    if (!v.is_number_integer()) throw InvalidArgument(std::string("'") + name + "' must be an integer");
    return v.get<int>();
}

}  // namespace

json state_to_api(const TemplateState& s) {
    json minutiae = json::array();
    json singular = json::array();
    const fmr::FingerView* view = s.record.views.empty() ? nullptr : &s.record.views.front();
    if (view) {
        for (const auto& m : view->minutiae) {
            minutiae.push_back({{"kind", std::string(fmr::to_string(m.kind))},
                                {"x", m.x},
                                {"y", m.y},
                                {"angle_deg", fmr::dequantize_angle(m.angle_units)},
                                {"angle_units", m.angle_units},
                                {"quality", m.quality}});
        }
        for (const auto& p : view->singular_points) {
            json jp{{"kind", std::string(fmr::to_string(p.kind))}, {"x", p.x}, {"y", p.y}};
            if (p.angle_units) jp["angle_deg"] = fmr::dequantize_angle(*p.angle_units);
            singular.push_back(std::move(jp));
        }
    }
    json reviews = json::array();
    for (const auto& r : s.reviews) reviews.push_back(review_json(r));
    return {{"db", s.image.db_id},
            {"finger", s.image.finger},
            {"impression", s.image.impression},
            {"revision", s.revision},
            {"marker", s.marker},
            {"status", std::string(to_string(s.status))},
            {"perceived_quality", quality_json(s.perceived_quality)},
            {"image_width", s.record.image_width},
            {"image_height", s.record.image_height},
            {"px_per_cm", s.record.resolution_x},
            {"minutiae", std::move(minutiae)},
            {"singular_points", std::move(singular)},
            {"reviews", std::move(reviews)},
            {"fingerprint_class", s.fingerprint_class},
            {"completeness", s.completeness}};
}

json revision_to_api(const RevisionEntry& e) {
    TemplateState view;
    view.record = e.record;
    const auto api = state_to_api(view);
    return {{"revision", e.revision},
            {"actor", e.actor},
            {"event", e.event},
            {"timestamp", e.timestamp},
            {"perceived_quality", quality_json(e.perceived_quality)},
            {"minutiae", api["minutiae"]},
            {"singular_points", api["singular_points"]}};
}

json schedule_to_api(const std::vector<MarkingAssignment>& schedule) {
    json out = json::array();
    for (const auto& a : schedule) {
        json images = json::array();
        for (const auto& img : a.images) {
            images.push_back({{"db", img.db_id}, {"finger", img.finger}, {"impression", img.impression}});
        }
        out.push_back({{"subject", a.subject_id}, {"day", a.day_index}, {"images", std::move(images)}});
    }
    return out;
}

json violations_to_api(const std::vector<fmr::Violation>& violations) {
    json out = json::array();
    for (const auto& v : violations) out.push_back({{"code", v.code}, {"path", v.path}, {"message", v.message}});
    return out;
}

Submission submission_from_api(const json& body) {
    if (!body.is_object()) throw InvalidArgument("request body must be a JSON object");
    Submission s;
    try {
        for (const auto& jm : body.value("minutiae", json::array())) {
            fmr::Minutia m;
            const auto kind = fmr::parse_minutia_kind(jm.at("kind").get<std::string>());
            if (!kind) throw InvalidArgument("unknown minutia kind '" + jm.at("kind").get<std::string>() + "'");
            m.kind = *kind;
            m.x = int_field(jm, "x");
            m.y = int_field(jm, "y");
            m.angle_units = fmr::quantize_angle(jm.at("angle_deg").get<double>());
            const auto& q = jm.at("quality");
            if (q.is_string()) {
                const auto pq = dataset::parse_perceived_quality(q.get<std::string>());
                if (!pq) throw InvalidArgument("unknown minutia quality '" + q.get<std::string>() + "'");
                m.quality = dataset::finger_quality_code(*pq);
            } else {
                m.quality = int_field(jm, "quality");
            }
            s.minutiae.push_back(m);
        }
        for (const auto& jp : body.value("singular_points", json::array())) {
            fmr::SingularPoint p;
            const auto kind = fmr::parse_singular_kind(jp.at("kind").get<std::string>());
            if (!kind) throw InvalidArgument("unknown singular point kind");
            p.kind = *kind;
            p.x = int_field(jp, "x");
            p.y = int_field(jp, "y");
            if (jp.contains("angle_deg") && !jp["angle_deg"].is_null()) {
                p.angle_units = fmr::quantize_angle(jp["angle_deg"].get<double>());
            }
            s.singular_points.push_back(p);
        }
        if (body.contains("perceived_quality")) s.perceived_quality = quality_from(body["perceived_quality"]);
        if (body.contains("expected_revision") && !body["expected_revision"].is_null()) {
            s.expected_revision = int_field(body, "expected_revision");
        }
        s.fingerprint_class = body.value("fingerprint_class", std::string{});
        s.completeness = body.value("completeness", std::string{});
    } catch (const json::exception& e) {
        throw InvalidArgument(std::string("malformed template body: ") + e.what());
    }
    return s;
}

json state_to_disk(const TemplateState& s) {
    json reviews = json::array();
    for (const auto& r : s.reviews) reviews.push_back(review_json(r));
    return {{"db", s.image.db_id},
            {"finger", s.image.finger},
            {"impression", s.image.impression},
            {"revision", s.revision},
            {"marker", s.marker},
            {"status", std::string(to_string(s.status))},
            {"perceived_quality", quality_json(s.perceived_quality)},
            {"record", fmr::to_text(s.record)},
            {"reviews", std::move(reviews)},
            {"fingerprint_class", s.fingerprint_class},
            {"completeness", s.completeness}};
}

TemplateState state_from_disk(const json& j) {
    TemplateState s;
    s.image = {j.at("db").get<std::string>(), j.at("finger").get<int>(), j.at("impression").get<int>()};
    s.revision = j.at("revision").get<int>();
    s.marker = j.at("marker").get<int>();
    s.status = status_from(j.at("status").get<std::string>());
    s.perceived_quality = quality_from(j.at("perceived_quality"));
    s.record = fmr::from_text(j.at("record").get<std::string>());
    for (const auto& r : j.at("reviews")) s.reviews.push_back(review_from(r));
    s.fingerprint_class = j.value("fingerprint_class", std::string{});
    s.completeness = j.value("completeness", std::string{});
    return s;
}

json revision_to_disk(const RevisionEntry& e) {
    return {{"revision", e.revision},
            {"actor", e.actor},
            {"event", e.event},
            {"timestamp", e.timestamp},
            {"perceived_quality", quality_json(e.perceived_quality)},
            {"record", fmr::to_text(e.record)}};
}

RevisionEntry revision_from_disk(const json& j) {
    RevisionEntry e;
    e.revision = j.at("revision").get<int>();
    e.actor = j.at("actor").get<int>();
    e.event = j.at("event").get<std::string>();
    e.timestamp = j.at("timestamp").get<std::string>();
    e.perceived_quality = quality_from(j.at("perceived_quality"));
    e.record = fmr::from_text(j.at("record").get<std::string>());
    return e;
}

}  // namespace fingerlab::marking::detail
