#include "fingerlab/marking/http_api.hpp"

#include <httplib.h>

#include <charconv>

#include "json_form.hpp"

namespace fingerlab::marking {

using detail::json;

namespace {

void send_json(httplib::Response& res, int status, const json& body) {
    res.status = status;
    res.set_content(body.dump(), "application/json");
}

void send_error(httplib::Response& res, int status, const std::string& code, const std::string& message,
                json extra = json::object()) {
    extra["error"] = code;
    extra["message"] = message;
    send_json(res, status, extra);
}

std::optional<int> parse_int(const std::string& s) {
    int v = 0;
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc() || r.ptr != s.data() + s.size()) return std::nullopt;
    return v;
}

dataset::ImageRef image_from(const httplib::Request& req) {
    const auto f = parse_int(req.matches[2]);
    const auto i = parse_int(req.matches[3]);
    if (!f || !i) throw InvalidArgument("bad finger or impression");
    return {req.matches[1], *f, *i};
}

std::optional<int> subject_header(const httplib::Request& req) {
    if (!req.has_header("X-Subject-Id")) return std::nullopt;
    const auto s = parse_int(req.get_header_value("X-Subject-Id"));
    if (!s) throw ServiceError(401, "bad-subject", "X-Subject-Id must be an integer");
    return s;
}

int required_subject(const httplib::Request& req) {
    const auto s = subject_header(req);
    if (!s) throw ServiceError(401, "missing-subject", "X-Subject-Id header required");
    return *s;
}

json parse_body(const httplib::Request& req) {
    auto j = json::parse(req.body, nullptr, false);
    if (j.is_discarded() || !j.is_object()) throw InvalidArgument("request body must be a JSON object");
    return j;
}

// Runs a handler, translating exceptions into JSON error responses.
template <typename F>
httplib::Server::Handler guarded(F f) {
    return [f](const httplib::Request& req, httplib::Response& res) {
        try {
            f(req, res);
        } catch (const ValidationFailed& e) {
            send_error(res, e.http_status(), e.code(), e.what(),
                       {{"violations", detail::violations_to_api(e.violations())}});
        } catch (const RevisionConflict& e) {
            send_error(res, e.http_status(), e.code(), e.what(), {{"current_revision", e.current_revision()}});
        } catch (const ServiceError& e) {
            send_error(res, e.http_status(), e.code(), e.what());
        } catch (const InvalidArgument& e) {
            send_error(res, 400, "bad-request", e.what());
        } catch (const std::exception& e) {
            send_error(res, 500, "internal", e.what());
        }
    };
}

}  // namespace

struct HttpApi::Impl {
    MarkingService& service;
    httplib::Server server;

    explicit Impl(MarkingService& s) : service(s) { routes(); }

    void routes() {
        const std::string tpl = R"(/api/v1/templates/([^/]+)/(\d+)/(\d+))";

        server.Get("/api/v1/databases", guarded([this](const httplib::Request&, httplib::Response& res) {
            json out = json::array();
            for (const auto& id : service.databases()) {
                const auto& spec = service.manifest(id).spec;
                out.push_back({{"db", id},
                               {"fingers", spec.fingers},
                               {"impressions", spec.impressions_per_finger},
                               {"image_width", spec.image_width},
                               {"image_height", spec.image_height},
                               {"px_per_cm", spec.px_per_cm()},
                               {"current_day", service.current_day(id)}});
            }
            send_json(res, 200, out);
        }));

        server.Get(R"(/api/v1/schedule/(\d+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto subject = parse_int(req.matches[1]);
            if (!subject) throw InvalidArgument("bad subject");
            std::vector<std::string> ids;
            if (req.has_param("db")) {
                ids.push_back(req.get_param_value("db"));
            } else {
                ids = service.databases();
            }
            json out = json::array();
            for (const auto& id : ids) {
                for (auto& a : detail::schedule_to_api(service.schedule_for(id, *subject))) {
                    a["db"] = id;
                    out.push_back(std::move(a));
                }
            }
            send_json(res, 200, out);
        }));

        server.Get(R"(/api/v1/images/([^/]+)/(\d+)/(\d+)\.png)",
                   guarded([this](const httplib::Request& req, httplib::Response& res) {
                       double height = 22.0;
                       if (req.has_param("display_height_cm")) {
                           const auto v = req.get_param_value("display_height_cm");
                           const auto r = std::from_chars(v.data(), v.data() + v.size(), height);
                           if (r.ec != std::errc() || r.ptr != v.data() + v.size()) {
                               throw InvalidArgument("display_height_cm must be a number");
                           }
                       }
                       const auto img = service.render_image(image_from(req), height, subject_header(req));
                       res.set_header("X-Image-Width", std::to_string(img.width));
                       res.set_header("X-Image-Height", std::to_string(img.height));
                       res.set_header("X-Px-Per-Cm", std::to_string(img.px_per_cm));
                       res.set_header("X-Display-Height-Cm", json(img.display_height_cm).dump());
                       res.set_content(std::string(img.png.begin(), img.png.end()), "image/png");
                   }));

        server.Get(tpl, guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto ref = image_from(req);
            const auto st = service.get_template(ref);
            if (!st) {
                send_error(res, 404, "not-found", ref.label() + " has no template yet");
                return;
            }
            send_json(res, 200, detail::state_to_api(*st));
        }));

        server.Put(tpl, guarded([this](const httplib::Request& req, httplib::Response& res) {
            const int subject = required_subject(req);
            const auto submission = detail::submission_from_api(parse_body(req));
            const auto result = service.submit_template(subject, image_from(req), submission);
            auto out = detail::state_to_api(result.state);
            out["warnings"] = result.warnings;
            send_json(res, 200, out);
        }));

        server.Get(tpl + "/history", guarded([this](const httplib::Request& req, httplib::Response& res) {
            json out = json::array();
            for (const auto& e : service.history(image_from(req))) out.push_back(detail::revision_to_api(e));
            send_json(res, 200, out);
        }));

        server.Post(tpl + "/reviews", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const int subject = required_subject(req);
            const auto body = parse_body(req);
            const auto action = parse_review_action(body.value("action", std::string{}));
            if (!action) throw InvalidArgument("action must be 'approve' or 'modify'");
            std::optional<Submission> modification;
            if (*action == ReviewAction::modify) modification = detail::submission_from_api(body);
            const auto st = service.submit_review(subject, image_from(req), *action, modification);
            send_json(res, 200, detail::state_to_api(st));
        }));

        server.Get(R"(/api/v1/export/([^/]+)\.zip)", guarded([this](const httplib::Request& req, httplib::Response& res) {
            ExportReport report;
            const auto bytes = service.export_zip(req.matches[1], &report);
            res.set_header("X-Export-Completeness", json(report.completeness).dump());
            res.set_header("Content-Disposition", "attachment; filename=\"" + std::string(req.matches[1]) + ".zip\"");
            res.set_content(std::string(bytes.begin(), bytes.end()), "application/zip");
        }));

        server.Get(R"(/api/v1/stats/([^/]+))", guarded([this](const httplib::Request& req, httplib::Response& res) {
            const auto s = service.stats(req.matches[1]);
            json by_status = json::object();
            for (const auto& [st, n] : s.by_status) by_status[std::string(to_string(st))] = n;
            send_json(res, 200,
                      {{"db", std::string(req.matches[1])},
                       {"total", s.total},
                       {"status", by_status},
                       {"completeness", s.completeness},
                       {"perceived_quality", s.perceived_quality}});
        }));
    }
};

HttpApi::HttpApi(MarkingService& service) : impl_(std::make_unique<Impl>(service)) {}

HttpApi::~HttpApi() { stop(); }

int HttpApi::bind(const std::string& host, int port) {
    if (port == 0) {
        const int bound = impl_->server.bind_to_any_port(host);
        if (bound <= 0) throw Error("cannot bind " + host);
        return bound;
    }
    if (!impl_->server.bind_to_port(host, port)) throw Error("cannot bind " + host + ":" + std::to_string(port));
    return port;
}

void HttpApi::serve() { impl_->server.listen_after_bind(); }

void HttpApi::stop() {
    if (impl_->server.is_running()) impl_->server.stop();
}

}  // namespace fingerlab::marking
