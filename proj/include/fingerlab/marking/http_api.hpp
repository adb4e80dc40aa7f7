#pragma once

#include <memory>
#include <string>

#include "fingerlab/marking/service.hpp"

namespace fingerlab::marking {

// JSON API over a MarkingService, all routes under /api/v1:
//   GET  databases
//   GET  schedule/{subject}[?db=]
//   GET  images/{db}/{finger}/{impression}.png[?display_height_cm=]
//   GET  templates/{db}/{finger}/{impression}          (404 until marked)
//   PUT  templates/{db}/{finger}/{impression}          submit as marker
//   GET  templates/{db}/{finger}/{impression}/history
//   POST templates/{db}/{finger}/{impression}/reviews  {"action": ...}
//   GET  export/{db}.zip
//   GET  stats/{db}
// Writes, and image requests that should obey the daily viewing rule,
// identify the subject with an X-Subject-Id header. Errors answer
// {"error": code, "message": ...}.
class HttpApi {
public:
    explicit HttpApi(MarkingService& service);
    ~HttpApi();
    HttpApi(const HttpApi&) = delete;
    HttpApi& operator=(const HttpApi&) = delete;

    // Port 0 binds any free port. Returns the bound port; throws Error.
    int bind(const std::string& host, int port);
    // Blocks serving requests until stop().
    void serve();
    void stop();

private:
    struct Impl;
    std::unique_ptr<Impl> impl_;
};

}  // namespace fingerlab::marking
