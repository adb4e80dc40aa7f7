#include <httplib.h>

#include <atomic>
#include <fstream>
#include <json.hpp>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "fingerlab/dataset/image_io.hpp"
#include "fingerlab/dataset/templates.hpp"
#include "fingerlab/fmr/codec.hpp"
#include "fingerlab/marking/http_api.hpp"
#include "fingerlab/marking/schedule.hpp"
#include "fingerlab/marking/service.hpp"
#include "support/temp_dir.hpp"

using namespace fingerlab;
using namespace fingerlab::marking;
using dataset::ImageRef;
using dataset::PerceivedQuality;
using nlohmann::json;

namespace {

// Manually advanced clock; starts at 2026-03-02 09:00 UTC.
struct FakeClock {
    std::shared_ptr<std::atomic<std::int64_t>> seconds = std::make_shared<std::atomic<std::int64_t>>(1772442000);
    Clock fn() const {
        auto s = seconds;
        return [s] { return std::chrono::system_clock::time_point(std::chrono::seconds(s->load())); };
    }
    void advance_days(int d) const { *seconds += 86400LL * d; }
};

// Database with real image files on disk.
dataset::DatabaseManifest write_database(const std::filesystem::path& dir, const std::string& db, int fingers,
                                         int impressions, int width = 40, int height = 30, int dpi = 500) {
    dataset::DatabaseSpec spec{db, dataset::SensorKind::optical, width, height, dpi, fingers, impressions};
    auto manifest = dataset::synthetic_manifest(spec);
    manifest.image_format = "png";
    std::vector<std::uint8_t> pixels(static_cast<std::size_t>(width * height));
    for (auto& e : manifest.entries) {
        for (std::size_t i = 0; i < pixels.size(); ++i) {
            pixels[i] = static_cast<std::uint8_t>((i * 7 + static_cast<std::size_t>(e.ref.finger * 31 + e.ref.impression)) & 0xFF);
        }
        e.image_path = e.ref.stem() + ".png";
        dataset::write_grayscale_image(dir / e.image_path, width, height, pixels);
    }
    return manifest;
}

Submission submission(std::vector<fmr::Minutia> minutiae, PerceivedQuality q = PerceivedQuality::good) {
    Submission s;
    s.minutiae = std::move(minutiae);
    s.perceived_quality = q;
    return s;
}

std::vector<fmr::Minutia> some_minutiae(int n, int seed = 1) {
    std::mt19937 rng(static_cast<unsigned>(seed));
    std::uniform_int_distribution<int> x(0, 39), y(0, 29), a(0, 255), q(1, 100);
    std::vector<fmr::Minutia> out;
    for (int i = 0; i < n; ++i) out.push_back({fmr::MinutiaKind::ending, x(rng), y(rng), a(rng), q(rng)});
    return out;
}

// Serves on a background thread; stops the server before joining it.
struct RunningServer {
    HttpApi& api;
    std::jthread thread;
    explicit RunningServer(HttpApi& a) : api(a), thread([this] { api.serve(); }) {}
    ~RunningServer() { api.stop(); }
};

int status_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ServiceError& e) {
        return e.http_status();
    }
    return 0;
}

struct Fixture {
    testing::TempDir dir{"marking"};
    FakeClock clock;
    dataset::DatabaseManifest manifest;
    std::unique_ptr<MarkingService> service;

    explicit Fixture(int fingers = 2, int impressions = 8, int subjects = 4, int capacity = 14) {
        std::filesystem::create_directories(dir / "images");
        manifest = write_database(dir / "images", "TEST", fingers, impressions);
        ServiceConfig c;
        c.data_root = dir / "data";
        c.subjects = subjects;
        c.capacity = capacity;
        service = std::make_unique<MarkingService>(c, clock.fn());
        service->register_database(manifest, dir / "images");
    }

    ServiceConfig config() const { return service->config(); }
};

}  // namespace

TEST_CASE("schedule: 100 fingers, 8 impressions, 4 subjects") {
    const auto s = generate_marking_schedule("FVC2002_DB1A", 100, 8, 4, 14);
    const ScheduleShape shape{"FVC2002_DB1A", 100, 8, 4, 14};
    CHECK(validate_schedule(s, shape).empty());
    for (int subject = 1; subject <= 4; ++subject) {
        std::size_t n = 0;
        std::set<int> impressions;
        for (const auto& a : s) {
            if (a.subject_id != subject) continue;
            n += a.images.size();
            for (const auto& img : a.images) impressions.insert(img.impression);
        }
        CHECK(n == 200);
        CHECK(schedule_days(s, subject) == 15);
        CHECK(impressions == std::set<int>{subject, subject + 4});
    }
    CHECK_THROWS_AS(generate_marking_schedule("X", 100, 8, 3, 14), ScheduleError);
    CHECK_THROWS_AS(generate_marking_schedule("X", 100, 8, 4, 0), InvalidArgument);
}

TEST_CASE("schedule: F=2, K=4, S=2, capacity 2 checked exhaustively") {
    const auto s = generate_marking_schedule("D", 2, 4, 2, 2);
    CHECK(validate_schedule(s, {"D", 2, 4, 2, 2}).empty());
    REQUIRE(s.size() == 4);
    std::set<ImageRef> all;
    for (const auto& a : s) {
        CHECK(a.images.size() == 2);
        CHECK(a.day_index <= 2);
        // Both images of a day come from different fingers.
        CHECK(a.images[0].finger != a.images[1].finger);
        for (const auto& img : a.images) {
            CHECK(all.insert(img).second);
            CHECK((img.impression - a.subject_id) % 2 == 0);
        }
    }
    CHECK(all.size() == 8);
    std::ostringstream csv;
    write_schedule_csv(csv, s);
    CHECK(csv.str().rfind("subject,day,db,finger,impression\n1,1,D,1,1\n1,1,D,2,1\n1,2,D,1,3\n", 0) == 0);
}

TEST_CASE("schedule: validator accepts generated schedules and rejects same-day mutations") {
    std::mt19937 rng(17);
    int mutated = 0;
    for (int trial = 0; trial < 400; ++trial) {
        const int subjects = std::uniform_int_distribution<int>(1, 4)(rng);
        const int impressions = subjects * std::uniform_int_distribution<int>(1, 8 / subjects)(rng);
        const int fingers = std::uniform_int_distribution<int>(1, 8)(rng);
        const int capacity = std::uniform_int_distribution<int>(1, 8)(rng);
        const ScheduleShape shape{"R", fingers, impressions, subjects, capacity};
        auto s = generate_marking_schedule("R", fingers, impressions, subjects, capacity);
        REQUIRE(validate_schedule(s, shape).empty());

        // Move an image onto a day that already holds the same finger.
        bool done = false;
        for (std::size_t a = 0; a < s.size() && !done; ++a) {
            for (std::size_t b = 0; b < s.size() && !done; ++b) {
                if (a == b || s[a].subject_id != s[b].subject_id) continue;
                for (std::size_t k = 0; k < s[b].images.size() && !done; ++k) {
                    const auto img = s[b].images[k];
                    const bool clash = std::any_of(s[a].images.begin(), s[a].images.end(),
                                                   [&](const ImageRef& r) { return r.finger == img.finger; });
                    if (!clash) continue;
                    s[b].images.erase(s[b].images.begin() + static_cast<std::ptrdiff_t>(k));
                    s[a].images.push_back(img);
                    done = true;
                }
            }
        }
        if (!done) continue;
        ++mutated;
        const auto problems = validate_schedule(s, shape);
        REQUIRE_FALSE(problems.empty());
        CHECK(std::any_of(problems.begin(), problems.end(),
                          [](const std::string& p) { return p.find("same day") != std::string::npos; }));
    }
    MESSAGE("mutated schedules rejected: " << mutated);
    CHECK(mutated > 50);
}

TEST_CASE("service: submit template") {
    Fixture fx;
    const ImageRef img{"TEST", 1, 1};
    CHECK(fx.service->assigned_subject(img) == 1);
    CHECK_FALSE(fx.service->get_template(img));

    const auto r = fx.service->submit_template(1, img, submission(some_minutiae(39)));
    CHECK(r.state.status == TemplateStatus::marked);
    CHECK(r.state.revision == 1);
    CHECK(r.state.marker == 1);
    CHECK(r.warnings.empty());
    CHECK(r.state.record.views[0].finger_quality == 80);
    CHECK(r.state.record.image_width == 40);
    CHECK(r.state.record.resolution_x == 197);
    CHECK(fx.service->get_template(img) == r.state);

    // ISO bytes land in the export area.
    const auto bytes = dataset::read_file_bytes(fx.config().data_root / "export" / "TEST" / "1_1.iso-fmr");
    CHECK(bytes.size() == 30 + 6 * 39);
    CHECK(fmr::decode_record(bytes) == r.state.record);

    // Outside the 40x30 image.
    auto bad = some_minutiae(3);
    bad[1].x = 40;
    try {
        fx.service->submit_template(1, img, submission(bad));
        FAIL("expected ValidationFailed");
    } catch (const ValidationFailed& e) {
        CHECK(e.http_status() == 422);
        REQUIRE(e.violations().size() == 1);
        CHECK(e.violations()[0].code == "coordinate-out-of-bounds");
    }

    CHECK(status_of([&] { fx.service->submit_template(2, img, submission(some_minutiae(5))); }) == 403);
    CHECK(status_of([&] { fx.service->submit_template(1, {"TEST", 9, 1}, submission({})); }) == 404);
    CHECK(status_of([&] { fx.service->submit_template(1, img, Submission{}); }) == 422);

    auto stale = submission(some_minutiae(4));
    stale.expected_revision = 0;
    try {
        fx.service->submit_template(1, img, stale);
        FAIL("expected RevisionConflict");
    } catch (const RevisionConflict& e) {
        CHECK(e.current_revision() == 1);
    }
    stale.expected_revision = 1;
    CHECK(fx.service->submit_template(1, img, stale).state.revision == 2);
}

TEST_CASE("service: off-schedule submission warns") {
    Fixture fx(20, 8, 4, 14);
    const ImageRef late{"TEST", 20, 1};  // day 2 for subject 1
    CHECK(fx.service->scheduled_day(late) == 2);
    CHECK(fx.service->current_day("TEST") == 1);
    const auto r = fx.service->submit_template(1, late, submission(some_minutiae(5)));
    REQUIRE(r.warnings.size() == 1);
    CHECK(r.warnings[0].find("day 2") != std::string::npos);
    fx.clock.advance_days(1);
    CHECK(fx.service->submit_template(1, {"TEST", 19, 1}, submission(some_minutiae(5))).warnings.empty());
}

TEST_CASE("service: review workflow") {
    Fixture fx;
    const ImageRef img{"TEST", 2, 3};
    const int marker = fx.service->assigned_subject(img);
    CHECK(marker == 3);
    CHECK(status_of([&] { fx.service->submit_review(1, img, ReviewAction::approve, std::nullopt); }) == 409);
    fx.service->submit_template(marker, img, submission(some_minutiae(10)));

    CHECK(status_of([&] { fx.service->submit_review(marker, img, ReviewAction::approve, std::nullopt); }) == 403);
    CHECK(status_of([&] { fx.service->submit_review(5, img, ReviewAction::approve, std::nullopt); }) == 403);

    auto st = fx.service->submit_review(1, img, ReviewAction::approve, std::nullopt);
    CHECK(st.status == TemplateStatus::under_review);
    st = fx.service->submit_review(4, img, ReviewAction::approve, std::nullopt);
    CHECK(st.status == TemplateStatus::under_review);
    // The marker cannot resubmit while it is being reviewed.
    CHECK(status_of([&] { fx.service->submit_template(marker, img, submission(some_minutiae(3))); }) == 409);

    // Reviewer 2 modifies after 1 and 4 approved: approvals are reset.
    auto changed = submission(some_minutiae(12, 5));
    changed.expected_revision = 1;
    st = fx.service->submit_review(2, img, ReviewAction::modify, changed);
    CHECK(st.status == TemplateStatus::under_review);
    CHECK(st.revision == 2);
    REQUIRE(st.reviews.size() == 1);
    CHECK(st.reviews[0].action == ReviewAction::modify);
    CHECK(st.record.views[0].minutiae == changed.minutiae);

    for (const int r : {1, 4}) CHECK(fx.service->submit_review(r, img, ReviewAction::approve, std::nullopt).status == TemplateStatus::under_review);
    st = fx.service->submit_review(2, img, ReviewAction::approve, std::nullopt);
    CHECK(st.status == TemplateStatus::final);
    CHECK(st.reviews.size() == 3);
    CHECK(status_of([&] { fx.service->submit_review(1, img, ReviewAction::approve, std::nullopt); }) == 409);

    const auto h = fx.service->history(img);
    REQUIRE(h.size() == 2);
    CHECK(h[0].revision == 1);
    CHECK(h[0].event == "submit");
    CHECK(h[1].revision == 2);
    CHECK(h[1].event == "modify");
    CHECK(h[1].actor == 2);
}

TEST_CASE("service: finalization soundness and gapless audit under random actions") {
    Fixture fx(1, 4, 4, 14);
    std::mt19937 rng(23);
    for (int impression = 1; impression <= 4; ++impression) {
        const ImageRef img{"TEST", 1, impression};
        const int marker = fx.service->assigned_subject(img);
        fx.service->submit_template(marker, img, submission(some_minutiae(6, impression)));
        std::map<int, ReviewAction> latest;  // oracle: reviewer -> latest action since last change
        std::vector<int> revisions{1};
        TemplateState st = *fx.service->get_template(img);
        for (int step = 0; step < 40 && st.status != TemplateStatus::final; ++step) {
            int reviewer = std::uniform_int_distribution<int>(1, 4)(rng);
            if (reviewer == marker) continue;
            const bool modify = std::uniform_int_distribution<int>(0, 4)(rng) == 0;
            if (modify) {
                st = fx.service->submit_review(reviewer, img, ReviewAction::modify, submission(some_minutiae(5, step)));
                std::erase_if(latest, [](const auto& kv) { return kv.second == ReviewAction::approve; });
                latest[reviewer] = ReviewAction::modify;
                revisions.push_back(st.revision);
            } else {
                st = fx.service->submit_review(reviewer, img, ReviewAction::approve, std::nullopt);
                latest[reviewer] = ReviewAction::approve;
            }
            bool all = true;
            for (int s = 1; s <= 4; ++s) {
                if (s == marker) continue;
                const auto it = latest.find(s);
                all = all && it != latest.end() && it->second == ReviewAction::approve;
            }
            REQUIRE((st.status == TemplateStatus::final) == all);
        }
        const auto h = fx.service->history(img);
        REQUIRE(h.size() == revisions.size());
        for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i].revision == static_cast<int>(i) + 1);
    }
}

TEST_CASE("service: render image and the daily viewing rule") {
    Fixture fx;
    const auto img = fx.service->render_image({"TEST", 1, 1});
    CHECK(img.width == 40);
    CHECK(img.height == 30);
    CHECK(img.px_per_cm == 197);
    CHECK(img.display_height_cm == 22.0);
    REQUIRE(img.png.size() > 8);
    CHECK(img.png[1] == 'P');
    {
        std::ofstream out(fx.dir / "check.png", std::ios::binary);
        out.write(reinterpret_cast<const char*>(img.png.data()), static_cast<std::streamsize>(img.png.size()));
    }
    const auto back = dataset::read_image_info(fx.dir / "check.png");
    REQUIRE(back);
    CHECK(back->width == 40);
    CHECK_THROWS_AS(fx.service->render_image({"TEST", 1, 1}, 0.0), InvalidArgument);

    // Subject 1 marks impressions 1 and 5 of each finger.
    CHECK_NOTHROW(fx.service->render_image({"TEST", 1, 1}, 22.0, 1));
    CHECK_NOTHROW(fx.service->render_image({"TEST", 1, 1}, 22.0, 1));
    CHECK(status_of([&] { fx.service->render_image({"TEST", 1, 5}, 22.0, 1); }) == 403);
    CHECK_NOTHROW(fx.service->render_image({"TEST", 2, 5}, 22.0, 1));
    CHECK_NOTHROW(fx.service->render_image({"TEST", 1, 5}, 22.0, 2));  // reviewing someone else's image
    fx.clock.advance_days(1);
    CHECK_NOTHROW(fx.service->render_image({"TEST", 1, 5}, 22.0, 1));

    // The rule survives a restart.
    MarkingService again(fx.config(), fx.clock.fn());
    CHECK(status_of([&] { again.render_image({"TEST", 1, 1}, 22.0, 1); }) == 403);

    std::ofstream(fx.dir / "images" / "2_2.png", std::ios::trunc) << "not an image";
    CHECK(status_of([&] { fx.service->render_image({"TEST", 2, 2}); }) == 422);
}

TEST_CASE("service: thermal image metadata") {
    testing::TempDir dir("thermal");
    auto manifest = write_database(dir.path(), "THERMAL", 1, 4, 300, 480, 512);
    ServiceConfig c;
    c.data_root = dir / "data";
    MarkingService service(c);
    service.register_database(manifest, dir.path());
    const auto img = service.render_image({"THERMAL", 1, 1}, 22.0);
    CHECK(img.height == 480);
    CHECK(img.px_per_cm == 202);
    CHECK(img.display_height_cm == 22.0);
    CHECK(22.0 / (480.0 / 202.0) == doctest::Approx(9.258).epsilon(1e-3));
}

TEST_CASE("service: persistence across restarts") {
    Fixture fx;
    const ImageRef img{"TEST", 1, 2};
    const auto st = fx.service->submit_template(2, img, submission(some_minutiae(7))).state;
    fx.clock.advance_days(3);
    MarkingService again(fx.config(), fx.clock.fn());
    CHECK(again.databases() == std::vector<std::string>{"TEST"});
    CHECK(again.get_template(img) == st);
    CHECK(again.current_day("TEST") == 4);
    CHECK(again.schedule("TEST") == fx.service->schedule("TEST"));
}

TEST_CASE("service: concurrent submissions keep revisions gapless") {
    Fixture fx;
    const ImageRef img{"TEST", 1, 1};
    std::atomic<int> conflicts{0};
    std::vector<std::jthread> threads;
    for (int t = 0; t < 4; ++t) {
        threads.emplace_back([&, t] {
            for (int k = 0; k < 10; ++k) {
                fx.service->submit_template(1, img, submission(some_minutiae(3, t * 100 + k)));
                auto stale = submission(some_minutiae(2));
                stale.expected_revision = 0;
                try {
                    fx.service->submit_template(1, img, stale);
                } catch (const RevisionConflict&) {
                    ++conflicts;
                }
                fx.service->submit_template(1 + (k % 4 == 0 ? 1 : 0) * 0, {"TEST", 2, 1}, submission(some_minutiae(2)));
            }
        });
    }
    threads.clear();
    CHECK(conflicts == 40);
    const auto h = fx.service->history(img);
    REQUIRE(h.size() == 40);
    for (std::size_t i = 0; i < h.size(); ++i) CHECK(h[i].revision == static_cast<int>(i) + 1);
    CHECK(fx.service->get_template({"TEST", 2, 1})->revision == 40);
}

TEST_CASE("service: export and ingest round trip") {
    Fixture fx;
    std::map<ImageRef, fmr::MinutiaeRecord> final_records;
    int n = 0;
    for (const auto& e : fx.manifest.entries) {
        const int marker = fx.service->assigned_subject(e.ref);
        ++n;
        auto s = submission(some_minutiae(8, n), n % 3 ? PerceivedQuality::good : PerceivedQuality::poor);
        s.singular_points.push_back({fmr::SingularKind::core, 10, 12, 40});
        const auto st = fx.service->submit_template(marker, e.ref, s).state;
        if (e.ref == ImageRef{"TEST", 2, 8}) continue;  // left unreviewed
        TemplateState last;
        for (int r = 1; r <= 4; ++r) {
            if (r != marker) last = fx.service->submit_review(r, e.ref, ReviewAction::approve, std::nullopt);
        }
        REQUIRE(last.status == TemplateStatus::final);
        final_records[e.ref] = last.record;
    }
    REQUIRE(final_records.size() == 15);

    const auto stats = fx.service->stats("TEST");
    CHECK(stats.total == 16);
    CHECK(stats.by_status.at(TemplateStatus::final) == 15);
    CHECK(stats.by_status.at(TemplateStatus::marked) == 1);
    CHECK(stats.completeness == doctest::Approx(15.0 / 16.0));

    const auto out = fx.dir / "export";
    const auto report = fx.service->export_database("TEST", out);
    CHECK(report.final_templates == 15);
    CHECK(report.completeness == doctest::Approx(0.9375));
    REQUIRE(report.missing.size() == 1);
    CHECK(report.missing[0] == ImageRef{"TEST", 2, 8});

    const auto loaded = dataset::load_template_dir(out, "TEST");
    CHECK(loaded.failures.empty());
    CHECK(loaded.records == final_records);
    const auto exported_manifest = dataset::load_manifest(out / "manifest.json");
    CHECK(exported_manifest.entries.size() == 15);
    CHECK(exported_manifest.entries[0].template_path == "1_1.iso-fmr");
    CHECK(exported_manifest.entries[0].perceived_quality.has_value());

    // ZIP: same bytes twice; readable by an independent unzipper when present.
    const auto zip_path = fx.dir / "TEST.zip";
    fx.service->export_database("TEST", zip_path);
    const auto zip1 = dataset::read_file_bytes(zip_path);
    CHECK(zip1 == fx.service->export_zip("TEST"));
    if (std::system("python3 -c 'import zipfile' >/dev/null 2>&1") == 0) {
        const auto unpacked = fx.dir / "unzipped";
        const std::string cmd = "python3 -c 'import sys, zipfile; z = zipfile.ZipFile(sys.argv[1]); "
                                "assert z.testzip() is None; z.extractall(sys.argv[2])' '" +
                                zip_path.string() + "' '" + unpacked.string() + "'";
        REQUIRE(std::system(cmd.c_str()) == 0);
        CHECK(dataset::load_template_dir(unpacked, "TEST").records == final_records);
        CHECK(std::filesystem::exists(unpacked / "export_report.json"));
    } else {
        MESSAGE("python3 zipfile unavailable; ZIP structure not independently checked");
    }
}

TEST_CASE("service: empty export") {
    Fixture fx;
    const auto report = fx.service->export_database("TEST", fx.dir / "empty");
    CHECK(report.final_templates == 0);
    CHECK(report.total == 16);
    CHECK(report.completeness == 0.0);
    std::size_t files = 0;
    for (const auto& e : std::filesystem::directory_iterator(fx.dir / "empty")) files += e.path().extension() == ".iso-fmr";
    CHECK(files == 0);
    CHECK(status_of([&] { fx.service->export_zip("NOPE"); }) == 404);
}

TEST_CASE("service config: file and environment") {
    testing::TempDir dir("config");
    {
        std::ofstream out(dir / "fingerlab.json");
        out << R"({"data_root": "store", "port": 9000, "capacity": 10, "subjects": 2, "manifests": ["m.json"]})";
    }
    auto c = load_service_config(dir / "fingerlab.json");
    CHECK(c.data_root == dir / "store");
    CHECK(c.port == 9000);
    CHECK(c.capacity == 10);
    CHECK(c.subjects == 2);
    REQUIRE(c.manifests.size() == 1);
    CHECK(c.manifests[0] == dir / "m.json");
    ::setenv("FINGERLAB_PORT", "9100", 1);
    ::setenv("FINGERLAB_SUBJECTS", "4", 1);
    c = load_service_config(dir / "fingerlab.json");
    CHECK(c.port == 9100);
    CHECK(c.subjects == 4);
    ::setenv("FINGERLAB_CAPACITY", "zero", 1);
    CHECK_THROWS_AS(load_service_config(std::nullopt), InvalidArgument);
    ::unsetenv("FINGERLAB_PORT");
    ::unsetenv("FINGERLAB_SUBJECTS");
    ::unsetenv("FINGERLAB_CAPACITY");
    CHECK(load_service_config(std::nullopt).port == 8080);
}

TEST_CASE("http api") {
    Fixture fx;
    HttpApi api(*fx.service);
    const int port = api.bind("127.0.0.1", 0);
    RunningServer server(api);
    httplib::Client cli("127.0.0.1", port);
    for (int i = 0; i < 100 && !cli.Get("/api/v1/databases"); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(10));

    auto dbs = cli.Get("/api/v1/databases");
    REQUIRE(dbs);
    CHECK(dbs->status == 200);
    CHECK(json::parse(dbs->body)[0]["db"] == "TEST");

    auto sched = cli.Get("/api/v1/schedule/1");
    REQUIRE(sched);
    const auto sj = json::parse(sched->body);
    // F=2 caps the day at two images, so the four images span two days.
    REQUIRE(sj.size() == 2);
    CHECK(sj[0]["images"].size() == 2);
    CHECK(sj[1]["images"].size() == 2);

    auto image = cli.Get("/api/v1/images/TEST/1/1.png", {{"X-Subject-Id", "1"}});
    REQUIRE(image);
    CHECK(image->status == 200);
    CHECK(image->get_header_value("Content-Type") == "image/png");
    CHECK(image->get_header_value("X-Px-Per-Cm") == "197");
    CHECK(image->get_header_value("X-Image-Height") == "30");
    CHECK(cli.Get("/api/v1/images/TEST/1/5.png", {{"X-Subject-Id", "1"}})->status == 403);
    CHECK(cli.Get("/api/v1/images/TEST/1/1.png?display_height_cm=0")->status == 400);
    CHECK(cli.Get("/api/v1/templates/TEST/1/1")->status == 404);

    const json body{{"minutiae", {{{"kind", "ending"}, {"x", 10}, {"y", 20}, {"angle_deg", 90}, {"quality", "good"}}}},
                    {"singular_points", {{{"kind", "core"}, {"x", 5}, {"y", 6}}}},
                    {"perceived_quality", "fair"},
                    {"expected_revision", 0},
                    {"fingerprint_class", "loop"}};
    CHECK(cli.Put("/api/v1/templates/TEST/1/1", body.dump(), "application/json")->status == 401);
    CHECK(cli.Put("/api/v1/templates/TEST/1/1", {{"X-Subject-Id", "2"}}, body.dump(), "application/json")->status == 403);
    auto put = cli.Put("/api/v1/templates/TEST/1/1", {{"X-Subject-Id", "1"}}, body.dump(), "application/json");
    REQUIRE(put);
    CHECK(put->status == 200);
    const auto state = json::parse(put->body);
    CHECK(state["revision"] == 1);
    CHECK(state["status"] == "marked");
    CHECK(state["minutiae"][0]["angle_units"] == 64);
    CHECK(state["minutiae"][0]["angle_deg"] == 90.0);
    CHECK(state["minutiae"][0]["quality"] == 80);
    CHECK(state["perceived_quality"] == "fair");
    CHECK(state["fingerprint_class"] == "loop");

    // Stored ISO bytes: x=10, y=20 (ending), angle 64, quality 80.
    const auto bytes = dataset::read_file_bytes(fx.config().data_root / "export" / "TEST" / "1_1.iso-fmr");
    REQUIRE(bytes.size() >= 34);
    CHECK(bytes[28] == 0x40);
    CHECK(bytes[29] == 10);
    CHECK(bytes[30] == 0x00);
    CHECK(bytes[31] == 20);
    CHECK(bytes[32] == 64);
    CHECK(bytes[33] == 80);

    const auto get = cli.Get("/api/v1/templates/TEST/1/1");
    CHECK(json::parse(get->body) == [&] {
        auto s = state;
        s.erase("warnings");
        return s;
    }());

    auto conflict = cli.Put("/api/v1/templates/TEST/1/1", {{"X-Subject-Id", "1"}}, body.dump(), "application/json");
    CHECK(conflict->status == 409);
    CHECK(json::parse(conflict->body)["current_revision"] == 1);

    json outside = body;
    outside["expected_revision"] = 1;
    outside["minutiae"][0]["x"] = 400;
    auto invalid = cli.Put("/api/v1/templates/TEST/1/1", {{"X-Subject-Id", "1"}}, outside.dump(), "application/json");
    CHECK(invalid->status == 422);
    CHECK(json::parse(invalid->body)["violations"][0]["code"] == "coordinate-out-of-bounds");
    CHECK(cli.Put("/api/v1/templates/TEST/1/1", {{"X-Subject-Id", "1"}}, "{nope", "application/json")->status == 400);

    const json approve{{"action", "approve"}};
    CHECK(cli.Post("/api/v1/templates/TEST/1/1/reviews", {{"X-Subject-Id", "1"}}, approve.dump(), "application/json")->status == 403);
    CHECK(cli.Post("/api/v1/templates/TEST/1/2/reviews", {{"X-Subject-Id", "1"}}, approve.dump(), "application/json")->status == 409);
    std::string last_status;
    for (const char* r : {"2", "3", "4"}) {
        auto res = cli.Post("/api/v1/templates/TEST/1/1/reviews", {{"X-Subject-Id", r}}, approve.dump(), "application/json");
        REQUIRE(res->status == 200);
        last_status = json::parse(res->body)["status"];
    }
    CHECK(last_status == "final");

    auto history = cli.Get("/api/v1/templates/TEST/1/1/history");
    CHECK(json::parse(history->body).size() == 1);

    auto stats = cli.Get("/api/v1/stats/TEST");
    const auto st = json::parse(stats->body);
    CHECK(st["total"] == 16);
    CHECK(st["status"]["final"] == 1);
    CHECK(st["perceived_quality"]["F"] == 1);

    auto zip = cli.Get("/api/v1/export/TEST.zip");
    REQUIRE(zip);
    CHECK(zip->status == 200);
    CHECK(zip->get_header_value("Content-Type") == "application/zip");
    CHECK(zip->body.substr(0, 4) == std::string("PK\x03\x04", 4));
    CHECK(cli.Get("/api/v1/stats/NOPE")->status == 404);
}
