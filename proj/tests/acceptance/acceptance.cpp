// Acceptance run: one PASS/FAIL/SKIP line per criterion. Exit status is
// nonzero when any criterion fails.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "fingerlab/dataset/stats.hpp"
#include "fingerlab/dataset/templates.hpp"
#include "fingerlab/eval/pairs.hpp"
#include "fingerlab/eval/protocol.hpp"
#include "fingerlab/eval/quality.hpp"
#include "fingerlab/eval/roc.hpp"
#include "fingerlab/fmr/codec.hpp"
#include "fingerlab/marking/schedule.hpp"
#include "fingerlab/matcher/matcher.hpp"
#include "support/random_records.hpp"
#include "support/synthetic.hpp"

using namespace fingerlab;
namespace t = fingerlab::testing;
using dataset::ImageRef;

namespace {

// Pinned tolerances.
constexpr double kCiDecimalTolerance = 1e-9;     // one-decimal percent values compared after rounding
constexpr double kHalfWidthTolerancePp = 0.1;    // percentage points
constexpr double kRigidMotionTolerance = 0.02;   // absolute score change
constexpr double kCountStatTolerance = 0.1;      // mean and std, real-data fixture
constexpr std::uint64_t kSyntheticSeed = 2024;

enum class Verdict { pass, fail, skip };

struct Outcome {
    Verdict verdict = Verdict::fail;
    std::string detail;
};

int failures = 0;

void criterion(const char* name, double budget_seconds, const std::function<Outcome()>& body) {
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {Verdict::fail, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.verdict == Verdict::pass && budget_seconds > 0 && secs >= budget_seconds) {
        o.verdict = Verdict::fail;
        o.detail += "; over the time budget";
    }
    const char* tag = o.verdict == Verdict::pass ? "PASS" : o.verdict == Verdict::fail ? "FAIL" : "SKIP";
    if (o.verdict == Verdict::fail) ++failures;
    char timing[64];
    if (budget_seconds > 0) {
        std::snprintf(timing, sizeof timing, "[%.2f s, budget %.0f s]", secs, budget_seconds);
    } else {
        std::snprintf(timing, sizeof timing, "[%.2f s]", secs);
    }
    std::printf("%s %-22s %s %s\n", tag, name, o.detail.c_str(), timing);
    std::fflush(stdout);
}

int workers() { return std::max(1, static_cast<int>(std::thread::hardware_concurrency())); }

fmr::MinutiaeRecord rec(std::vector<fmr::Minutia> m) { return t::make_record(std::move(m)); }

// Pair counts --------------------------------------------------------------

Outcome pair_counts() {
    const auto pairs = eval::generate_match_pairs("FVC2002_DB1A", 100, 8);
    const auto c = eval::count_pairs(pairs);
    bool ok = c.genuine == 5600 && c.imposter == 633600;
    std::string detail = "F=100 K=8: " + std::to_string(c.genuine) + " genuine, " + std::to_string(c.imposter) +
                         " imposter";
    int shapes = 0, agree = 0;
    for (int f = 1; f <= 5; ++f) {
        for (int k = 1; k <= 5; ++k) {
            // Brute force: every ordered pair of distinct (finger, impression).
            std::vector<eval::MatchPair> oracle;
            for (int pf = 1; pf <= f; ++pf)
                for (int pk = 1; pk <= k; ++pk)
                    for (int gf = 1; gf <= f; ++gf)
                        for (int gk = 1; gk <= k; ++gk) {
                            if (pf == gf && pk == gk) continue;
                            oracle.push_back({{"D", pf, pk}, {"D", gf, gk},
                                              pf == gf ? eval::PairKind::genuine : eval::PairKind::imposter});
                        }
            ++shapes;
            if (eval::generate_match_pairs("D", f, k) == oracle) ++agree;
        }
    }
    ok = ok && agree == shapes;
    detail += "; brute-force oracle equal on " + std::to_string(agree) + "/" + std::to_string(shapes) + " shapes";
    return {ok ? Verdict::pass : Verdict::fail, detail};
}

// CI agreement -------------------------------------------------------------

double round1(double percent) { return std::round(percent * 10.0) / 10.0; }

Outcome ci_agreement() {
    const auto a = eval::binomial_ci(0.900, 5600);
    const double lo = round1(a.low * 100.0), hi = round1(a.high * 100.0);
    bool ok = std::abs(lo - 89.2) < kCiDecimalTolerance && std::abs(hi - 90.8) < kCiDecimalTolerance;
    const auto b = eval::binomial_ci(0.991, 5600);
    const double half = (b.high - b.low) / 2.0 * 100.0;
    const double published_half = (99.4 - 98.8) / 2.0;
    ok = ok && std::abs(half - published_half) <= kHalfWidthTolerancePp;
    char buf[200];
    std::snprintf(buf, sizeof buf, "p=0.900 n=5600 -> [%.1f, %.1f] (want [89.2, 90.8]); p=0.991 half-width %.3f pp vs %.3f pp",
                  lo, hi, half, published_half);
    return {ok ? Verdict::pass : Verdict::fail, buf};
}

// Codec --------------------------------------------------------------------

fmr::MinutiaeRecord golden_record() {
    fmr::MinutiaeRecord r;
    r.image_width = 388;
    r.image_height = 374;
    r.resolution_x = 197;
    r.resolution_y = 197;
    fmr::FingerView v;
    v.finger_position = 2;
    v.finger_quality = 80;
    v.minutiae = {{fmr::MinutiaKind::ending, 100, 200, 64, 60}, {fmr::MinutiaKind::bifurcation, 300, 50, 200, 80}};
    v.singular_points = {{fmr::SingularKind::core, 150, 160, 32}, {fmr::SingularKind::delta, 120, 300, std::nullopt}};
    v.extended_bytes = {0x00, 0x01, 0x00, 0x06, 0xAB, 0xCD};
    r.views.push_back(v);
    return r;
}

Outcome codec() {
    std::mt19937_64 rng(1000);
    int exact = 0;
    for (int i = 0; i < 1000; ++i) {
        const auto r = t::random_valid_record(rng);
        if (fmr::decode_record(fmr::encode_record(r)) == r) ++exact;
    }
    const auto golden = fmr::decode_record(dataset::read_file_bytes(std::string(FINGERLAB_TEST_DATA) + "/golden.iso-fmr"));
    const bool golden_ok = golden == golden_record();

    fmr::MinutiaeRecord r;
    r.image_width = 388;
    r.image_height = 374;
    fmr::FingerView v;
    for (int i = 0; i < 39; ++i) v.minutiae.push_back({fmr::MinutiaKind::ending, 10 + i, 20 + i, i, 50});
    r.views.push_back(v);
    const auto size = fmr::encode_record(r).size();

    const bool ok = exact == 1000 && golden_ok && size == 264;
    return {ok ? Verdict::pass : Verdict::fail,
            std::to_string(exact) + "/1000 random round trips exact; golden " + (golden_ok ? "matches" : "differs") +
                "; M=39 length " + std::to_string(size) + " (want 264)"};
}

// Matcher ------------------------------------------------------------------

Outcome matcher_properties() {
    // Self match.
    int self_ok = 0;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(5000 + seed);
        const auto r = rec(t::random_minutiae(rng, std::uniform_int_distribution<int>(20, 50)(rng)));
        if (matcher::match_templates(r, r).score == 1.0) ++self_ok;
    }

    // Rigid motion of a jittered impression.
    double worst = 0.0;
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(6000 + seed);
        const auto base = t::random_minutiae(rng, 35, 260, 300);
        auto probe = base;
        t::jitter(rng, probe, 1.5, 1.5);
        const double s0 = matcher::match_templates(rec(base), rec(probe)).score;
        std::uniform_real_distribution<double> rot(-40.0, 40.0), sh(-40.0, 40.0);
        const auto moved = t::rigid_motion(probe, rot(rng), 320.0, 320.0, sh(rng), sh(rng));
        if (moved.size() != probe.size()) throw Error("rigid motion left the canvas");
        worst = std::max(worst, std::abs(matcher::match_templates(rec(base), rec(moved)).score - s0));
    }

    // Mean score across spurious + dropout levels.
    const double levels[] = {0.0, 0.10, 0.25, 0.50};
    double mean[4] = {};
    for (int seed = 0; seed < 100; ++seed) {
        std::mt19937_64 rng(7000 + seed);
        const auto base = t::random_minutiae(rng, 40);
        for (int l = 0; l < 4; ++l) {
            std::mt19937_64 noise(8000 + seed);
            auto probe = base;
            t::jitter(noise, probe, 10.0 * levels[l], 0.0);
            probe = t::degrade(noise, probe, levels[l], levels[l]);
            mean[l] += matcher::match_templates(rec(base), rec(probe)).score / 100.0;
        }
    }
    const bool monotone = mean[0] > mean[1] && mean[1] > mean[2] && mean[2] > mean[3];
    const bool ok = self_ok == 100 && worst <= kRigidMotionTolerance && monotone;
    char buf[240];
    std::snprintf(buf, sizeof buf,
                  "self-match 1.0 on %d/100; rigid-motion max |dscore| %.4f (<= %.2f); mean score 0/10/25/50%%: "
                  "%.3f > %.3f > %.3f > %.3f",
                  self_ok, worst, kRigidMotionTolerance, mean[0], mean[1], mean[2], mean[3]);
    return {ok ? Verdict::pass : Verdict::fail, buf};
}

// Headline ordering --------------------------------------------------------

Outcome headline_ordering() {
    const auto db = t::make_synthetic_database(kSyntheticSeed, 10, 8);
    const auto pairs = eval::generate_match_pairs(db.manifest);
    const matcher::Matcher m;
    eval::ProtocolOptions o;
    o.workers = workers();
    const auto clean = eval::compute_roc(eval::execute_protocol(pairs, db.clean, m, o));
    const auto degraded = eval::compute_roc(eval::execute_protocol(pairs, db.degraded, m, o));
    bool ok = true;
    std::string detail = "GAR clean vs degraded:";
    for (const double far : {1e-3, 1e-2, 1e-1}) {
        const double a = eval::gar_at_far(clean, far).gar, b = eval::gar_at_far(degraded, far).gar;
        ok = ok && a >= b;
        char buf[96];
        std::snprintf(buf, sizeof buf, " FAR %g: %.3f vs %.3f;", far, a, b);
        detail += buf;
    }
    detail.pop_back();
    return {ok ? Verdict::pass : Verdict::fail, detail};
}

// Quality rejection --------------------------------------------------------

Outcome quality_rejection() {
    // Exact fraction on the full 100 x 8 protocol.
    eval::QualityLabels full;
    int n = 0;
    for (int f = 1; f <= 100; ++f) {
        for (int k = 1; k <= 8; ++k) {
            // Every 25th image index in a fixed stride pattern: 6 of each 25 are poor.
            full[{"D", f, k}] = (n++ % 25) < 6 ? dataset::PerceivedQuality::poor : dataset::PerceivedQuality::good;
        }
    }
    const auto fq = eval::filter_by_quality(eval::generate_match_pairs("D", 100, 8), full);
    const bool exact_full = fq.rejection_fraction == 0.24 && fq.rejected_images == 192;

    // Synthetic database of 100 images, poor labels on the noisiest 24.
    const auto db = t::make_synthetic_database(kSyntheticSeed + 1, 20, 5);
    const auto labels_map = t::label_noisiest_poor(db, 24);
    const eval::QualityLabels labels(labels_map.begin(), labels_map.end());
    const auto pairs = eval::generate_match_pairs(db.manifest);
    const matcher::Matcher m;
    eval::ProtocolOptions o;
    o.workers = workers();
    bool ok = exact_full;
    char buf[160];
    std::snprintf(buf, sizeof buf, "100x8: rejected %zu/800 = %.4f", fq.rejected_images, fq.rejection_fraction);
    std::string detail = buf;
    for (const auto& [name, templates] : {std::pair{"clean", &db.clean}, std::pair{"degraded", &db.degraded}}) {
        const auto all = eval::execute_protocol(pairs, *templates, m, o);
        double rejected = 0.0;
        const auto kept = eval::filter_by_quality(all, labels, &rejected);
        const double g_all = eval::gar_at_far(eval::compute_roc(all), 1e-3).gar;
        const double g_kept = eval::gar_at_far(eval::compute_roc(kept), 1e-3).gar;
        ok = ok && rejected == 0.24 && g_kept >= g_all;
        std::snprintf(buf, sizeof buf, "; synthetic 20x5 %s: rejected %.4f, GAR@1e-3 filtered %.3f vs all %.3f", name,
                      rejected, g_kept, g_all);
        detail += buf;
    }
    return {ok ? Verdict::pass : Verdict::fail, detail};
}

// Schedule -----------------------------------------------------------------

Outcome schedule_validity() {
    const marking::ScheduleShape shape{"FVC2002_DB1A", 100, 8, 4, 14};
    const auto s = marking::generate_marking_schedule("FVC2002_DB1A", 100, 8, 4, 14);
    auto problems = marking::validate_schedule(s, shape);
    bool days_ok = true;
    for (int subject = 1; subject <= 4; ++subject) days_ok = days_ok && marking::schedule_days(s, subject) == 15;

    std::mt19937 rng(99);
    int instances = 0, valid = 0;
    for (int f = 1; f <= 8; ++f) {
        for (int subjects = 1; subjects <= 8; ++subjects) {
            for (int k = subjects; k <= 8; k += subjects) {
                const int cap = std::uniform_int_distribution<int>(1, 14)(rng);
                ++instances;
                const auto r = marking::generate_marking_schedule("R", f, k, subjects, cap);
                if (marking::validate_schedule(r, {"R", f, k, subjects, cap}).empty()) ++valid;
            }
        }
    }
    const bool ok = problems.empty() && days_ok && valid == instances;
    std::string detail = "F=100 K=8 S=4 cap 14: " + std::to_string(problems.size()) + " violations, " +
                         (days_ok ? "15 days per subject" : "day count wrong") + "; random F,K,S<=8: " +
                         std::to_string(valid) + "/" + std::to_string(instances) + " valid";
    if (!problems.empty()) detail += "; first: " + problems.front();
    return {ok ? Verdict::pass : Verdict::fail, detail};
}

// Real data ----------------------------------------------------------------

struct CountRow {
    const char* db;
    double mean, std;
    int min, max;
};

// Manual-marking rows of the published count table.
constexpr CountRow kPublishedCounts[] = {
    {"FVC2002DB1A", 39.1, 11.4, 9, 92},
    {"FVC2002DB3A", 23.8, 7.6, 6, 49},
    {"FVC2004DB1A", 41.0, 12.6, 11, 80},
    {"FVC2004DB3A", 40.8, 11.9, 11, 76},
};

Outcome real_data() {
    const char* root = std::getenv("FINGERLAB_REAL_DATA");
    if (!root || !std::filesystem::is_directory(root)) {
        return {Verdict::skip, "FINGERLAB_REAL_DATA not set; distributed templates unavailable"};
    }
    bool ok = true;
    int checked = 0;
    std::string detail;
    for (const auto& row : kPublishedCounts) {
        auto dir = std::filesystem::path(root) / row.db;
        if (!std::filesystem::is_directory(dir)) continue;
        const auto set = dataset::load_template_dir(dir, row.db);
        const auto s = dataset::minutiae_count_stats(set.records);
        const bool good = std::abs(s.mean - row.mean) <= kCountStatTolerance &&
                          std::abs(s.std - row.std) <= kCountStatTolerance && s.min == row.min && s.max == row.max;
        ok = ok && good && set.failures.empty();
        ++checked;
        char buf[200];
        std::snprintf(buf, sizeof buf, "%s%s: %zu templates mean %.2f std %.2f min %d max %d (want %.1f %.1f %d %d)",
                      detail.empty() ? "" : "; ", row.db, s.images, s.mean, s.std, s.min, s.max, row.mean, row.std,
                      row.min, row.max);
        detail += buf;
    }
    if (checked == 0) return {Verdict::skip, std::string("no known database directories under ") + root};
    return {ok ? Verdict::pass : Verdict::fail, detail};
}

}  // namespace

int main() {
    std::printf("kernels: %s\n", std::string(simd::to_string(simd::best_kernels().isa)).c_str());
    criterion("pair-count-exactness", 1, pair_counts);
    criterion("ci-agreement", 1, ci_agreement);
    criterion("codec-soundness", 5, codec);
    criterion("matcher-properties", 120, matcher_properties);
    criterion("headline-ordering", 300, headline_ordering);
    criterion("quality-rejection", 300, quality_rejection);
    criterion("schedule-validity", 1, schedule_validity);
    criterion("real-data-counts", 0, real_data);
    std::printf("%d failed\n", failures);
    return failures == 0 ? 0 : 1;
}
