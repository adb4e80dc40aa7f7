#include "synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fingerlab/fmr/angle.hpp"

namespace fingerlab::testing {

namespace {

int wrap_units(long v) { return static_cast<int>(((v % 256) + 256) % 256); }

bool on_canvas(double x, double y) { return x >= 0 && y >= 0 && x < kCanvas && y < kCanvas; }

}  // namespace

std::vector<fmr::Minutia> random_minutiae(std::mt19937_64& rng, int count, int width, int height, double min_spacing) {
    const double x0 = (kCanvas - width) / 2.0;
    const double y0 = (kCanvas - height) / 2.0;
    std::uniform_real_distribution<double> ux(x0, x0 + width - 1);
    std::uniform_real_distribution<double> uy(y0, y0 + height - 1);
    std::uniform_int_distribution<int> ua(0, 255);
    std::uniform_int_distribution<int> kind(1, 2);
    std::vector<fmr::Minutia> out;
    int attempts = 0;
    while (static_cast<int>(out.size()) < count && attempts++ < 100000) {
        const int x = static_cast<int>(std::lround(ux(rng)));
        const int y = static_cast<int>(std::lround(uy(rng)));
        const bool crowded = std::any_of(out.begin(), out.end(), [&](const fmr::Minutia& m) {
            return std::hypot(m.x - x, m.y - y) < min_spacing;
        });
        if (crowded) continue;
        out.push_back({static_cast<fmr::MinutiaKind>(kind(rng)), x, y, ua(rng), 60});
    }
    return out;
}

fmr::MinutiaeRecord make_record(std::vector<fmr::Minutia> minutiae, int width, int height) {
    fmr::MinutiaeRecord r;
    r.image_width = width;
    r.image_height = height;
    fmr::FingerView v;
    v.finger_quality = 80;
    v.minutiae = std::move(minutiae);
    r.views.push_back(std::move(v));
    return r;
}

std::vector<fmr::Minutia> rigid_motion(const std::vector<fmr::Minutia>& minutiae, double degrees, double cx, double cy,
                                       double tx, double ty) {
    const double rad = degrees * std::numbers::pi / 180.0;
    const double c = std::cos(rad);
    const double s = std::sin(rad);
    const long shift = std::lround(degrees / fmr::kDegreesPerAngleUnit);
    std::vector<fmr::Minutia> out;
    for (const auto& m : minutiae) {
        const double dx = m.x - cx;
        const double dy = m.y - cy;
        const double x = c * dx + s * dy + cx + tx;
        const double y = -s * dx + c * dy + cy + ty;
        if (!on_canvas(std::lround(x), std::lround(y))) continue;
        auto moved = m;
        moved.x = static_cast<int>(std::lround(x));
        moved.y = static_cast<int>(std::lround(y));
        moved.angle_units = wrap_units(m.angle_units + shift);
        out.push_back(moved);
    }
    return out;
}

void jitter(std::mt19937_64& rng, std::vector<fmr::Minutia>& minutiae, double position_sigma, double angle_sigma_units) {
    std::normal_distribution<double> pos(0.0, position_sigma);
    std::normal_distribution<double> ang(0.0, angle_sigma_units);
    for (auto& m : minutiae) {
        m.x = std::clamp(static_cast<int>(std::lround(m.x + pos(rng))), 0, kCanvas - 1);
        m.y = std::clamp(static_cast<int>(std::lround(m.y + pos(rng))), 0, kCanvas - 1);
        m.angle_units = wrap_units(m.angle_units + std::lround(ang(rng)));
    }
}

std::vector<fmr::Minutia> degrade(std::mt19937_64& rng, const std::vector<fmr::Minutia>& minutiae, double dropout,
                                  double spurious) {
    const auto n = minutiae.size();
    const auto drop = static_cast<std::size_t>(std::lround(dropout * static_cast<double>(n)));
    const auto add = static_cast<std::size_t>(std::lround(spurious * static_cast<double>(n)));
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> keep(order.begin() + static_cast<std::ptrdiff_t>(std::min(drop, n)), order.end());
    std::sort(keep.begin(), keep.end());
    std::vector<fmr::Minutia> out;
    for (const auto i : keep) out.push_back(minutiae[i]);
    if (n == 0) return out;

    int x0 = kCanvas, y0 = kCanvas, x1 = 0, y1 = 0;
    for (const auto& m : minutiae) {
        x0 = std::min(x0, m.x);
        y0 = std::min(y0, m.y);
        x1 = std::max(x1, m.x);
        y1 = std::max(y1, m.y);
    }
    std::uniform_int_distribution<int> ux(x0, x1);
    std::uniform_int_distribution<int> uy(y0, y1);
    std::uniform_int_distribution<int> ua(0, 255);
    for (std::size_t i = 0; i < add; ++i) out.push_back({fmr::MinutiaKind::ending, ux(rng), uy(rng), ua(rng), 30});
    return out;
}

SyntheticDatabase make_synthetic_database(std::uint64_t seed, int fingers, int impressions,
                                          const SyntheticOptions& o) {
    std::mt19937_64 rng(seed);
    SyntheticDatabase db;
    dataset::DatabaseSpec spec{"SYNTH", dataset::SensorKind::optical, kCanvas, kCanvas, 500, fingers, impressions};
    db.manifest = dataset::synthetic_manifest(spec);

    std::uniform_int_distribution<int> count(o.min_minutiae, o.max_minutiae);
    std::uniform_real_distribution<double> rot(-o.max_rotation, o.max_rotation);
    std::uniform_real_distribution<double> shift(-o.max_translation, o.max_translation);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    for (int f = 1; f <= fingers; ++f) {
        const auto base = random_minutiae(rng, count(rng));
        for (int k = 1; k <= impressions; ++k) {
            const double u = unit(rng);
            auto m = rigid_motion(base, rot(rng), kCanvas / 2.0, kCanvas / 2.0, shift(rng), shift(rng));
            jitter(rng, m, o.base_position_sigma + o.extra_position_sigma * u, 1.0 + 3.0 * u);
            m = degrade(rng, m, o.base_dropout + o.extra_dropout * u, o.extra_spurious * u);
            const dataset::ImageRef ref{"SYNTH", f, k};
            db.noise[ref] = u;
            db.degraded[ref] = make_record(degrade(rng, m, o.degraded_dropout, o.degraded_spurious));
            db.clean[ref] = make_record(std::move(m));
        }
    }
    return db;
}

std::map<dataset::ImageRef, dataset::PerceivedQuality> label_noisiest_poor(const SyntheticDatabase& db,
                                                                           std::size_t poor_count) {
    std::vector<std::pair<double, dataset::ImageRef>> by_noise;
    for (const auto& [ref, u] : db.noise) by_noise.emplace_back(u, ref);
    std::sort(by_noise.begin(), by_noise.end(), [](const auto& a, const auto& b) {
        return a.first != b.first ? a.first > b.first : a.second < b.second;
    });
    std::map<dataset::ImageRef, dataset::PerceivedQuality> labels;
    for (std::size_t i = 0; i < by_noise.size(); ++i) {
        dataset::PerceivedQuality q = dataset::PerceivedQuality::good;
        if (i < poor_count) {
            q = dataset::PerceivedQuality::poor;
        } else if (i < 2 * poor_count) {
            q = dataset::PerceivedQuality::fair;
        }
        labels[by_noise[i].second] = q;
    }
    return labels;
}

}  // namespace fingerlab::testing
