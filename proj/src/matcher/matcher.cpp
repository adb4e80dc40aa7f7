#include "fingerlab/matcher/matcher.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>

#include "fingerlab/error.hpp"
#include "fingerlab/fmr/angle.hpp"

namespace fingerlab::matcher {

namespace {

struct RotationTable {
    std::array<float, 256> cos{};
    std::array<float, 256> sin{};
    RotationTable() {
        for (int u = 0; u < 256; ++u) {
            const double rad = fmr::dequantize_angle(u) * std::numbers::pi / 180.0;
            cos[static_cast<std::size_t>(u)] = static_cast<float>(std::cos(rad));
            sin[static_cast<std::size_t>(u)] = static_cast<float>(std::sin(rad));
        }
    }
};

const RotationTable& rotations() {
    static const RotationTable table;
    return table;
}

struct Candidate {
    float dist_sq;
    std::int32_t ref;
    std::int32_t probe;
};

bool candidate_less(const Candidate& a, const Candidate& b) {
    if (a.dist_sq != b.dist_sq) return a.dist_sq < b.dist_sq;
    if (a.ref != b.ref) return a.ref < b.ref;
    return a.probe < b.probe;
}

struct HypothesisResult {
    int count = 0;
    double distance_sum = 0.0;
};

// Structure-of-arrays copies of both minutiae sets plus scratch buffers, so
// the hypothesis loop does not allocate.
class Workspace {
public:
    Workspace(std::span<const fmr::Minutia> ref, std::span<const fmr::Minutia> probe, double distance_tolerance,
              double angle_tolerance, const simd::KernelTable& kernels)
        : kernels_(kernels) {
        load(ref, rx_, ry_, ra_);
        load(probe, px_, py_, pa_);
        tx_.resize(px_.size());
        ty_.resize(py_.size());
        hit_index_.resize(rx_.size());
        hit_dist_.resize(rx_.size());
        ref_used_.resize(rx_.size());
        probe_used_.resize(px_.size());
        candidates_.reserve(rx_.size() * 4);
        const auto tol = static_cast<float>(distance_tolerance);
        max_dist_sq_ = tol * tol;
        max_angle_units_ = static_cast<std::int32_t>(std::floor(angle_tolerance / fmr::kDegreesPerAngleUnit + 1e-9));
    }

    std::size_t ref_size() const { return rx_.size(); }
    std::size_t probe_size() const { return px_.size(); }
    std::int32_t ref_angle(std::size_t i) const { return ra_[i]; }
    std::int32_t probe_angle(std::size_t j) const { return pa_[j]; }

    simd::RigidTransform anchor_transform(std::size_t i, std::size_t j, int rotation_units) const {
        const auto& rot = rotations();
        const auto u = static_cast<std::size_t>(rotation_units);
        return {rot.cos[u], rot.sin[u], px_[j], py_[j], rx_[i], ry_[i]};
    }

    // Greedy pairing under one hypothesis. When `pairs` is non-null the
    // accepted pairs are appended in consumption order.
    HypothesisResult evaluate(const simd::RigidTransform& t, int rotation_units, std::vector<MinutiaPair>* pairs) {
        kernels_.rigid_transform(px_.data(), py_.data(), px_.size(), t, tx_.data(), ty_.data());
        candidates_.clear();
        simd::CandidateQuery q;
        q.max_dist_sq = max_dist_sq_;
        q.max_angle_units = max_angle_units_;
        for (std::size_t m = 0; m < px_.size(); ++m) {
            q.x = tx_[m];
            q.y = ty_[m];
            q.angle_units = (pa_[m] + rotation_units) & 0xFF;
            const std::size_t hits = kernels_.collect_candidates(rx_.data(), ry_.data(), ra_.data(), rx_.size(), q,
                                                                 hit_index_.data(), hit_dist_.data());
            for (std::size_t h = 0; h < hits; ++h) {
                candidates_.push_back({hit_dist_[h], hit_index_[h], static_cast<std::int32_t>(m)});
            }
        }
        std::sort(candidates_.begin(), candidates_.end(), candidate_less);
        std::fill(ref_used_.begin(), ref_used_.end(), 0);
        std::fill(probe_used_.begin(), probe_used_.end(), 0);
        HypothesisResult result;
        for (const auto& c : candidates_) {
            if (ref_used_[static_cast<std::size_t>(c.ref)] || probe_used_[static_cast<std::size_t>(c.probe)]) continue;
            ref_used_[static_cast<std::size_t>(c.ref)] = 1;
            probe_used_[static_cast<std::size_t>(c.probe)] = 1;
            ++result.count;
            result.distance_sum += std::sqrt(static_cast<double>(c.dist_sq));
            if (pairs) pairs->emplace_back(c.ref, c.probe);
        }
        return result;
    }

    Alignment describe_anchor(std::size_t i, std::size_t j, int rotation_units) const {
        const auto t = anchor_transform(i, j, rotation_units);
        Alignment a;
        double deg = fmr::dequantize_angle(rotation_units);
        if (deg >= 180.0) deg -= 360.0;
        a.rotation = deg;
        const double c = t.cos;
        const double s = t.sin;
        a.dx = rx_[i] - (c * px_[j] + s * py_[j]);
        a.dy = ry_[i] - (c * py_[j] - s * px_[j]);
        a.ref_index = static_cast<int>(i);
        a.probe_index = static_cast<int>(j);
        return a;
    }

private:
    static void load(std::span<const fmr::Minutia> src, std::vector<float>& x, std::vector<float>& y,
                     std::vector<std::int32_t>& a) {
        x.reserve(src.size());
        y.reserve(src.size());
        a.reserve(src.size());
        for (const auto& m : src) {
            x.push_back(static_cast<float>(m.x));
            y.push_back(static_cast<float>(m.y));
            a.push_back(m.angle_units & 0xFF);
        }
    }

    const simd::KernelTable& kernels_;
    std::vector<float> rx_, ry_, px_, py_, tx_, ty_, hit_dist_;
    std::vector<std::int32_t> ra_, pa_, hit_index_;
    std::vector<std::uint8_t> ref_used_, probe_used_;
    std::vector<Candidate> candidates_;
    float max_dist_sq_ = 0.0f;
    std::int32_t max_angle_units_ = 0;
};

int rotation_units_between(std::int32_t ref_angle, std::int32_t probe_angle) {
    return (ref_angle - probe_angle) & 0xFF;
}

}  // namespace

void validate(const MatcherParams& params) {
    if (!(params.distance_tolerance > 0.0)) throw InvalidArgument("distance_tolerance must be positive");
    if (!(params.angle_tolerance > 0.0 && params.angle_tolerance < 180.0)) {
        throw InvalidArgument("angle_tolerance must be in (0, 180)");
    }
    if (params.min_overlap < 1) throw InvalidArgument("min_overlap must be positive");
}

double scaled_distance_tolerance(const MatcherParams& params, int resolution_px_per_cm) {
    const int res = resolution_px_per_cm > 0 ? resolution_px_per_cm : kReferenceResolution;
    return params.distance_tolerance * res / kReferenceResolution;
}

Matcher::Matcher(MatcherParams params, const simd::KernelTable& kernels) : params_(params), kernels_(&kernels) {
    validate(params_);
}

Alignment Matcher::estimate_alignment(std::span<const fmr::Minutia> ref, std::span<const fmr::Minutia> probe,
                                      double distance_tolerance) const {
    if (ref.empty() || probe.empty()) throw InvalidArgument("alignment needs non-empty minutiae sets");
    Workspace ws(ref, probe, distance_tolerance, params_.angle_tolerance, *kernels_);
    HypothesisResult best{-1, 0.0};
    std::size_t best_i = 0;
    std::size_t best_j = 0;
    for (std::size_t i = 0; i < ws.ref_size(); ++i) {
        for (std::size_t j = 0; j < ws.probe_size(); ++j) {
            const int units = rotation_units_between(ws.ref_angle(i), ws.probe_angle(j));
            const auto r = ws.evaluate(ws.anchor_transform(i, j, units), units, nullptr);
            if (r.count > best.count || (r.count == best.count && r.distance_sum < best.distance_sum)) {
                best = r;
                best_i = i;
                best_j = j;
            }
        }
    }
    return ws.describe_anchor(best_i, best_j,
                              rotation_units_between(ws.ref_angle(best_i), ws.probe_angle(best_j)));
}

std::vector<MinutiaPair> Matcher::pair_minutiae(std::span<const fmr::Minutia> ref,
                                                std::span<const fmr::Minutia> probe, const Alignment& alignment,
                                                double distance_tolerance) const {
    std::vector<MinutiaPair> pairs;
    if (ref.empty() || probe.empty()) return pairs;
    Workspace ws(ref, probe, distance_tolerance, params_.angle_tolerance, *kernels_);
    const bool anchored = alignment.ref_index >= 0 && alignment.probe_index >= 0 &&
                          static_cast<std::size_t>(alignment.ref_index) < ref.size() &&
                          static_cast<std::size_t>(alignment.probe_index) < probe.size();
    if (anchored) {
        const auto i = static_cast<std::size_t>(alignment.ref_index);
        const auto j = static_cast<std::size_t>(alignment.probe_index);
        const int units = rotation_units_between(ws.ref_angle(i), ws.probe_angle(j));
        ws.evaluate(ws.anchor_transform(i, j, units), units, &pairs);
    } else {
        double deg = std::fmod(alignment.rotation, 360.0);
        if (deg < 0) deg += 360.0;
        const int units = fmr::quantize_angle(deg >= 360.0 ? 0.0 : deg);
        const double rad = alignment.rotation * std::numbers::pi / 180.0;
        const simd::RigidTransform t{static_cast<float>(std::cos(rad)), static_cast<float>(std::sin(rad)), 0.0f, 0.0f,
                                     static_cast<float>(alignment.dx), static_cast<float>(alignment.dy)};
        ws.evaluate(t, units, &pairs);
    }
    return pairs;
}

MatchScore Matcher::match(const fmr::MinutiaeRecord& ref, const fmr::MinutiaeRecord& probe) const {
    MatchScore result;
    if (ref.views.empty() || probe.views.empty()) {
        result.diagnostic = "record without finger views";
        return result;
    }
    const auto& ref_minutiae = ref.views.front().minutiae;
    const auto& probe_minutiae = probe.views.front().minutiae;
    if (ref_minutiae.empty() || probe_minutiae.empty()) {
        result.diagnostic = "empty minutiae list";
        return result;
    }
    const double tolerance = scaled_distance_tolerance(params_, ref.resolution_x);
    const auto alignment = estimate_alignment(ref_minutiae, probe_minutiae, tolerance);
    const auto pairs = pair_minutiae(ref_minutiae, probe_minutiae, alignment, tolerance);
    result.alignment = alignment;
    result.paired_count = static_cast<int>(pairs.size());
    if (result.paired_count >= params_.min_overlap) {
        const double p = result.paired_count;
        result.score = p * p / (static_cast<double>(ref_minutiae.size()) * static_cast<double>(probe_minutiae.size()));
    }
    return result;
}

Alignment estimate_alignment(std::span<const fmr::Minutia> ref, std::span<const fmr::Minutia> probe,
                             const MatcherParams& params) {
    return Matcher(params).estimate_alignment(ref, probe, params.distance_tolerance);
}

std::vector<MinutiaPair> pair_minutiae(std::span<const fmr::Minutia> ref, std::span<const fmr::Minutia> probe,
                                       const Alignment& alignment, const MatcherParams& params) {
    return Matcher(params).pair_minutiae(ref, probe, alignment, params.distance_tolerance);
}

MatchScore match_templates(const fmr::MinutiaeRecord& ref, const fmr::MinutiaeRecord& probe,
                           const MatcherParams& params) {
    return Matcher(params).match(ref, probe);
}

}  // namespace fingerlab::matcher
