#pragma once

#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "fingerlab/fmr/record.hpp"
#include "fingerlab/simd/kernels.hpp"

namespace fingerlab::matcher {

// Reference point-pattern matcher. Uses minutia position and direction only;
// minutia type, quality, singular points and extended data are ignored.
struct MatcherParams {
    double distance_tolerance = 15.0;  // pixels at kReferenceResolution
    double angle_tolerance = 22.5;     // degrees, circular difference
    int min_overlap = 4;               // fewer pairs than this scores 0

    friend bool operator==(const MatcherParams&, const MatcherParams&) = default;
};

inline constexpr int kReferenceResolution = 197;  // px/cm, i.e. 500 DPI

// Throws InvalidArgument unless all values are positive and angle_tolerance < 180.
void validate(const MatcherParams& params);

// distance_tolerance scaled to a record resolution (0 means unknown -> 197).
double scaled_distance_tolerance(const MatcherParams& params, int resolution_px_per_cm);

struct Alignment {
    double rotation = 0.0;  // degrees, in [-180, 180)
    double dx = 0.0;        // translation applied after rotating about the origin
    double dy = 0.0;
    int ref_index = -1;     // anchor pair of the hypothesis; -1 when not derived from one
    int probe_index = -1;

    friend bool operator==(const Alignment&, const Alignment&) = default;
};

using MinutiaPair = std::pair<int, int>;  // (ref index, probe index)

struct MatchScore {
    double score = 0.0;
    int paired_count = 0;
    std::optional<Alignment> alignment;
    std::string diagnostic;  // set when the score is 0 for a structural reason
};

class Matcher {
public:
    explicit Matcher(MatcherParams params = {}, const simd::KernelTable& kernels = simd::best_kernels());

    const MatcherParams& params() const { return params_; }
    simd::Isa isa() const { return kernels_->isa; }

    // Exhaustive search over every (ref i, probe j) anchor: rotate the probe by
    // angle_i - angle_j, move probe j onto ref i and pair greedily. Keeps the
    // hypothesis with most pairs, then smallest summed pair distance, then the
    // lowest (i, j). `distance_tolerance` is in pixels (already scaled).
    // Throws InvalidArgument on empty input.
    Alignment estimate_alignment(std::span<const fmr::Minutia> ref, std::span<const fmr::Minutia> probe,
                                 double distance_tolerance) const;

    // Greedy one-to-one pairing: candidate pairs within both tolerances are
    // consumed in ascending (distance, ref index, probe index) order.
    std::vector<MinutiaPair> pair_minutiae(std::span<const fmr::Minutia> ref, std::span<const fmr::Minutia> probe,
                                           const Alignment& alignment, double distance_tolerance) const;

    // Scores the first view of each record: paired^2 / (n_ref * n_probe) when
    // paired >= min_overlap, else 0. Not symmetric in general.
    MatchScore match(const fmr::MinutiaeRecord& ref, const fmr::MinutiaeRecord& probe) const;

private:
    MatcherParams params_;
    const simd::KernelTable* kernels_;
};

// Free-function forms using the best available kernels.
Alignment estimate_alignment(std::span<const fmr::Minutia> ref, std::span<const fmr::Minutia> probe,
                             const MatcherParams& params = {});
std::vector<MinutiaPair> pair_minutiae(std::span<const fmr::Minutia> ref, std::span<const fmr::Minutia> probe,
                                       const Alignment& alignment, const MatcherParams& params = {});
MatchScore match_templates(const fmr::MinutiaeRecord& ref, const fmr::MinutiaeRecord& probe,
                           const MatcherParams& params = {});

}  // namespace fingerlab::matcher
