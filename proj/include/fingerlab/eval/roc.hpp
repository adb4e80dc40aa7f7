#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "fingerlab/eval/protocol.hpp"

namespace fingerlab::eval {

struct RocPoint {
    double threshold = 0.0;
    double far = 0.0;  // imposter scores >= threshold
    double gar = 0.0;  // genuine scores >= threshold
};

// Descending thresholds. The first point is a sentinel just above the
// largest score (far = gar = 0); the rest are the distinct observed scores.
struct RocCurve {
    std::vector<RocPoint> points;
    std::size_t genuine_count = 0;
    std::size_t imposter_count = 0;
};

RocCurve compute_roc(std::span<const double> genuine, std::span<const double> imposter);
RocCurve compute_roc(const ScoreSet& scores);

struct Interval {
    double low = 0.0;
    double high = 0.0;
};

// Wald interval p +- z*sqrt(p(1-p)/n), clamped to [0, 1].
Interval binomial_ci(double p, std::size_t n, double z = 1.96);

struct OperatingPoint {
    double target_far = 0.0;
    double achieved_far = 0.0;
    double gar = 0.0;
    double ci_low = 0.0;
    double ci_high = 0.0;
    double threshold = 0.0;
};

// Lowest threshold whose far does not exceed the target; no interpolation.
OperatingPoint gar_at_far(const RocCurve& roc, double target_far);

}  // namespace fingerlab::eval
