#include "fingerlab/eval/roc.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>

#include "fingerlab/error.hpp"

namespace fingerlab::eval {

RocCurve compute_roc(std::span<const double> genuine, std::span<const double> imposter) {
    if (genuine.empty() || imposter.empty()) throw InvalidArgument("ROC needs genuine and imposter scores");
    std::vector<double> g(genuine.begin(), genuine.end());
    std::vector<double> im(imposter.begin(), imposter.end());
    std::sort(g.begin(), g.end(), std::greater<>());
    std::sort(im.begin(), im.end(), std::greater<>());

    RocCurve roc;
    roc.genuine_count = g.size();
    roc.imposter_count = im.size();
    const double top = std::max(g.front(), im.front());
    roc.points.push_back({std::nextafter(top, std::numeric_limits<double>::infinity()), 0.0, 0.0});

    const double ng = static_cast<double>(g.size());
    const double ni = static_cast<double>(im.size());
    std::size_t gi = 0;
    std::size_t ii = 0;
    while (gi < g.size() || ii < im.size()) {
        double t = -std::numeric_limits<double>::infinity();
        if (gi < g.size()) t = g[gi];
        if (ii < im.size()) t = std::max(t, im[ii]);
        while (gi < g.size() && g[gi] >= t) ++gi;
        while (ii < im.size() && im[ii] >= t) ++ii;
        roc.points.push_back({t, static_cast<double>(ii) / ni, static_cast<double>(gi) / ng});
    }
    return roc;
}

RocCurve compute_roc(const ScoreSet& scores) {
    const auto g = scores.genuine_scores();
    const auto i = scores.imposter_scores();
    return compute_roc(g, i);
}

Interval binomial_ci(double p, std::size_t n, double z) {
    if (n == 0) throw InvalidArgument("confidence interval needs at least one trial");
    if (!(p >= 0.0 && p <= 1.0)) throw InvalidArgument("proportion must be in [0, 1]");
    const double half = z * std::sqrt(p * (1.0 - p) / static_cast<double>(n));
    return {std::max(0.0, p - half), std::min(1.0, p + half)};
}

OperatingPoint gar_at_far(const RocCurve& roc, double target_far) {
    if (!(target_far > 0.0 && target_far < 1.0)) throw InvalidArgument("target FAR must be in (0, 1)");
    if (roc.points.empty()) throw InvalidArgument("empty ROC curve");
    // far is non-decreasing along the curve, so the last admissible point
    // has the lowest threshold.
    const RocPoint* chosen = &roc.points.front();
    for (const auto& p : roc.points) {
        if (p.far > target_far) break;
        chosen = &p;
    }
    OperatingPoint op;
    op.target_far = target_far;
    op.achieved_far = chosen->far;
    op.gar = chosen->gar;
    op.threshold = chosen->threshold;
    const auto ci = binomial_ci(chosen->gar, roc.genuine_count);
    op.ci_low = ci.low;
    op.ci_high = ci.high;
    return op;
}

}  // namespace fingerlab::eval
