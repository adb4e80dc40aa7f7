#include "fingerlab/eval/quality.hpp"

#include <set>

namespace fingerlab::eval {

namespace {

bool acceptable(const QualityLabels& labels, const dataset::ImageRef& ref) {
    const auto it = labels.find(ref);
    if (it == labels.end()) throw ProtocolError("no quality label for " + ref.label());
    return it->second != dataset::PerceivedQuality::poor;
}

}  // namespace

QualityFilter filter_by_quality(const std::vector<MatchPair>& pairs, const QualityLabels& labels) {
    QualityFilter out;
    std::set<dataset::ImageRef> images;
    std::set<dataset::ImageRef> rejected;
    for (const auto& p : pairs) {
        for (const auto* ref : {&p.probe, &p.gallery}) {
            if (images.insert(*ref).second && !acceptable(labels, *ref)) rejected.insert(*ref);
        }
    }
    for (const auto& p : pairs) {
        if (!rejected.contains(p.probe) && !rejected.contains(p.gallery)) out.pairs.push_back(p);
    }
    out.images = images.size();
    out.rejected_images = rejected.size();
    out.rejection_fraction =
        images.empty() ? 0.0 : static_cast<double>(rejected.size()) / static_cast<double>(images.size());
    return out;
}

ScoreSet filter_by_quality(const ScoreSet& scores, const QualityLabels& labels, double* rejection_fraction) {
    const auto f = filter_by_quality(scores.pairs, labels);
    if (rejection_fraction) *rejection_fraction = f.rejection_fraction;
    return filter_scores(scores, [&](const MatchPair& p) { return acceptable(labels, p.probe) && acceptable(labels, p.gallery); });
}

}  // namespace fingerlab::eval
