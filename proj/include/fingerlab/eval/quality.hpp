#pragma once

#include <map>
#include <vector>

#include "fingerlab/dataset/manifest.hpp"
#include "fingerlab/eval/protocol.hpp"

namespace fingerlab::eval {

using QualityLabels = std::map<dataset::ImageRef, dataset::PerceivedQuality>;

struct QualityFilter {
    std::vector<MatchPair> pairs;
    std::size_t images = 0;           // distinct images in the input pairs
    std::size_t rejected_images = 0;  // of those, labelled poor
    double rejection_fraction = 0.0;
};

// Keeps pairs whose probe and gallery are both fair or good. Throws
// ProtocolError naming the first image without a label.
QualityFilter filter_by_quality(const std::vector<MatchPair>& pairs, const QualityLabels& labels);

// Same rule applied to already computed scores.
ScoreSet filter_by_quality(const ScoreSet& scores, const QualityLabels& labels, double* rejection_fraction = nullptr);

}  // namespace fingerlab::eval
