#include "fingerlab/dataset/stats.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <vector>

namespace fingerlab::dataset {

CountStats minutiae_count_stats(std::span<const int> counts) {
    if (counts.empty()) throw InvalidArgument("minutiae count statistics need at least one image");
    CountStats s;
    s.images = counts.size();
    const double n = static_cast<double>(counts.size());
    s.mean = std::accumulate(counts.begin(), counts.end(), 0.0) / n;
    double ss = 0;
    for (const int c : counts) ss += (c - s.mean) * (c - s.mean);
    s.std = counts.size() > 1 ? std::sqrt(ss / (n - 1)) : 0.0;
    const auto [lo, hi] = std::minmax_element(counts.begin(), counts.end());
    s.min = *lo;
    s.max = *hi;
    return s;
}

int minutiae_count(const fmr::MinutiaeRecord& record) {
    int n = 0;
    for (const auto& v : record.views) n += static_cast<int>(v.minutiae.size());
    return n;
}

CountStats minutiae_count_stats(const TemplateMap& records) {
    std::vector<int> counts;
    counts.reserve(records.size());
    for (const auto& [ref, record] : records) counts.push_back(minutiae_count(record));
    return minutiae_count_stats(counts);
}

int QualityHistogram::labeled() const {
    int n = 0;
    for (const auto& [bucket, count] : buckets) n += count;
    return n;
}

double QualityHistogram::fraction(const std::string& bucket) const {
    const int total = labeled();
    const auto it = buckets.find(bucket);
    return total == 0 || it == buckets.end() ? 0.0 : static_cast<double>(it->second) / total;
}

QualityHistogram quality_histogram(const DatabaseManifest& manifest, QualitySource source) {
    QualityHistogram h;
    if (source == QualitySource::perceived) {
        h.buckets = {{"G", 0}, {"F", 0}, {"P", 0}};
    } else {
        for (int q = 1; q <= 5; ++q) h.buckets[std::to_string(q)] = 0;
    }
    for (const auto& e : manifest.entries) {
        if (source == QualitySource::perceived) {
            if (!e.perceived_quality) {
                ++h.unlabeled;
                continue;
            }
            switch (*e.perceived_quality) {
                case PerceivedQuality::good: ++h.buckets["G"]; break;
                case PerceivedQuality::fair: ++h.buckets["F"]; break;
                case PerceivedQuality::poor: ++h.buckets["P"]; break;
            }
        } else {
            if (!e.nfiq) {
                ++h.unlabeled;
                continue;
            }
            ++h.buckets[std::to_string(*e.nfiq)];
        }
    }
    return h;
}

}  // namespace fingerlab::dataset
