#pragma once

#include <map>
#include <span>
#include <string>

#include "fingerlab/dataset/manifest.hpp"
#include "fingerlab/dataset/templates.hpp"

namespace fingerlab::dataset {

// Per-image minutiae count summary; std uses the n-1 denominator.
struct CountStats {
    double mean = 0;
    double std = 0;
    int min = 0;
    int max = 0;
    std::size_t images = 0;
};

CountStats minutiae_count_stats(std::span<const int> counts);
CountStats minutiae_count_stats(const TemplateMap& records);

// Minutiae over all views of a record.
int minutiae_count(const fmr::MinutiaeRecord& record);

enum class QualitySource { perceived, nfiq };

struct QualityHistogram {
    std::map<std::string, int> buckets;  // perceived: G/F/P; nfiq: "1".."5"
    int unlabeled = 0;

    int labeled() const;
    double fraction(const std::string& bucket) const;
};

QualityHistogram quality_histogram(const DatabaseManifest& manifest, QualitySource source);

}  // namespace fingerlab::dataset
