#pragma once

#include <filesystem>
#include <istream>
#include <map>

#include "fingerlab/dataset/manifest.hpp"

namespace fingerlab::dataset {

class LabelCsvError : public Error {
public:
    LabelCsvError(std::size_t line, const std::string& detail);
    std::size_t line() const noexcept { return line_; }

private:
    std::size_t line_;
};

// CSV `db,finger,impression,nfiq` (header row optional). Values must be in
// 1..5 and every image may appear once.
std::map<ImageRef, int> parse_nfiq_csv(std::istream& in);
std::map<ImageRef, int> ingest_nfiq_csv(const std::filesystem::path& path);

// CSV `db,finger,impression,quality` with poor/fair/good (header optional).
std::map<ImageRef, PerceivedQuality> parse_quality_csv(std::istream& in);
std::map<ImageRef, PerceivedQuality> ingest_quality_csv(const std::filesystem::path& path);

// Copies labels onto matching manifest entries; returns how many matched.
std::size_t apply_nfiq(DatabaseManifest& manifest, const std::map<ImageRef, int>& nfiq);
std::size_t apply_quality(DatabaseManifest& manifest, const std::map<ImageRef, PerceivedQuality>& quality);

std::map<ImageRef, PerceivedQuality> quality_labels(const DatabaseManifest& manifest);

}  // namespace fingerlab::dataset
