#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "fingerlab/dataset/manifest.hpp"

namespace fingerlab::dataset {

struct ScanOptions {
    // Decode every image and require the database's width × height.
    bool check_dimensions = true;
};

struct ScanResult {
    DatabaseManifest manifest;
    std::vector<std::string> warnings;  // empty directory, missing impressions
};

class ScanError : public Error {
public:
    using Error::Error;
};

// Builds a manifest from `<finger>_<impression>.<tif|tiff|bmp|png>` files.
// Files with other extensions are ignored. Throws ScanError on unparsable
// image names, ids outside 1..F / 1..K, mixed formats or dimension mismatches.
ScanResult scan_database(const std::filesystem::path& root, const DatabaseSpec& spec,
                         const ScanOptions& options = {});

}  // namespace fingerlab::dataset
