#include "fingerlab/dataset/scan.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "fingerlab/dataset/image_io.hpp"

namespace fingerlab::dataset {

namespace fs = std::filesystem;

namespace {

std::string lower(std::string s) {
    std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return static_cast<char>(std::tolower(c)); });
    return s;
}

bool is_image_extension(const std::string& ext) {
    return ext == "tif" || ext == "tiff" || ext == "bmp" || ext == "png";
}

}  // namespace

ScanResult scan_database(const fs::path& root, const DatabaseSpec& spec, const ScanOptions& options) {
    std::error_code ec;
    if (!fs::is_directory(root, ec)) throw ScanError("not a directory: " + root.string());

    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(root)) {
        if (entry.is_regular_file()) files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());

    ScanResult result;
    result.manifest.spec = spec;
    std::set<std::string> formats;
    for (const auto& path : files) {
        std::string ext = path.extension().string();
        if (!ext.empty()) ext = lower(ext.substr(1));
        if (!is_image_extension(ext)) continue;
        const auto ref = parse_stem(spec.db_id, path.stem().string());
        if (!ref) {
            throw ScanError("unparsable image name '" + path.filename().string() +
                            "', expected <finger>_<impression>." + ext);
        }
        if (ref->finger > spec.fingers) {
            throw ScanError(path.filename().string() + ": finger " + std::to_string(ref->finger) +
                            " outside 1.." + std::to_string(spec.fingers));
        }
        if (ref->impression > spec.impressions_per_finger) {
            throw ScanError(path.filename().string() + ": impression " + std::to_string(ref->impression) +
                            " outside 1.." + std::to_string(spec.impressions_per_finger));
        }
        if (options.check_dimensions) {
            const auto info = read_image_info(path);
            if (!info) throw ScanError("cannot decode image " + path.string());
            if (info->width != spec.image_width || info->height != spec.image_height) {
                throw ScanError(path.filename().string() + " is " + std::to_string(info->width) + "x" +
                                std::to_string(info->height) + ", database " + spec.db_id + " requires " +
                                std::to_string(spec.image_width) + "x" + std::to_string(spec.image_height));
            }
        }
        formats.insert(ext);
        result.manifest.entries.push_back({*ref, path.string(), std::nullopt, std::nullopt, std::nullopt});
    }

    auto& entries = result.manifest.entries;
    std::sort(entries.begin(), entries.end(), [](const auto& a, const auto& b) { return a.ref < b.ref; });
    for (std::size_t i = 1; i < entries.size(); ++i) {
        if (entries[i].ref == entries[i - 1].ref) {
            throw ScanError("image " + entries[i].ref.stem() + " present in more than one format");
        }
    }
    for (const auto& f : formats) {
        if (!result.manifest.image_format.empty()) result.manifest.image_format += ",";
        result.manifest.image_format += f;
    }

    if (entries.empty()) {
        result.warnings.push_back("no images found in " + root.string());
        return result;
    }
    std::map<int, std::vector<int>> missing;
    for (const auto& ref : result.manifest.missing()) missing[ref.finger].push_back(ref.impression);
    for (const auto& [finger, impressions] : missing) {
        std::string list;
        for (const int k : impressions) list += (list.empty() ? "" : ",") + std::to_string(k);
        result.warnings.push_back("finger " + std::to_string(finger) + ": missing impressions " + list);
    }
    return result;
}

}  // namespace fingerlab::dataset
