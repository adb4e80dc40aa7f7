#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fingerlab/dataset/image_ref.hpp"
#include "fingerlab/error.hpp"

namespace fingerlab::dataset {

enum class SensorKind { optical, capacitive, thermal_sweep };
enum class PerceivedQuality { poor, fair, good };

std::string_view to_string(SensorKind kind);
std::optional<SensorKind> parse_sensor_kind(std::string_view text);
std::string_view to_string(PerceivedQuality quality);
std::optional<PerceivedQuality> parse_perceived_quality(std::string_view text);

// finger_quality byte written for a perceived label: poor 20, fair 50, good 80.
int finger_quality_code(PerceivedQuality quality);

struct DatabaseSpec {
    std::string db_id;
    SensorKind sensor = SensorKind::optical;
    int image_width = 0;
    int image_height = 0;
    int dpi = 500;
    int fingers = 100;
    int impressions_per_finger = 8;

    int px_per_cm() const;
    friend bool operator==(const DatabaseSpec&, const DatabaseSpec&) = default;
};

// FVC2002 DB1A/DB3A and FVC2004 DB1A/DB3A.
std::span<const DatabaseSpec> known_databases();
const DatabaseSpec* find_known_database(std::string_view db_id);

struct ManifestEntry {
    ImageRef ref;
    std::string image_path;
    std::optional<std::string> template_path;
    std::optional<PerceivedQuality> perceived_quality;
    std::optional<int> nfiq;  // 1 best .. 5 worst

    friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatabaseManifest {
    DatabaseSpec spec;
    std::string image_format;  // extension found on disk, e.g. "tif"
    std::vector<ManifestEntry> entries;  // sorted by ref

    bool complete() const;
    std::vector<ImageRef> missing() const;
    const ManifestEntry* find(const ImageRef& ref) const;
    ManifestEntry* find(const ImageRef& ref);

    friend bool operator==(const DatabaseManifest&, const DatabaseManifest&) = default;
};

// Manifest with one entry per F×K image and empty image paths; used when
// only the protocol shape matters.
DatabaseManifest synthetic_manifest(const DatabaseSpec& spec);

class ManifestError : public Error {
public:
    using Error::Error;
};

std::string manifest_to_json(const DatabaseManifest& manifest);
DatabaseManifest manifest_from_json(std::string_view json);
void save_manifest(const DatabaseManifest& manifest, const std::filesystem::path& path);
DatabaseManifest load_manifest(const std::filesystem::path& path);

}  // namespace fingerlab::dataset
