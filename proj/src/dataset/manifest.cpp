#include "fingerlab/dataset/manifest.hpp"

#include <algorithm>
#include <array>
#include <fstream>
#include <sstream>

#include "fingerlab/fmr/record.hpp"
#include "json.hpp"

namespace fingerlab::dataset {

using nlohmann::json;

namespace {

const std::array<DatabaseSpec, 4> kKnown = {{
    {"FVC2002_DB1A", SensorKind::optical, 388, 374, 500, 100, 8},
    {"FVC2002_DB3A", SensorKind::capacitive, 300, 300, 500, 100, 8},
    {"FVC2004_DB1A", SensorKind::optical, 640, 480, 500, 100, 8},
    {"FVC2004_DB3A", SensorKind::thermal_sweep, 300, 480, 512, 100, 8},
}};

template <typename T>
T required(const json& j, const char* key) {
    if (!j.contains(key)) throw ManifestError(std::string("manifest field '") + key + "' missing");
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ManifestError(std::string("manifest field '") + key + "': " + e.what());
    }
}

}  // namespace

std::string_view to_string(SensorKind kind) {
    switch (kind) {
        case SensorKind::optical: return "optical";
        case SensorKind::capacitive: return "capacitive";
        case SensorKind::thermal_sweep: return "thermal_sweep";
    }
    return "optical";
}

std::optional<SensorKind> parse_sensor_kind(std::string_view text) {
    if (text == "optical") return SensorKind::optical;
    if (text == "capacitive") return SensorKind::capacitive;
    if (text == "thermal_sweep") return SensorKind::thermal_sweep;
    return std::nullopt;
}

std::string_view to_string(PerceivedQuality quality) {
    switch (quality) {
        case PerceivedQuality::poor: return "poor";
        case PerceivedQuality::fair: return "fair";
        case PerceivedQuality::good: return "good";
    }
    return "poor";
}

std::optional<PerceivedQuality> parse_perceived_quality(std::string_view text) {
    if (text == "poor") return PerceivedQuality::poor;
    if (text == "fair") return PerceivedQuality::fair;
    if (text == "good") return PerceivedQuality::good;
    return std::nullopt;
}

int finger_quality_code(PerceivedQuality quality) {
    switch (quality) {
        case PerceivedQuality::poor: return 20;
        case PerceivedQuality::fair: return 50;
        case PerceivedQuality::good: return 80;
    }
    return 0;
}

int DatabaseSpec::px_per_cm() const { return fmr::dpi_to_px_per_cm(dpi); }

std::span<const DatabaseSpec> known_databases() { return kKnown; }

const DatabaseSpec* find_known_database(std::string_view db_id) {
    const auto it = std::find_if(kKnown.begin(), kKnown.end(), [&](const auto& s) { return s.db_id == db_id; });
    return it == kKnown.end() ? nullptr : &*it;
}

bool DatabaseManifest::complete() const { return missing().empty(); }

std::vector<ImageRef> DatabaseManifest::missing() const {
    std::vector<ImageRef> out;
    for (int f = 1; f <= spec.fingers; ++f) {
        for (int k = 1; k <= spec.impressions_per_finger; ++k) {
            ImageRef ref{spec.db_id, f, k};
            if (!find(ref)) out.push_back(std::move(ref));
        }
    }
    return out;
}

const ManifestEntry* DatabaseManifest::find(const ImageRef& ref) const {
    const auto it = std::lower_bound(entries.begin(), entries.end(), ref,
                                     [](const ManifestEntry& e, const ImageRef& r) { return e.ref < r; });
    return it != entries.end() && it->ref == ref ? &*it : nullptr;
}

ManifestEntry* DatabaseManifest::find(const ImageRef& ref) {
    return const_cast<ManifestEntry*>(std::as_const(*this).find(ref));
}

DatabaseManifest synthetic_manifest(const DatabaseSpec& spec) {
    DatabaseManifest m;
    m.spec = spec;
    for (int f = 1; f <= spec.fingers; ++f) {
        for (int k = 1; k <= spec.impressions_per_finger; ++k) {
            m.entries.push_back({ImageRef{spec.db_id, f, k}, {}, std::nullopt, std::nullopt, std::nullopt});
        }
    }
    return m;
}

std::string manifest_to_json(const DatabaseManifest& manifest) {
    json j;
    j["db_id"] = manifest.spec.db_id;
    j["sensor_kind"] = to_string(manifest.spec.sensor);
    j["image_width"] = manifest.spec.image_width;
    j["image_height"] = manifest.spec.image_height;
    j["dpi"] = manifest.spec.dpi;
    j["fingers"] = manifest.spec.fingers;
    j["impressions_per_finger"] = manifest.spec.impressions_per_finger;
    j["image_format"] = manifest.image_format;
    json entries = json::array();
    for (const auto& e : manifest.entries) {
        json je;
        je["finger"] = e.ref.finger;
        je["impression"] = e.ref.impression;
        je["image"] = e.image_path;
        if (e.template_path) je["template"] = *e.template_path;
        if (e.perceived_quality) je["perceived_quality"] = to_string(*e.perceived_quality);
        if (e.nfiq) je["nfiq"] = *e.nfiq;
        entries.push_back(std::move(je));
    }
    j["entries"] = std::move(entries);
    return j.dump(2) + "\n";
}

DatabaseManifest manifest_from_json(std::string_view text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ManifestError(std::string("manifest is not valid JSON: ") + e.what());
    }
    DatabaseManifest m;
    m.spec.db_id = required<std::string>(j, "db_id");
    const auto sensor = parse_sensor_kind(required<std::string>(j, "sensor_kind"));
    if (!sensor) throw ManifestError("unknown sensor_kind");
    m.spec.sensor = *sensor;
    m.spec.image_width = required<int>(j, "image_width");
    m.spec.image_height = required<int>(j, "image_height");
    m.spec.dpi = required<int>(j, "dpi");
    m.spec.fingers = required<int>(j, "fingers");
    m.spec.impressions_per_finger = required<int>(j, "impressions_per_finger");
    m.image_format = j.value("image_format", std::string{});
    for (const auto& je : required<json>(j, "entries")) {
        ManifestEntry e;
        e.ref = {m.spec.db_id, required<int>(je, "finger"), required<int>(je, "impression")};
        e.image_path = je.value("image", std::string{});
        if (je.contains("template")) e.template_path = je.at("template").get<std::string>();
        if (je.contains("perceived_quality")) {
            e.perceived_quality = parse_perceived_quality(je.at("perceived_quality").get<std::string>());
            if (!e.perceived_quality) throw ManifestError("bad perceived_quality for " + e.ref.label());
        }
        if (je.contains("nfiq")) {
            e.nfiq = je.at("nfiq").get<int>();
            if (*e.nfiq < 1 || *e.nfiq > 5) throw ManifestError("nfiq outside 1..5 for " + e.ref.label());
        }
        m.entries.push_back(std::move(e));
    }
    std::sort(m.entries.begin(), m.entries.end(), [](const auto& a, const auto& b) { return a.ref < b.ref; });
    for (std::size_t i = 1; i < m.entries.size(); ++i) {
        if (m.entries[i].ref == m.entries[i - 1].ref) {
            throw ManifestError("duplicate manifest entry " + m.entries[i].ref.label());
        }
    }
    return m;
}

void save_manifest(const DatabaseManifest& manifest, const std::filesystem::path& path) {
    std::ofstream out(path);
    if (!out) throw ManifestError("cannot write " + path.string());
    out << manifest_to_json(manifest);
    if (!out) throw ManifestError("cannot write " + path.string());
}

DatabaseManifest load_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ManifestError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return manifest_from_json(ss.str());
}

}  // namespace fingerlab::dataset
