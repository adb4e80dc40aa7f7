#include "fingerlab/dataset/templates.hpp"

#include <algorithm>
#include <fstream>
#include <iterator>

#include "fingerlab/fmr/codec.hpp"

namespace fingerlab::dataset {

namespace fs = std::filesystem;

std::vector<std::uint8_t> read_file_bytes(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error("cannot read " + path.string());
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

void write_file_bytes(const fs::path& path, std::span<const std::uint8_t> bytes) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    out.write(reinterpret_cast<const char*>(bytes.data()), static_cast<std::streamsize>(bytes.size()));
    if (!out) throw Error("cannot write " + path.string());
}

fmr::MinutiaeRecord read_template_file(const fs::path& path) {
    return fmr::decode_record(read_file_bytes(path));
}

void write_template_file(const fs::path& path, const fmr::MinutiaeRecord& record) {
    write_file_bytes(path, fmr::encode_record(record));
}

namespace {

void load_one(TemplateSet& set, const ImageRef& ref, const fs::path& path, const fmr::ValidateOptions& bounds) {
    try {
        auto record = read_template_file(path);
        for (auto& v : fmr::validate_record(record, bounds)) set.violations.push_back({ref, std::move(v)});
        set.records.emplace(ref, std::move(record));
    } catch (const Error& e) {
        set.failures.push_back({ref, path.filename().string() + ": " + e.what()});
    }
}

}  // namespace

TemplateSet load_template_set(const DatabaseManifest& manifest, const fs::path& dir) {
    TemplateSet set;
    const fmr::ValidateOptions bounds{.bound_width = manifest.spec.image_width,
                                      .bound_height = manifest.spec.image_height};
    for (const auto& entry : manifest.entries) {
        const fs::path path = dir / (entry.ref.stem() + ".iso-fmr");
        std::error_code ec;
        if (!fs::is_regular_file(path, ec)) {
            set.missing.push_back(entry.ref);
            continue;
        }
        load_one(set, entry.ref, path, bounds);
    }
    return set;
}

TemplateSet load_template_dir(const fs::path& dir, const std::string& db_id) {
    TemplateSet set;
    std::error_code ec;
    if (!fs::is_directory(dir, ec)) throw Error("not a directory: " + dir.string());
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir)) {
        if (entry.is_regular_file() && entry.path().extension() == ".iso-fmr") files.push_back(entry.path());
    }
    std::sort(files.begin(), files.end());
    for (const auto& path : files) {
        const auto ref = parse_stem(db_id, path.stem().string());
        if (!ref) {
            set.failures.push_back({ImageRef{db_id, 0, 0}, path.filename().string() + ": unparsable template name"});
            continue;
        }
        load_one(set, *ref, path, {});
    }
    return set;
}

}  // namespace fingerlab::dataset
