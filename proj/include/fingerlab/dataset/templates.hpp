#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fingerlab/dataset/manifest.hpp"
#include "fingerlab/fmr/record.hpp"
#include "fingerlab/fmr/validate.hpp"

namespace fingerlab::dataset {

using TemplateMap = std::map<ImageRef, fmr::MinutiaeRecord>;

struct TemplateDiagnostic {
    ImageRef ref;
    std::string message;
};

struct TemplateViolation {
    ImageRef ref;
    fmr::Violation violation;
};

struct TemplateSet {
    TemplateMap records;
    std::vector<ImageRef> missing;
    std::vector<TemplateDiagnostic> failures;      // decode/read errors
    std::vector<TemplateViolation> violations;     // against manifest dimensions
};

// Loads `<finger>_<impression>.iso-fmr` for every manifest entry and checks
// each record against the database's image size. Records with violations are
// still loaded; undecodable files are not.
TemplateSet load_template_set(const DatabaseManifest& manifest, const std::filesystem::path& dir);

// Every `<finger>_<impression>.iso-fmr` in `dir`, without a manifest.
TemplateSet load_template_dir(const std::filesystem::path& dir, const std::string& db_id = {});

fmr::MinutiaeRecord read_template_file(const std::filesystem::path& path);
void write_template_file(const std::filesystem::path& path, const fmr::MinutiaeRecord& record);

std::vector<std::uint8_t> read_file_bytes(const std::filesystem::path& path);
void write_file_bytes(const std::filesystem::path& path, std::span<const std::uint8_t> bytes);

}  // namespace fingerlab::dataset
