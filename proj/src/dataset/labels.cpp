#include "fingerlab/dataset/labels.hpp"

#include <charconv>
#include <fstream>
#include <string>
#include <vector>

namespace fingerlab::dataset {

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string cell;
    for (const char c : line) {
        if (c == ',') {
            out.push_back(cell);
            cell.clear();
        } else if (c != '\r' && c != ' ' && c != '\t') {
            cell.push_back(c);
        }
    }
    out.push_back(cell);
    return out;
}

int parse_int(const std::string& s, std::size_t line, const char* what) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (s.empty() || ec != std::errc{} || ptr != s.data() + s.size()) {
        throw LabelCsvError(line, std::string("bad ") + what + " '" + s + "'");
    }
    return v;
}

// Calls on_row(ref, value_cell, line) for each data row of a 4-column label CSV.
template <typename OnRow>
void read_label_rows(std::istream& in, const char* value_column, OnRow on_row) {
    std::string line;
    std::size_t line_no = 0;
    bool first = true;
    while (std::getline(in, line)) {
        ++line_no;
        const auto cells = split_csv_line(line);
        if (cells.size() == 1 && cells[0].empty()) continue;
        if (first) {
            first = false;
            if (!cells.empty() && cells[0] == "db") {
                if (cells.size() != 4 || cells[1] != "finger" || cells[2] != "impression" || cells[3] != value_column) {
                    throw LabelCsvError(line_no, std::string("header must be db,finger,impression,") + value_column);
                }
                continue;
            }
        }
        if (cells.size() != 4) {
            throw LabelCsvError(line_no, "expected 4 columns, found " + std::to_string(cells.size()));
        }
        const int finger = parse_int(cells[1], line_no, "finger");
        const int impression = parse_int(cells[2], line_no, "impression");
        if (finger < 1 || impression < 1) throw LabelCsvError(line_no, "finger and impression must be positive");
        on_row(ImageRef{cells[0], finger, impression}, cells[3], line_no);
    }
}

std::ifstream open(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw LabelCsvError(0, "cannot read " + path.string());
    return in;
}

}  // namespace

LabelCsvError::LabelCsvError(std::size_t line, const std::string& detail)
    : Error("line " + std::to_string(line) + ": " + detail), line_(line) {}

std::map<ImageRef, int> parse_nfiq_csv(std::istream& in) {
    std::map<ImageRef, int> out;
    read_label_rows(in, "nfiq", [&](ImageRef ref, const std::string& cell, std::size_t line) {
        const int nfiq = parse_int(cell, line, "nfiq");
        if (nfiq < 1 || nfiq > 5) throw LabelCsvError(line, "nfiq " + cell + " outside 1..5");
        const auto label = ref.label();
        if (!out.emplace(std::move(ref), nfiq).second) throw LabelCsvError(line, "duplicate row for " + label);
    });
    return out;
}

std::map<ImageRef, int> ingest_nfiq_csv(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_nfiq_csv(in);
}

std::map<ImageRef, PerceivedQuality> parse_quality_csv(std::istream& in) {
    std::map<ImageRef, PerceivedQuality> out;
    read_label_rows(in, "quality", [&](ImageRef ref, const std::string& cell, std::size_t line) {
        const auto q = parse_perceived_quality(cell);
        if (!q) throw LabelCsvError(line, "quality '" + cell + "' is not poor/fair/good");
        const auto label = ref.label();
        if (!out.emplace(std::move(ref), *q).second) throw LabelCsvError(line, "duplicate row for " + label);
    });
    return out;
}

std::map<ImageRef, PerceivedQuality> ingest_quality_csv(const std::filesystem::path& path) {
    auto in = open(path);
    return parse_quality_csv(in);
}

std::size_t apply_nfiq(DatabaseManifest& manifest, const std::map<ImageRef, int>& nfiq) {
    std::size_t matched = 0;
    for (auto& e : manifest.entries) {
        if (const auto it = nfiq.find(e.ref); it != nfiq.end()) {
            e.nfiq = it->second;
            ++matched;
        }
    }
    return matched;
}

std::size_t apply_quality(DatabaseManifest& manifest, const std::map<ImageRef, PerceivedQuality>& quality) {
    std::size_t matched = 0;
    for (auto& e : manifest.entries) {
        if (const auto it = quality.find(e.ref); it != quality.end()) {
            e.perceived_quality = it->second;
            ++matched;
        }
    }
    return matched;
}

std::map<ImageRef, PerceivedQuality> quality_labels(const DatabaseManifest& manifest) {
    std::map<ImageRef, PerceivedQuality> out;
    for (const auto& e : manifest.entries) {
        if (e.perceived_quality) out.emplace(e.ref, *e.perceived_quality);
    }
    return out;
}

}  // namespace fingerlab::dataset
