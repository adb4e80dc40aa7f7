#include "fingerlab/eval/pairs.hpp"

#include <string>

#include "csv_util.hpp"

namespace fingerlab::eval {

std::string_view to_string(PairKind kind) { return kind == PairKind::genuine ? "genuine" : "imposter"; }

namespace {

std::vector<MatchPair> all_ordered_pairs(const std::vector<dataset::ImageRef>& images) {
    std::vector<MatchPair> pairs;
    if (images.size() > 1) pairs.reserve(images.size() * (images.size() - 1));
    for (const auto& probe : images) {
        for (const auto& gallery : images) {
            if (probe == gallery) continue;
            const bool same = probe.db_id == gallery.db_id && probe.finger == gallery.finger;
            pairs.push_back({probe, gallery, same ? PairKind::genuine : PairKind::imposter});
        }
    }
    return pairs;
}

}  // namespace

std::vector<MatchPair> generate_match_pairs(const dataset::DatabaseManifest& manifest) {
    if (!manifest.complete()) {
        std::string msg = "manifest for " + manifest.spec.db_id + " is incomplete; missing:";
        const auto missing = manifest.missing();
        for (std::size_t i = 0; i < missing.size() && i < 20; ++i) msg += " " + missing[i].stem();
        if (missing.size() > 20) msg += " ... (" + std::to_string(missing.size()) + " total)";
        throw ProtocolError(msg);
    }
    std::vector<dataset::ImageRef> images;
    images.reserve(manifest.entries.size());
    for (const auto& e : manifest.entries) images.push_back(e.ref);
    return all_ordered_pairs(images);
}

std::vector<MatchPair> generate_match_pairs(const std::string& db_id, int fingers, int impressions) {
    if (fingers < 0 || impressions < 0) throw InvalidArgument("finger and impression counts must be non-negative");
    std::vector<dataset::ImageRef> images;
    for (int f = 1; f <= fingers; ++f) {
        for (int k = 1; k <= impressions; ++k) images.push_back({db_id, f, k});
    }
    return all_ordered_pairs(images);
}

PairCounts count_pairs(const std::vector<MatchPair>& pairs) {
    PairCounts c;
    for (const auto& p : pairs) (p.kind == PairKind::genuine ? c.genuine : c.imposter)++;
    return c;
}

PairCounts expected_pair_counts(int fingers, int impressions) {
    const auto f = static_cast<std::size_t>(fingers);
    const auto k = static_cast<std::size_t>(impressions);
    if (f == 0 || k == 0) return {};
    return {f * k * (k - 1), f * k * (f - 1) * k};
}

void write_pairs_csv(std::ostream& out, const std::vector<MatchPair>& pairs) {
    out << "probe,gallery,kind\n";
    for (const auto& p : pairs) out << p.probe.label() << ',' << p.gallery.label() << ',' << to_string(p.kind) << '\n';
}

std::vector<MatchPair> read_pairs_csv(std::istream& in) {
    std::vector<MatchPair> pairs;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto f = detail::split_fields(line);
        if (f.size() == 1 && f[0].empty()) continue;
        if (line_no == 1 && f[0] == "probe") continue;
        const auto where = "pairs CSV line " + std::to_string(line_no) + ": ";
        if (f.size() < 3) throw ProtocolError(where + "expected probe,gallery,kind");
        const auto probe = dataset::parse_label(f[0]);
        const auto gallery = dataset::parse_label(f[1]);
        if (!probe || !gallery) throw ProtocolError(where + "bad image reference");
        PairKind kind;
        if (f[2] == "genuine") {
            kind = PairKind::genuine;
        } else if (f[2] == "imposter") {
            kind = PairKind::imposter;
        } else {
            throw ProtocolError(where + "unknown kind '" + std::string(f[2]) + "'");
        }
        pairs.push_back({*probe, *gallery, kind});
    }
    return pairs;
}

}  // namespace fingerlab::eval
