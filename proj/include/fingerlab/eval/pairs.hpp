#pragma once

#include <istream>
#include <ostream>
#include <string_view>
#include <vector>

#include "fingerlab/dataset/image_ref.hpp"
#include "fingerlab/dataset/manifest.hpp"
#include "fingerlab/error.hpp"

namespace fingerlab::eval {

enum class PairKind { genuine, imposter };

std::string_view to_string(PairKind kind);

struct MatchPair {
    dataset::ImageRef probe;
    dataset::ImageRef gallery;
    PairKind kind = PairKind::genuine;

    friend bool operator==(const MatchPair&, const MatchPair&) = default;
};

class ProtocolError : public Error {
public:
    using Error::Error;
};

// Every ordered (probe, gallery) pair of distinct images, probe-major in
// ImageRef order. Genuine when both share the finger. Throws ProtocolError
// listing the missing impressions when the manifest is incomplete.
std::vector<MatchPair> generate_match_pairs(const dataset::DatabaseManifest& manifest);
std::vector<MatchPair> generate_match_pairs(const std::string& db_id, int fingers, int impressions);

struct PairCounts {
    std::size_t genuine = 0;
    std::size_t imposter = 0;
};

PairCounts count_pairs(const std::vector<MatchPair>& pairs);

// Closed forms F*K*(K-1) and F*K*(F-1)*K.
PairCounts expected_pair_counts(int fingers, int impressions);

// `probe,gallery,kind` with ImageRef labels.
void write_pairs_csv(std::ostream& out, const std::vector<MatchPair>& pairs);
std::vector<MatchPair> read_pairs_csv(std::istream& in);

}  // namespace fingerlab::eval
