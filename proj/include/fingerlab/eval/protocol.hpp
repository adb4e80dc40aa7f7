#pragma once

#include <filesystem>
#include <functional>
#include <istream>
#include <map>
#include <ostream>
#include <string>
#include <vector>

#include "fingerlab/dataset/templates.hpp"
#include "fingerlab/eval/pairs.hpp"
#include "fingerlab/matcher/matcher.hpp"

namespace fingerlab::eval {

// One score per protocol pair, in pair order.
struct ScoreSet {
    std::vector<MatchPair> pairs;
    std::vector<double> scores;
    std::string db_id;
    std::string extractor;
    std::string matcher;

    std::vector<double> genuine_scores() const;
    std::vector<double> imposter_scores() const;
};

// Scores (probe, gallery). Must be safe to call from several threads.
using ScoreFunction = std::function<double(const dataset::ImageRef& probe, const dataset::ImageRef& gallery)>;

struct ProtocolOptions {
    int workers = 1;
    std::string extractor = "unknown";
    std::string matcher = "ref";
};

// Runs every pair. The result does not depend on the worker count. Throws
// ProtocolError if a score falls outside [0, 1].
ScoreSet execute_protocol(const std::vector<MatchPair>& pairs, const ScoreFunction& score,
                          const ProtocolOptions& options = {});

// Built-in matcher: the gallery template is the reference side. All
// templates are checked before anything is matched; a missing one throws
// ProtocolError naming it.
ScoreSet execute_protocol(const std::vector<MatchPair>& pairs, const dataset::TemplateMap& templates,
                          const matcher::Matcher& matcher, const ProtocolOptions& options = {});

// External matcher: runs `command <probe path> <gallery path>` through the
// shell and parses one decimal score from its stdout.
ScoreFunction external_matcher(std::string command, std::map<dataset::ImageRef, std::filesystem::path> templates);

// Paths for external_matcher() from a template directory (`<stem>.iso-fmr`).
// Throws ProtocolError if any paired image has no file.
std::map<dataset::ImageRef, std::filesystem::path> template_paths(const std::vector<MatchPair>& pairs,
                                                                  const std::filesystem::path& dir);

// `probe,gallery,kind,score`; scores printed in shortest round-trip form.
void write_scores_csv(std::ostream& out, const ScoreSet& scores);
ScoreSet read_scores_csv(std::istream& in);

ScoreSet filter_scores(const ScoreSet& scores, const std::function<bool(const MatchPair&)>& keep);

}  // namespace fingerlab::eval
