#include "fingerlab/eval/protocol.hpp"

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <exception>
#include <mutex>
#include <set>
#include <thread>

#include "csv_util.hpp"

namespace fingerlab::eval {

std::vector<double> ScoreSet::genuine_scores() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].kind == PairKind::genuine) out.push_back(scores[i]);
    }
    return out;
}

std::vector<double> ScoreSet::imposter_scores() const {
    std::vector<double> out;
    for (std::size_t i = 0; i < pairs.size(); ++i) {
        if (pairs[i].kind == PairKind::imposter) out.push_back(scores[i]);
    }
    return out;
}

ScoreSet execute_protocol(const std::vector<MatchPair>& pairs, const ScoreFunction& score,
                          const ProtocolOptions& options) {
    ScoreSet result;
    result.pairs = pairs;
    result.scores.assign(pairs.size(), 0.0);
    result.extractor = options.extractor;
    result.matcher = options.matcher;
    if (!pairs.empty()) result.db_id = pairs.front().probe.db_id;

    constexpr std::size_t kChunk = 64;
    std::atomic<std::size_t> next{0};
    std::atomic<bool> failed{false};
    std::exception_ptr error;
    std::mutex error_mutex;
    auto work = [&] {
        while (!failed.load(std::memory_order_relaxed)) {
            const std::size_t begin = next.fetch_add(kChunk);
            if (begin >= pairs.size()) return;
            const std::size_t end = std::min(begin + kChunk, pairs.size());
            try {
                for (std::size_t i = begin; i < end; ++i) {
                    const double s = score(pairs[i].probe, pairs[i].gallery);
                    if (!(s >= 0.0 && s <= 1.0)) {
                        throw ProtocolError("score " + detail::format_double(s) + " for " + pairs[i].probe.label() +
                                            " vs " + pairs[i].gallery.label() + " is outside [0, 1]");
                    }
                    result.scores[i] = s;
                }
            } catch (...) {
                std::lock_guard lock(error_mutex);
                if (!error) error = std::current_exception();
                failed = true;
                return;
            }
        }
    };

    const int workers = std::max(1, options.workers);
    if (workers == 1) {
        work();
    } else {
        std::vector<std::jthread> threads;
        for (int w = 0; w < workers; ++w) threads.emplace_back(work);
    }
    if (error) std::rethrow_exception(error);
    return result;
}

ScoreSet execute_protocol(const std::vector<MatchPair>& pairs, const dataset::TemplateMap& templates,
                          const matcher::Matcher& matcher, const ProtocolOptions& options) {
    std::set<dataset::ImageRef> missing;
    for (const auto& p : pairs) {
        if (!templates.contains(p.probe)) missing.insert(p.probe);
        if (!templates.contains(p.gallery)) missing.insert(p.gallery);
    }
    if (!missing.empty()) {
        std::string msg = "missing templates for " + std::to_string(missing.size()) + " image(s):";
        std::size_t shown = 0;
        for (const auto& r : missing) {
            if (shown++ == 20) {
                msg += " ...";
                break;
            }
            msg += " " + r.label();
        }
        throw ProtocolError(msg);
    }
    const ScoreFunction fn = [&](const dataset::ImageRef& probe, const dataset::ImageRef& gallery) {
        return matcher.match(templates.at(gallery), templates.at(probe)).score;
    };
    return execute_protocol(pairs, fn, options);
}

namespace {

std::string shell_quote(const std::string& s) {
    std::string out = "'";
    for (const char c : s) {
        if (c == '\'') {
            out += "'\\''";
        } else {
            out += c;
        }
    }
    return out + "'";
}

}  // namespace

ScoreFunction external_matcher(std::string command, std::map<dataset::ImageRef, std::filesystem::path> templates) {
    return [command = std::move(command), templates = std::move(templates)](const dataset::ImageRef& probe,
                                                                             const dataset::ImageRef& gallery) {
        const auto p = templates.find(probe);
        const auto g = templates.find(gallery);
        if (p == templates.end() || g == templates.end()) {
            throw ProtocolError("no template path for " + (p == templates.end() ? probe : gallery).label());
        }
        const std::string cmd = command + " " + shell_quote(p->second.string()) + " " +
                                shell_quote(g->second.string());
        FILE* pipe = ::popen(cmd.c_str(), "r");
        if (!pipe) throw ProtocolError("cannot run external matcher: " + command);
        std::string output;
        char buf[256];
        while (std::fgets(buf, sizeof buf, pipe)) output += buf;
        const int status = ::pclose(pipe);
        if (status != 0) {
            throw ProtocolError("external matcher failed (status " + std::to_string(status) + ") on " + probe.label() +
                                " vs " + gallery.label());
        }
        const auto fields = detail::split_fields(output.substr(0, output.find('\n')));
        double s = 0.0;
        if (fields.size() != 1 || !detail::parse_double(fields[0], s)) {
            throw ProtocolError("external matcher printed no score for " + probe.label() + " vs " + gallery.label());
        }
        return s;
    };
}

std::map<dataset::ImageRef, std::filesystem::path> template_paths(const std::vector<MatchPair>& pairs,
                                                                  const std::filesystem::path& dir) {
    std::map<dataset::ImageRef, std::filesystem::path> out;
    for (const auto& p : pairs) {
        for (const auto* ref : {&p.probe, &p.gallery}) {
            if (out.contains(*ref)) continue;
            auto path = dir / (ref->stem() + ".iso-fmr");
            if (!std::filesystem::exists(path)) throw ProtocolError("missing template file " + path.string());
            out.emplace(*ref, std::move(path));
        }
    }
    return out;
}

void write_scores_csv(std::ostream& out, const ScoreSet& scores) {
    out << "probe,gallery,kind,score\n";
    for (std::size_t i = 0; i < scores.pairs.size(); ++i) {
        const auto& p = scores.pairs[i];
        out << p.probe.label() << ',' << p.gallery.label() << ',' << to_string(p.kind) << ','
            << detail::format_double(scores.scores[i]) << '\n';
    }
}

ScoreSet read_scores_csv(std::istream& in) {
    ScoreSet set;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const auto f = detail::split_fields(line);
        if (f.size() == 1 && f[0].empty()) continue;
        if (line_no == 1 && f[0] == "probe") continue;
        const auto where = "scores CSV line " + std::to_string(line_no) + ": ";
        if (f.size() != 4) throw ProtocolError(where + "expected probe,gallery,kind,score");
        const auto probe = dataset::parse_label(f[0]);
        const auto gallery = dataset::parse_label(f[1]);
        if (!probe || !gallery) throw ProtocolError(where + "bad image reference");
        if (f[2] != "genuine" && f[2] != "imposter") throw ProtocolError(where + "unknown kind");
        double s = 0.0;
        if (!detail::parse_double(f[3], s) || !(s >= 0.0 && s <= 1.0)) {
            throw ProtocolError(where + "score must be a number in [0, 1]");
        }
        set.pairs.push_back({*probe, *gallery, f[2] == "genuine" ? PairKind::genuine : PairKind::imposter});
        set.scores.push_back(s);
    }
    if (!set.pairs.empty()) set.db_id = set.pairs.front().probe.db_id;
    return set;
}

ScoreSet filter_scores(const ScoreSet& scores, const std::function<bool(const MatchPair&)>& keep) {
    ScoreSet out;
    out.db_id = scores.db_id;
    out.extractor = scores.extractor;
    out.matcher = scores.matcher;
    for (std::size_t i = 0; i < scores.pairs.size(); ++i) {
        if (!keep(scores.pairs[i])) continue;
        out.pairs.push_back(scores.pairs[i]);
        out.scores.push_back(scores.scores[i]);
    }
    return out;
}

}  // namespace fingerlab::eval
