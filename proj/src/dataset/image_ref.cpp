#include "fingerlab/dataset/image_ref.hpp"

#include <charconv>

namespace fingerlab::dataset {

namespace {

std::optional<int> parse_positive(std::string_view s) {
    int v = 0;
    const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || ptr != s.data() + s.size() || v < 1 || s.empty() || s.front() == '+') {
        return std::nullopt;
    }
    return v;
}

}  // namespace

std::string ImageRef::stem() const {
    return std::to_string(finger) + "_" + std::to_string(impression);
}

std::string ImageRef::label() const {
    return db_id.empty() ? stem() : db_id + "/" + stem();
}

std::optional<ImageRef> parse_stem(std::string_view db_id, std::string_view stem) {
    const auto sep = stem.find('_');
    if (sep == std::string_view::npos) return std::nullopt;
    const auto finger = parse_positive(stem.substr(0, sep));
    const auto impression = parse_positive(stem.substr(sep + 1));
    if (!finger || !impression) return std::nullopt;
    return ImageRef{std::string(db_id), *finger, *impression};
}

std::optional<ImageRef> parse_label(std::string_view label) {
    const auto slash = label.rfind('/');
    if (slash == std::string_view::npos) return parse_stem({}, label);
    return parse_stem(label.substr(0, slash), label.substr(slash + 1));
}

}  // namespace fingerlab::dataset
