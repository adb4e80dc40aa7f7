#pragma once

#include <compare>
#include <optional>
#include <string>
#include <string_view>

namespace fingerlab::dataset {

// One impression of one finger in one database. Ordering is
// (db_id, finger, impression), which is the protocol's probe-major order.
struct ImageRef {
    std::string db_id;
    int finger = 0;      // 1..F
    int impression = 0;  // 1..K

    friend auto operator<=>(const ImageRef&, const ImageRef&) = default;
    friend bool operator==(const ImageRef&, const ImageRef&) = default;

    // "<finger>_<impression>", the file stem used by FVC distributions.
    std::string stem() const;
    // "<db>/<finger>_<impression>", or just the stem when db_id is empty.
    std::string label() const;
};

// Parses "<finger>_<impression>" (both positive integers).
std::optional<ImageRef> parse_stem(std::string_view db_id, std::string_view stem);

// Parses the output of ImageRef::label().
std::optional<ImageRef> parse_label(std::string_view label);

}  // namespace fingerlab::dataset
