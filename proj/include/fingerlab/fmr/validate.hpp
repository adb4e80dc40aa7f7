#pragma once

#include <string>
#include <vector>

#include "fingerlab/fmr/record.hpp"

namespace fingerlab::fmr {

// One broken invariant. `code` is a stable kebab-case identifier such as
// "coordinate-out-of-bounds"; `path` names the field, e.g.
// "views[0].minutiae[3].x".
struct Violation {
    std::string code;
    std::string path;
    std::string message;

    friend bool operator==(const Violation&, const Violation&) = default;
};

struct ValidateOptions {
    // Additionally require minutia quality > 0 and a known finger position.
    bool strict = false;
    // Bounds to check coordinates against instead of the record's own
    // image size (e.g. the database's declared dimensions). 0 = use record.
    int bound_width = 0;
    int bound_height = 0;
};

std::vector<Violation> validate_record(const MinutiaeRecord& record,
                                       const ValidateOptions& options = {});

inline std::vector<Violation> validate_record(const MinutiaeRecord& record, bool strict) {
    return validate_record(record, ValidateOptions{.strict = strict});
}

std::string describe(const std::vector<Violation>& violations);

}  // namespace fingerlab::fmr
