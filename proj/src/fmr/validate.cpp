#include "fingerlab/fmr/validate.hpp"

#include <set>
#include <sstream>

#include "extended_blocks.hpp"

namespace fingerlab::fmr {

namespace {

class Collector {
public:
    void add(std::string code, std::string path, std::string message) {
        out.push_back({std::move(code), std::move(path), std::move(message)});
    }
    std::vector<Violation> out;
};

bool in_range(int v, int lo, int hi) { return v >= lo && v <= hi; }

void check_point(Collector& c, const std::string& path, int x, int y, int width, int height) {
    if (!in_range(x, 0, kMaxCoordinate)) {
        c.add("coordinate-range", path + ".x", "x=" + std::to_string(x) + " does not fit 14 bits");
    } else if (width > 0 && x >= width) {
        c.add("coordinate-out-of-bounds", path + ".x",
              "x=" + std::to_string(x) + " outside image width " + std::to_string(width));
    }
    if (!in_range(y, 0, kMaxCoordinate)) {
        c.add("coordinate-range", path + ".y", "y=" + std::to_string(y) + " does not fit 14 bits");
    } else if (height > 0 && y >= height) {
        c.add("coordinate-out-of-bounds", path + ".y",
              "y=" + std::to_string(y) + " outside image height " + std::to_string(height));
    }
}

void check_singular_points(Collector& c, const std::string& vpath, const FingerView& view,
                           int width, int height) {
    int counts[2] = {0, 0};
    std::optional<bool> angle_present[2];
    bool seen_delta = false;
    for (std::size_t i = 0; i < view.singular_points.size(); ++i) {
        const auto& p = view.singular_points[i];
        const std::string path = vpath + ".singular_points[" + std::to_string(i) + "]";
        const int k = p.kind == SingularKind::core ? 0 : 1;
        ++counts[k];
        if (p.kind == SingularKind::delta) seen_delta = true;
        if (p.kind == SingularKind::core && seen_delta) {
            c.add("singular-order", path, "cores must precede deltas");
        }
        check_point(c, path, p.x, p.y, width, height);
        if (p.angle_units && !in_range(*p.angle_units, 0, 255)) {
            c.add("angle-range", path + ".angle_units", "angle code outside 0..255");
        }
        if (!angle_present[k]) {
            angle_present[k] = p.angle_units.has_value();
        } else if (*angle_present[k] != p.angle_units.has_value()) {
            c.add("singular-angle-mixed", path,
                  "all " + std::string(to_string(p.kind)) + "s must either carry an angle or not");
        }
    }
    for (int k = 0; k < 2; ++k) {
        if (counts[k] > 15) {
            c.add("singular-count", vpath + ".singular_points",
                  "at most 15 points of each kind fit the core/delta block");
        }
    }
}

void check_extended(Collector& c, const std::string& vpath, const FingerView& view) {
    const auto scan = detail::scan_blocks(view.extended_bytes);
    if (scan.error_offset) {
        c.add("extended-data", vpath + ".extended_bytes",
              scan.error + " at byte " + std::to_string(*scan.error_offset));
    }
    for (const auto& block : scan.blocks) {
        if (block.type == kCoreDeltaBlockType) {
            c.add("extended-data", vpath + ".extended_bytes",
                  "core/delta data belongs in singular_points");
        }
    }
    std::size_t total = view.extended_bytes.size();
    if (!view.singular_points.empty()) total += 4 + detail::encode_core_delta(view.singular_points).size();
    if (total > 0xFFFF) {
        c.add("extended-data", vpath + ".extended_bytes", "extended data exceeds 65535 bytes");
    }
}

}  // namespace

std::vector<Violation> validate_record(const MinutiaeRecord& record, const ValidateOptions& options) {
    Collector c;
    if (!in_range(record.image_width, 0, 0xFFFF)) {
        c.add("image-size-range", "image_width", "does not fit 16 bits");
    }
    if (!in_range(record.image_height, 0, 0xFFFF)) {
        c.add("image-size-range", "image_height", "does not fit 16 bits");
    }
    if (!in_range(record.resolution_x, 0, 0xFFFF)) {
        c.add("resolution-range", "resolution_x", "does not fit 16 bits");
    }
    if (!in_range(record.resolution_y, 0, 0xFFFF)) {
        c.add("resolution-range", "resolution_y", "does not fit 16 bits");
    }
    if (record.views.empty() || record.views.size() > 255) {
        c.add("view-count", "views", "record needs 1..255 views, has " + std::to_string(record.views.size()));
    }
    const int width = options.bound_width > 0 ? options.bound_width : record.image_width;
    const int height = options.bound_height > 0 ? options.bound_height : record.image_height;

    std::set<int> view_numbers;
    for (std::size_t v = 0; v < record.views.size(); ++v) {
        const auto& view = record.views[v];
        const std::string vpath = "views[" + std::to_string(v) + "]";
        if (!in_range(view.finger_position, 0, 10)) {
            c.add("finger-position-range", vpath + ".finger_position", "finger position outside 0..10");
        } else if (options.strict && view.finger_position == 0) {
            c.add("finger-position-unknown", vpath + ".finger_position", "strict mode needs a known finger");
        }
        if (!in_range(view.view_number, 0, 15)) {
            c.add("view-number-range", vpath + ".view_number", "view number outside 0..15");
        } else if (!view_numbers.insert(view.view_number).second) {
            c.add("view-number-duplicate", vpath + ".view_number",
                  "view number " + std::to_string(view.view_number) + " repeated");
        }
        if (!in_range(view.impression_type, 0, 15)) {
            c.add("impression-type-range", vpath + ".impression_type", "impression type outside 0..15");
        }
        if (!in_range(view.finger_quality, 0, 100)) {
            c.add("quality-range", vpath + ".finger_quality", "finger quality outside 0..100");
        }
        if (view.minutiae.size() > 255) {
            c.add("minutiae-count", vpath + ".minutiae",
                  std::to_string(view.minutiae.size()) + " minutiae exceed the one-byte count");
        }
        for (std::size_t i = 0; i < view.minutiae.size(); ++i) {
            const auto& m = view.minutiae[i];
            const std::string path = vpath + ".minutiae[" + std::to_string(i) + "]";
            check_point(c, path, m.x, m.y, width, height);
            if (!in_range(m.angle_units, 0, 255)) {
                c.add("angle-range", path + ".angle_units", "angle code outside 0..255");
            }
            if (!in_range(m.quality, 0, 100)) {
                c.add("quality-range", path + ".quality", "quality " + std::to_string(m.quality) + " outside 0..100");
            } else if (options.strict && m.quality == 0) {
                c.add("quality-zero", path + ".quality", "strict mode needs quality > 0");
            }
        }
        check_singular_points(c, vpath, view, width, height);
        check_extended(c, vpath, view);
    }
    return std::move(c.out);
}

std::string describe(const std::vector<Violation>& violations) {
    std::ostringstream os;
    for (std::size_t i = 0; i < violations.size(); ++i) {
        if (i) os << "; ";
        os << violations[i].code << " at " << violations[i].path << ": " << violations[i].message;
    }
    return os.str();
}

}  // namespace fingerlab::fmr
