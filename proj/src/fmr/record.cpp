#include "fingerlab/fmr/record.hpp"

#include <cmath>

namespace fingerlab::fmr {

std::string_view to_string(MinutiaKind kind) {
    switch (kind) {
        case MinutiaKind::ending: return "ending";
        case MinutiaKind::bifurcation: return "bifurcation";
        case MinutiaKind::other: return "other";
    }
    return "other";
}

std::optional<MinutiaKind> parse_minutia_kind(std::string_view text) {
    if (text == "ending") return MinutiaKind::ending;
    if (text == "bifurcation") return MinutiaKind::bifurcation;
    if (text == "other") return MinutiaKind::other;
    return std::nullopt;
}

std::string_view to_string(SingularKind kind) {
    return kind == SingularKind::core ? "core" : "delta";
}

std::optional<SingularKind> parse_singular_kind(std::string_view text) {
    if (text == "core") return SingularKind::core;
    if (text == "delta") return SingularKind::delta;
    return std::nullopt;
}

int dpi_to_px_per_cm(int dpi) {
    return static_cast<int>(std::lround(dpi / 2.54));
}

}  // namespace fingerlab::fmr
