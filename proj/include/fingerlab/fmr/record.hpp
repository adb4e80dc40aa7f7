#pragma once

#include <cstdint>
#include <optional>
#include <string_view>
#include <vector>

namespace fingerlab::fmr {

// Two-bit type code stored in the top of the x word.
enum class MinutiaKind : std::uint8_t { other = 0, ending = 1, bifurcation = 2 };

enum class SingularKind : std::uint8_t { core, delta };

std::string_view to_string(MinutiaKind kind);
std::optional<MinutiaKind> parse_minutia_kind(std::string_view text);
std::string_view to_string(SingularKind kind);
std::optional<SingularKind> parse_singular_kind(std::string_view text);

// Fields are plain ints so that out-of-range values can be represented and
// reported by validate_record() instead of being silently truncated.
struct Minutia {
    MinutiaKind kind = MinutiaKind::ending;
    int x = 0;            // column, 14 bits
    int y = 0;            // row, 14 bits
    int angle_units = 0;  // 0..255, 1.40625 deg each, counterclockwise
    int quality = 0;      // 0..100

    friend bool operator==(const Minutia&, const Minutia&) = default;
};

struct SingularPoint {
    SingularKind kind = SingularKind::core;
    int x = 0;
    int y = 0;
    std::optional<int> angle_units;

    friend bool operator==(const SingularPoint&, const SingularPoint&) = default;
};

struct FingerView {
    int finger_position = 0;  // 0 = unknown, 1..10
    int view_number = 0;      // 0..15
    int impression_type = 0;  // 0 = live-scan plain
    int finger_quality = 0;   // 0..100
    std::vector<Minutia> minutiae;
    std::vector<SingularPoint> singular_points;
    // Extended data blocks other than core/delta, kept verbatim
    // (type, length and payload of each block).
    std::vector<std::uint8_t> extended_bytes;

    friend bool operator==(const FingerView&, const FingerView&) = default;
};

struct MinutiaeRecord {
    std::uint16_t capture_equipment = 0;
    int image_width = 0;
    int image_height = 0;
    int resolution_x = 197;  // px/cm
    int resolution_y = 197;
    std::vector<FingerView> views;

    friend bool operator==(const MinutiaeRecord&, const MinutiaeRecord&) = default;
};

inline constexpr std::uint16_t kCoreDeltaBlockType = 0x0002;
inline constexpr int kMaxCoordinate = 16383;

// Pixels per centimetre for a sensor resolution in dots per inch.
int dpi_to_px_per_cm(int dpi);

}  // namespace fingerlab::fmr
