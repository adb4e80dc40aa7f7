#pragma once

namespace fingerlab::fmr {

inline constexpr double kDegreesPerAngleUnit = 360.0 / 256.0;  // 1.40625

// Maps [0, 360) degrees onto the one-byte angle field, rounding to the
// nearest unit; 359.5 and above wrap to 0. Throws InvalidArgument outside
// the range.
int quantize_angle(double degrees);

inline constexpr double dequantize_angle(int angle_units) {
    return angle_units * kDegreesPerAngleUnit;
}

// Shortest circular distance between two angle codes, in units (0..128).
inline constexpr int circular_unit_difference(int a, int b) {
    int d = (a - b) % 256;
    if (d < 0) d += 256;
    return d > 128 ? 256 - d : d;
}

}  // namespace fingerlab::fmr
