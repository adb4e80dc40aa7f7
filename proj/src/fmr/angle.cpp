#include "fingerlab/fmr/angle.hpp"

#include <cmath>
#include <string>

#include "fingerlab/error.hpp"

namespace fingerlab::fmr {

int quantize_angle(double degrees) {
    if (!(degrees >= 0.0 && degrees < 360.0)) {
        throw InvalidArgument("angle " + std::to_string(degrees) + " outside [0, 360)");
    }
    return static_cast<int>(std::lround(degrees / kDegreesPerAngleUnit)) % 256;
}

}  // namespace fingerlab::fmr
