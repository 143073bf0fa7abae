#pragma once

#include <string>

#include "vbpv/errors.hpp"

namespace vbpv {

// Geographic site anchoring all solar geometry.
struct Location {
    double latitude = 0.0;    // degrees north, [-90, 90]
    double longitude = 0.0;   // degrees east, [-180, 180]
    double utc_offset_hours = 0.0;
    double albedo = 0.20;     // ground reflectance, [0, 1]
    std::string name;
};

inline void validate(const Location& loc) {
    if (!(loc.latitude >= -90.0 && loc.latitude <= 90.0))
        throw InputError("location: latitude out of range [-90, 90]: " +
                         std::to_string(loc.latitude));
    if (!(loc.longitude >= -180.0 && loc.longitude <= 180.0))
        throw InputError("location: longitude out of range [-180, 180]: " +
                         std::to_string(loc.longitude));
    if (!(loc.utc_offset_hours >= -14.0 && loc.utc_offset_hours <= 14.0))
        throw InputError("location: utc_offset out of range [-14, 14]");
    if (!(loc.albedo >= 0.0 && loc.albedo <= 1.0))
        throw InputError("location: albedo out of range [0, 1]: " +
                         std::to_string(loc.albedo));
}

}  // namespace vbpv
