#pragma once

#include <cmath>

namespace vbpv {

inline constexpr double kPi = 3.14159265358979323846;

constexpr double deg2rad(double deg) { return deg * kPi / 180.0; }
constexpr double rad2deg(double rad) { return rad * 180.0 / kPi; }

inline double sind(double deg) { return std::sin(deg2rad(deg)); }
inline double cosd(double deg) { return std::cos(deg2rad(deg)); }
inline double tand(double deg) { return std::tan(deg2rad(deg)); }

// Wrap to [0, 360).
inline double wrap360(double deg) {
    double w = std::fmod(deg, 360.0);
    if (w < 0.0) w += 360.0;
    return w;
}

// Wrap to [-180, 180).
inline double wrap180(double deg) {
    double w = wrap360(deg + 180.0) - 180.0;
    return w;
}

// Smallest absolute separation between two bearings, in [0, 180].
inline double azimuth_separation(double a_deg, double b_deg) {
    double d = std::fabs(wrap360(a_deg) - wrap360(b_deg));
    return d > 180.0 ? 360.0 - d : d;
}

}  // namespace vbpv
