#pragma once

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include "vbpv/angles.hpp"
#include "vbpv/datetime.hpp"
#include "vbpv/errors.hpp"
#include "vbpv/location.hpp"

namespace vbpv {

struct SunPosition {
    double elevation_deg = 0.0;  // above horizon, [-90, 90]
    double azimuth_deg = 0.0;    // clockwise from north, [0, 360)
    DateTime timestamp;
};

struct SolarOptions {
    bool apply_equation_of_time = true;  // false: mean solar time (test hook)
};

// Cooper's declination, degrees. Single-harmonic fit, ~1 deg worst case;
// used for sun-path plumbing, not for the position/sunrise route below.
inline double solar_declination(int day_of_year) {
    if (day_of_year < 1 || day_of_year > 366)
        throw InputError("solar_declination: day_of_year out of range 1..366: " +
                         std::to_string(day_of_year));
    return 23.45 * sind(360.0 / 365.0 * (284.0 + day_of_year));
}

namespace detail {

// Low-precision solar ephemeris (Astronomical Almanac pages C24, as in
// Michalsky 1988): mean longitude + two-term equation of centre, linear
// obliquity. Quoted accuracy 0.01 deg for 1950-2050.
struct SunCoords {
    double declination_deg;
    double right_ascension_deg;
    double eot_minutes;  // apparent minus mean solar time
};

inline SunCoords sun_coords(double days_since_j2000) {
    const double n = days_since_j2000;
    const double L = wrap360(280.460 + 0.9856474 * n);          // mean longitude
    const double g = deg2rad(wrap360(357.528 + 0.9856003 * n)); // mean anomaly
    const double lambda = deg2rad(L + 1.915 * std::sin(g) + 0.020 * std::sin(2.0 * g));
    const double eps = deg2rad(23.439 - 0.0000004 * n);
    const double decl = std::asin(std::sin(eps) * std::sin(lambda));
    const double ra = wrap360(rad2deg(std::atan2(std::cos(eps) * std::sin(lambda),
                                                 std::cos(lambda))));
    // mean sun's right ascension equals the mean longitude
    const double eot = 4.0 * wrap180(L - ra);
    return {rad2deg(decl), ra, eot};
}

inline double days_since_j2000(const DateTime& t) {
    return to_unix_seconds(t) / 86400.0 - 10957.5;  // J2000.0 = 2000-01-01T12:00Z
}

}  // namespace detail

// Apparent declination at an instant (ephemeris route), degrees.
inline double apparent_declination(const DateTime& t) {
    return detail::sun_coords(detail::days_since_j2000(t)).declination_deg;
}

// Equation of time at an instant, minutes (apparent minus mean).
inline double equation_of_time_minutes(const DateTime& t) {
    return detail::sun_coords(detail::days_since_j2000(t)).eot_minutes;
}

// Sun elevation/azimuth for a civil timestamp. Hour-angle geometry:
//   sin(el) = sin(lat) sin(decl) + cos(lat) cos(decl) cos(ha)
// with the hour angle from local mean time + equation of time + longitude
// correction. No atmospheric refraction.
inline SunPosition solar_position(const Location& loc, const DateTime& t,
                                  const SolarOptions& opts = {}) {
    validate(loc);
    validate(t);
    const auto sc = detail::sun_coords(detail::days_since_j2000(t));
    const double eot = opts.apply_equation_of_time ? sc.eot_minutes : 0.0;
    const double clock_min = local_hours(t) * 60.0;
    const double solar_min = clock_min + eot + 4.0 * (loc.longitude - 15.0 * t.utc_offset_hours);
    const double ha = solar_min / 4.0 - 180.0;  // degrees, afternoon positive

    const double phi = deg2rad(loc.latitude);
    const double dec = deg2rad(sc.declination_deg);
    const double h = deg2rad(ha);
    const double sin_el = std::sin(phi) * std::sin(dec) +
                          std::cos(phi) * std::cos(dec) * std::cos(h);
    const double el = std::asin(std::clamp(sin_el, -1.0, 1.0));
    const double az = std::atan2(std::sin(h),
                                 std::cos(h) * std::sin(phi) - std::tan(dec) * std::cos(phi));
    SunPosition p;
    p.elevation_deg = rad2deg(el);
    p.azimuth_deg = wrap360(rad2deg(az) + 180.0);
    p.timestamp = t;
    return p;
}

// Civil time of solar noon (hour angle zero) on the date of `t`.
inline DateTime solar_noon(const Location& loc, const DateTime& date,
                           const SolarOptions& opts = {}) {
    DateTime noon = date;
    noon.hour = 12; noon.minute = 0; noon.second = 0;
    // one correction pass is enough: EoT drifts < 0.03 min/hour
    for (int i = 0; i < 2; ++i) {
        const auto sc = detail::sun_coords(detail::days_since_j2000(noon));
        const double eot = opts.apply_equation_of_time ? sc.eot_minutes : 0.0;
        const double noon_min = 720.0 - eot - 4.0 * (loc.longitude - 15.0 * date.utc_offset_hours);
        noon = date;
        noon.hour = 0; noon.minute = 0; noon.second = 0;
        noon = add_minutes(noon, noon_min);
    }
    return noon;
}

// Geometric sunrise/sunset (sun centre at elevation 0, no refraction).
// Restricted to |lat| <= 66 so the events always exist.
inline std::pair<DateTime, DateTime> sunrise_sunset(const Location& loc,
                                                    const DateTime& date) {
    validate(loc);
    if (std::fabs(loc.latitude) > 66.0)
        throw InputError("sunrise_sunset: polar latitudes unsupported (|lat| > 66): " +
                         std::to_string(loc.latitude));
    const DateTime noon = solar_noon(loc, date);

    auto event = [&](bool rise) {
        DateTime guess = noon;
        for (int i = 0; i < 3; ++i) {
            const double dec = apparent_declination(guess);
            double cos_ws = -tand(loc.latitude) * tand(dec);
            cos_ws = std::clamp(cos_ws, -1.0, 1.0);
            const double ws_min = rad2deg(std::acos(cos_ws)) * 4.0;
            guess = add_minutes(noon, rise ? -ws_min : ws_min);
        }
        // polish on the actual elevation function (secant)
        double t0 = to_unix_seconds(guess), t1 = t0 + 60.0;
        auto elev = [&](double unix_s) {
            return solar_position(loc, from_unix_seconds(unix_s, date.utc_offset_hours))
                .elevation_deg;
        };
        double f0 = elev(t0), f1 = elev(t1);
        for (int i = 0; i < 20 && std::fabs(f1) > 1e-7; ++i) {
            if (f1 == f0) break;
            const double t2 = t1 - f1 * (t1 - t0) / (f1 - f0);
            t0 = t1; f0 = f1;
            t1 = t2; f1 = elev(t1);
        }
        return from_unix_seconds(t1, date.utc_offset_hours);
    };

    return {event(true), event(false)};
}

// Sun positions for the daylight part of each date at a fixed step.
// Rows are time-sorted; only elevation > 0 entries are kept.
inline std::vector<SunPosition> sun_path_table(const Location& loc,
                                               std::vector<DateTime> dates,
                                               double step_minutes) {
    validate(loc);
    if (step_minutes < 1.0)
        throw InputError("sun_path_table: step must be >= 1 minute");
    std::sort(dates.begin(), dates.end(),
              [](const DateTime& a, const DateTime& b) { return a < b; });
    std::vector<SunPosition> rows;
    for (const DateTime& d : dates) {
        DateTime t = d;
        t.hour = 0; t.minute = 0; t.second = 0;
        const DateTime end = add_minutes(t, 24.0 * 60.0);
        for (; t < end; t = add_minutes(t, step_minutes)) {
            const SunPosition p = solar_position(loc, t);
            if (p.elevation_deg > 0.0) rows.push_back(p);
        }
    }
    return rows;
}

inline void write_sun_path_csv(std::ostream& os, const std::vector<SunPosition>& rows) {
    os << "timestamp_iso8601,elevation_deg,azimuth_deg\n";
    char buf[64];
    for (const auto& r : rows) {
        std::snprintf(buf, sizeof buf, ",%.4f,%.4f\n", r.elevation_deg, r.azimuth_deg);
        os << to_iso8601(r.timestamp) << buf;
    }
}

// Angle between the sun direction and the surface normal, degrees in [0, 180].
// cos(theta) = sin(el) cos(tilt) + cos(el) sin(tilt) cos(az_sun - az_surface)
inline double incidence_angle(const SunPosition& sun, double tilt_deg,
                              double surface_azimuth_deg) {
    const double c = sind(sun.elevation_deg) * cosd(tilt_deg) +
                     cosd(sun.elevation_deg) * sind(tilt_deg) *
                         cosd(sun.azimuth_deg - surface_azimuth_deg);
    return rad2deg(std::acos(std::clamp(c, -1.0, 1.0)));
}

// One row of modules in a regular array, cross-section geometry.
struct RowGeometry {
    double slant_width_m = 2.0;       // module extent along the tilt direction (W)
    double tilt_deg = 90.0;           // from horizontal, [0, 90]
    double surface_azimuth_deg = 180.0;
    double lower_edge_m = 0.15;       // h
    double upper_edge_m = 2.15;       // H = h + W sin(tilt)
    double row_pitch_m = 3.0;         // centre-to-centre
};

inline RowGeometry make_row_geometry(double slant_width_m, double tilt_deg,
                                     double surface_azimuth_deg, double lower_edge_m,
                                     double row_pitch_m) {
    RowGeometry r;
    r.slant_width_m = slant_width_m;
    r.tilt_deg = tilt_deg;
    r.surface_azimuth_deg = surface_azimuth_deg;
    r.lower_edge_m = lower_edge_m;
    r.upper_edge_m = lower_edge_m + slant_width_m * sind(tilt_deg);
    r.row_pitch_m = row_pitch_m;
    return r;
}

inline void validate(const RowGeometry& r) {
    if (r.slant_width_m <= 0.0) throw InputError("row geometry: slant width must be > 0");
    if (r.tilt_deg < 0.0 || r.tilt_deg > 90.0)
        throw InputError("row geometry: tilt out of range [0, 90]");
    if (r.row_pitch_m <= 0.0) throw InputError("row geometry: row pitch must be > 0");
    const double h_expect = r.lower_edge_m + r.slant_width_m * sind(r.tilt_deg);
    if (std::fabs(h_expect - r.upper_edge_m) > 1e-6)
        throw InputError("row geometry: upper edge inconsistent with h + W sin(tilt)");
}

enum class SpacingMode {
    height_difference,  // shadow of the raised edge: (H - h) cos(A) / tan(el)
    slant_width,        // literal W cos(A) / tan(el)
};

// Worst-case inter-row clearance so the row behind stays unshaded.
// `sun_azimuth_deg` is measured from the array normal (for south-facing rows,
// from due south). Value is returned un-clamped; cos goes negative once the
// sun passes the row axis.
inline double min_row_spacing(const RowGeometry& row, double sun_azimuth_deg,
                              double sun_elevation_deg,
                              SpacingMode mode = SpacingMode::height_difference) {
    validate(row);
    if (sun_elevation_deg <= 0.0 || sun_elevation_deg > 90.0)
        throw InputError("min_row_spacing: sun elevation must be in (0, 90]");
    const double extent = mode == SpacingMode::slant_width
                              ? row.slant_width_m
                              : row.upper_edge_m - row.lower_edge_m;
    return extent * cosd(sun_azimuth_deg) / tand(sun_elevation_deg);
}

enum class Face { front, rear };

namespace detail {

// 2-D cross-section shading of one row by its sun-side neighbour.
// beta_eff may exceed 90 deg (a rear face expressed as the complementary
// surface, leaning toward the face direction).
inline double shading_core(double beta_eff_deg, double face_azimuth_deg,
                           double slant_width, double lower_edge, double offset,
                           const SunPosition& sun) {
    if (sun.elevation_deg <= 0.0) return 1.0;
    const double psi = wrap180(sun.azimuth_deg - face_azimuth_deg);
    if (std::fabs(psi) >= 90.0) return 0.0;  // sun behind the face plane

    // u axis: horizontal direction the face looks at; z: up.
    const double beta = deg2rad(beta_eff_deg);
    const double alpha_p = std::atan2(tand(sun.elevation_deg), cosd(psi));  // projected elevation
    const double du = std::cos(alpha_p), dz = std::sin(alpha_p);            // toward the sun
    const double mu = -std::cos(beta), mz = std::sin(beta);                 // along the module

    const double denom = mu * dz - mz * du;  // cross(m, d)
    if (std::fabs(denom) < 1e-12) return 0.0;

    const double W = slant_width;
    const double h = lower_edge;
    // shaded module base at u = -offset; caster endpoints relative to it
    auto project = [&](double qu, double qz) {
        // Q - B_r = t m + s d  ->  t = cross(R, d)/cross(m, d), s = cross(m, R)/cross(m, d)
        const double ru = qu + offset, rz = qz - h;
        const double t = (ru * dz - rz * du) / denom;
        const double s = (mu * rz - mz * ru) / denom;
        return std::pair<double, double>{t, s};
    };
    auto [t_bot, s_bot] = project(0.0, h);                // caster bottom edge
    auto [t_top, s_top] = project(W * mu, h + W * mz);    // caster top edge
    if (s_bot < 0.0 && s_top < 0.0) return 0.0;  // caster is behind the target

    double lo = std::min(t_bot, t_top), hi = std::max(t_bot, t_top);
    lo = std::max(lo, 0.0);
    hi = std::min(hi, W);
    return std::clamp((hi - lo) / W, 0.0, 1.0);
}

}  // namespace detail

// Beam-shaded fraction of the next row's slant width, 2-D infinite-row model.
// The cross-section is the vertical plane through the surface normal; the
// shaded row sits `rear_row_offset` metres behind its sun-side neighbour.
// 1 when the sun is down (no beam anywhere), 0 when the sun is behind the
// face plane. `face` selects which side of the row the fraction refers to.
inline double row_shading_fraction(const RowGeometry& front_row, double rear_row_offset,
                                   const SunPosition& sun, Face face = Face::front) {
    validate(front_row);
    if (rear_row_offset <= 0.0)
        throw InputError("row_shading_fraction: rear_row_offset must be > 0");
    if (face == Face::front)
        return detail::shading_core(front_row.tilt_deg, front_row.surface_azimuth_deg,
                                    front_row.slant_width_m, front_row.lower_edge_m,
                                    rear_row_offset, sun);
    return detail::shading_core(180.0 - front_row.tilt_deg,
                                wrap360(front_row.surface_azimuth_deg + 180.0),
                                front_row.slant_width_m, front_row.lower_edge_m,
                                rear_row_offset, sun);
}

}  // namespace vbpv
