#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "vbpv/datetime.hpp"
#include "vbpv/errors.hpp"
#include "vbpv/location.hpp"
#include "vbpv/solar.hpp"

namespace vbpv {

enum class WeatherSource { measured, clearsky, decomposed };

struct WeatherSample {
    DateTime timestamp;
    double ghi = 0.0;   // W/m2
    double dhi = 0.0;   // W/m2
    double dni = 0.0;   // W/m2; NaN when not supplied (filled at simulation time)
    double ambient_temp_c = 25.0;
    WeatherSource source = WeatherSource::measured;

    bool dni_missing() const { return std::isnan(dni); }
};

struct WeatherGap {
    DateTime from;
    DateTime to;
};

struct WeatherSeries {
    std::vector<WeatherSample> samples;  // time-sorted
    std::vector<WeatherGap> gaps;        // cadence breaks found at load

    // Sample at a timestamp (30 s tolerance), or nullopt.
    std::optional<WeatherSample> at(const DateTime& t) const {
        const double key = to_unix_seconds(t);
        auto it = std::lower_bound(samples.begin(), samples.end(), key,
                                   [](const WeatherSample& s, double k) {
                                       return to_unix_seconds(s.timestamp) < k - 30.0;
                                   });
        if (it == samples.end()) return std::nullopt;
        if (std::fabs(to_unix_seconds(it->timestamp) - key) > 30.0) return std::nullopt;
        return *it;
    }
};

// Haurwitz clear-sky global horizontal irradiance, W/m2.
inline double clearsky_ghi(double sun_elevation_deg) {
    if (sun_elevation_deg <= 0.0) return 0.0;
    const double s = sind(sun_elevation_deg);
    return 1098.0 * s * std::exp(-0.057 / s);
}

// Erbs diffuse-fraction correlation on the clearness index. Returns
// (dhi, dni); closure dhi + dni sin(el) == ghi holds by construction.
inline std::pair<double, double> decompose_ghi(double ghi, double sun_elevation_deg) {
    if (ghi < 0.0) throw InputError("decompose_ghi: ghi must be >= 0");
    if (ghi == 0.0) return {0.0, 0.0};
    if (sun_elevation_deg <= 0.0)
        throw InputError("decompose_ghi: ghi > 0 with sun at or below the horizon");
    const double sin_el = sind(sun_elevation_deg);
    const double kt = std::min(ghi / (1367.0 * sin_el), 1.0);
    double kd;
    if (kt <= 0.22) {
        kd = 1.0 - 0.09 * kt;
    } else if (kt <= 0.80) {
        kd = 0.9511 - 0.1604 * kt + 4.388 * kt * kt - 16.638 * kt * kt * kt +
             12.336 * kt * kt * kt * kt;
    } else {
        kd = 0.165;
    }
    const double dhi = std::clamp(kd, 0.0, 1.0) * ghi;
    const double dni = (ghi - dhi) / sin_el;
    return {dhi, dni};
}

// Irradiance on one module face, by component.
struct FacePoa {
    double beam = 0.0;
    double diffuse = 0.0;
    double ground_reflected = 0.0;

    double total() const { return beam + diffuse + ground_reflected; }
};

struct PoaIrradiance {
    FacePoa front;
    FacePoa rear;
    double front_shading = 0.0;
    double rear_shading = 0.0;
};

// Isotropic-sky transposition of one face.
//   beam    = dni max(cos theta, 0) (1 - shading)
//   diffuse = dhi (1 + cos tilt)/2
//   ground  = ghi albedo (1 - cos tilt)/2
// Tilt up to 180 deg is accepted so a rear face can be expressed as the
// complementary surface.
inline FacePoa transpose_poa(const WeatherSample& sample, const SunPosition& sun,
                             double tilt_deg, double surface_azimuth_deg, double albedo,
                             double shading_fraction) {
    if (tilt_deg < 0.0 || tilt_deg > 180.0)
        throw InputError("transpose_poa: tilt out of range [0, 180]");
    if (albedo < 0.0 || albedo > 1.0)
        throw InputError("transpose_poa: albedo out of range [0, 1]");
    if (shading_fraction < 0.0 || shading_fraction > 1.0)
        throw InputError("transpose_poa: shading fraction out of range [0, 1]");
    const double dni = sample.dni_missing() ? 0.0 : sample.dni;
    FacePoa f;
    double cos_inc = sind(sun.elevation_deg) * cosd(tilt_deg) +
                     cosd(sun.elevation_deg) * sind(tilt_deg) *
                         cosd(sun.azimuth_deg - surface_azimuth_deg);
    if (cos_inc < 1e-12) cos_inc = 0.0;  // grazing incidence is no beam
    f.beam = dni * cos_inc * (1.0 - shading_fraction);
    f.diffuse = sample.dhi * (1.0 + cosd(tilt_deg)) / 2.0;
    f.ground_reflected = sample.ghi * albedo * (1.0 - cosd(tilt_deg)) / 2.0;
    return f;
}

// Both faces of a bifacial surface: front at (tilt, azimuth), rear at the
// complementary orientation (180 - tilt, azimuth + 180).
inline PoaIrradiance bifacial_poa(const WeatherSample& sample, const SunPosition& sun,
                                  double tilt_deg, double surface_azimuth_deg,
                                  double albedo, double front_shading,
                                  double rear_shading) {
    PoaIrradiance poa;
    poa.front = transpose_poa(sample, sun, tilt_deg, surface_azimuth_deg, albedo,
                              front_shading);
    poa.rear = transpose_poa(sample, sun, 180.0 - tilt_deg,
                             wrap360(surface_azimuth_deg + 180.0), albedo, rear_shading);
    poa.front_shading = front_shading;
    poa.rear_shading = rear_shading;
    return poa;
}

// G_E = G_front + phi * G_rear.
inline double equivalent_irradiance(double front_wm2, double rear_wm2, double bifaciality) {
    if (bifaciality < 0.0 || bifaciality > 1.0)
        throw InputError("equivalent_irradiance: bifaciality out of range [0, 1]");
    if (front_wm2 < 0.0 || rear_wm2 < 0.0)
        throw InputError("equivalent_irradiance: irradiance must be >= 0");
    return front_wm2 + bifaciality * rear_wm2;
}

namespace detail {

inline std::string format_double(double v) {
    char buf[32];
    auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    (void)ec;
    return std::string(buf, p);
}

inline double parse_double(const std::string& field, int line_no, const char* col) {
    double v = 0.0;
    auto [p, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
    if (ec != std::errc() || p != field.data() + field.size())
        throw InputError("weather csv line " + std::to_string(line_no) + ": bad " +
                         col + " value '" + field + "'");
    return v;
}

inline std::vector<std::string> split_csv(const std::string& line) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : line) {
        if (c == ',') { out.push_back(cur); cur.clear(); }
        else if (c != '\r') cur += c;
    }
    out.push_back(cur);
    return out;
}

}  // namespace detail

inline constexpr const char* kWeatherCsvHeader = "timestamp,ghi_wm2,dhi_wm2,dni_wm2,tamb_c";

inline void validate(const WeatherSample& s, int line_no = -1) {
    const std::string where =
        line_no >= 0 ? "weather csv line " + std::to_string(line_no) + ": " : "weather sample: ";
    if (!(s.ghi >= 0.0) || s.ghi > 2000.0)
        throw InputError(where + "ghi out of range [0, 2000]");
    if (!(s.dhi >= 0.0) || s.dhi > s.ghi)
        throw InputError(where + "dhi must satisfy 0 <= dhi <= ghi");
    if (!s.dni_missing() && s.dni < 0.0)
        throw InputError(where + "dni must be >= 0");
}

inline WeatherSeries load_weather_csv(std::istream& is) {
    WeatherSeries series;
    std::string line;
    int line_no = 0;
    if (!std::getline(is, line))
        throw InputError("weather csv: empty file (header row required)");
    ++line_no;
    // tolerate a UTF-8 BOM
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line != kWeatherCsvHeader)
        throw InputError(std::string("weather csv: bad header, expected '") +
                         kWeatherCsvHeader + "'");
    while (std::getline(is, line)) {
        ++line_no;
        if (line.empty() || line == "\r") continue;
        const auto f = detail::split_csv(line);
        if (f.size() != 5)
            throw InputError("weather csv line " + std::to_string(line_no) +
                             ": expected 5 fields, got " + std::to_string(f.size()));
        WeatherSample s;
        try {
            s.timestamp = parse_iso8601(f[0]);
        } catch (const InputError& e) {
            throw InputError("weather csv line " + std::to_string(line_no) + ": " + e.what());
        }
        s.ghi = detail::parse_double(f[1], line_no, "ghi_wm2");
        s.dhi = detail::parse_double(f[2], line_no, "dhi_wm2");
        if (f[3].empty()) {
            s.dni = std::numeric_limits<double>::quiet_NaN();
            s.source = WeatherSource::decomposed;
        } else {
            s.dni = detail::parse_double(f[3], line_no, "dni_wm2");
        }
        s.ambient_temp_c = detail::parse_double(f[4], line_no, "tamb_c");
        validate(s, line_no);
        if (!series.samples.empty() &&
            !(to_unix_seconds(series.samples.back().timestamp) < to_unix_seconds(s.timestamp)))
            throw InputError("weather csv line " + std::to_string(line_no) +
                             ": timestamps not strictly increasing");
        series.samples.push_back(s);
    }
    // flag cadence gaps against the modal step
    if (series.samples.size() >= 3) {
        std::vector<double> steps;
        for (std::size_t i = 1; i < series.samples.size(); ++i)
            steps.push_back(to_unix_seconds(series.samples[i].timestamp) -
                            to_unix_seconds(series.samples[i - 1].timestamp));
        std::vector<double> sorted = steps;
        std::sort(sorted.begin(), sorted.end());
        const double modal = sorted[sorted.size() / 2];
        for (std::size_t i = 0; i < steps.size(); ++i) {
            if (steps[i] > modal * 1.5)
                series.gaps.push_back({series.samples[i].timestamp,
                                       series.samples[i + 1].timestamp});
        }
    }
    return series;
}

inline WeatherSeries load_weather_csv(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("weather csv: cannot open '" + path + "'");
    return load_weather_csv(f);
}

inline void save_weather_csv(std::ostream& os, const WeatherSeries& series) {
    os << kWeatherCsvHeader << "\n";
    for (const auto& s : series.samples) {
        os << to_iso8601(s.timestamp) << ',' << detail::format_double(s.ghi) << ','
           << detail::format_double(s.dhi) << ','
           << (s.dni_missing() ? std::string() : detail::format_double(s.dni)) << ','
           << detail::format_double(s.ambient_temp_c) << "\n";
    }
}

inline void save_weather_csv(const std::string& path, const WeatherSeries& series) {
    std::ofstream f(path, std::ios::binary);  // LF line endings
    if (!f) throw InputError("weather csv: cannot open '" + path + "' for writing");
    save_weather_csv(f, series);
}

// Synthetic clear-sky driver: Haurwitz GHI decomposed with Erbs, constant
// ambient temperature. Samples span [start, end] inclusive on the step grid.
inline WeatherSeries make_clearsky_series(const Location& loc, const DateTime& start,
                                          const DateTime& end, double step_minutes,
                                          double ambient_temp_c = 25.0,
                                          const SolarOptions& solar_opts = {}) {
    validate(loc);
    if (step_minutes < 1.0) throw InputError("clearsky series: step must be >= 1 minute");
    if (!(to_unix_seconds(start) <= to_unix_seconds(end)))
        throw InputError("clearsky series: start must not be after end");
    WeatherSeries series;
    const double end_s = to_unix_seconds(end);
    for (DateTime t = start; to_unix_seconds(t) <= end_s + 1e-6;
         t = add_minutes(t, step_minutes)) {
        const SunPosition sun = solar_position(loc, t, solar_opts);
        WeatherSample s;
        s.timestamp = t;
        s.ghi = clearsky_ghi(sun.elevation_deg);
        if (s.ghi > 0.0) {
            auto [dhi, dni] = decompose_ghi(s.ghi, sun.elevation_deg);
            s.dhi = dhi;
            s.dni = dni;
        }
        s.ambient_temp_c = ambient_temp_c;
        s.source = WeatherSource::clearsky;
        series.samples.push_back(s);
    }
    return series;
}

// Fill missing DNI from the closure ghi = dhi + dni sin(el), given the site.
inline void resolve_missing_dni(WeatherSeries& series, const Location& loc) {
    for (auto& s : series.samples) {
        if (!s.dni_missing()) continue;
        const SunPosition sun = solar_position(loc, s.timestamp);
        if (sun.elevation_deg <= 0.0 || s.ghi <= 0.0) {
            s.dni = 0.0;
        } else {
            s.dni = std::max(0.0, (s.ghi - s.dhi) / sind(sun.elevation_deg));
        }
        s.source = WeatherSource::decomposed;
    }
}

}  // namespace vbpv
