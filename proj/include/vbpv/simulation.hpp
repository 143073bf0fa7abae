#pragma once

#include <algorithm>
#include <cmath>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vbpv/datetime.hpp"
#include "vbpv/errors.hpp"
#include "vbpv/irradiance.hpp"
#include "vbpv/layout.hpp"
#include "vbpv/location.hpp"
#include "vbpv/module.hpp"
#include "vbpv/solar.hpp"

namespace vbpv {

// Orientation of a module row. Labels follow the face+tilt+technology
// nomenclature (e.g. EF81B = east-facing, 81 deg tilt, bifacial).
struct MountingConfig {
    double tilt_deg = 90.0;
    double surface_azimuth_deg = 180.0;
    double row_pitch_m = 3.0;
    double lower_edge_m = 0.15;
    std::string label;
};

// face letter (N/E/S/W) + 'F' + two-digit tilt + technology code (B/MM/PM)
inline bool label_matches_grammar(const std::string& label) {
    if (label.size() < 4) return false;
    if (label[0] != 'N' && label[0] != 'E' && label[0] != 'S' && label[0] != 'W')
        return false;
    if (label[1] != 'F') return false;
    std::size_t i = 2;
    std::size_t digits = 0;
    while (i < label.size() && label[i] >= '0' && label[i] <= '9') { ++i; ++digits; }
    if (digits != 2) return false;
    const std::string tech = label.substr(i);
    return tech == "B" || tech == "MM" || tech == "PM";
}

inline void validate(const MountingConfig& m) {
    if (m.tilt_deg < 0.0 || m.tilt_deg > 90.0)
        throw InputError("mounting: tilt out of range [0, 90]");
    if (m.row_pitch_m <= 0.0) throw InputError("mounting: row pitch must be > 0");
    if (m.lower_edge_m < 0.0) throw InputError("mounting: lower edge must be >= 0");
    if (!m.label.empty() && !label_matches_grammar(m.label))
        throw InputError("mounting: label '" + m.label +
                         "' does not follow the face+tilt+technology grammar");
}

// --- energy integration ------------------------------------------------------

struct PowerSample {
    DateTime timestamp;
    double watts = 0.0;
};

enum class IntegrationRule { trapezoid, rectangle };

// Energy of a power series in kWh. Trapezoid matches linear interpolation
// between readings; rectangle (left) is the cross-check.
inline double integrate_energy(const std::vector<PowerSample>& series,
                               IntegrationRule rule = IntegrationRule::trapezoid) {
    if (series.empty()) throw InputError("integrate_energy: empty series");
    double wh = 0.0;
    for (std::size_t i = 1; i < series.size(); ++i) {
        const double dt_h = (to_unix_seconds(series[i].timestamp) -
                             to_unix_seconds(series[i - 1].timestamp)) / 3600.0;
        if (dt_h <= 0.0)
            throw InputError("integrate_energy: series not strictly time-ordered");
        if (rule == IntegrationRule::trapezoid)
            wh += 0.5 * (series[i - 1].watts + series[i].watts) * dt_h;
        else
            wh += series[i - 1].watts * dt_h;
    }
    return wh / 1000.0;
}

// --- plant metrics -------------------------------------------------------

// PR = (EY * G_STC) / (G_POA * rated), with G_STC = 1 kW/m2.
inline double performance_ratio(double energy_kwh, double g_poa_kwh_m2, double rated_kwp) {
    if (!(g_poa_kwh_m2 > 0.0) || !(rated_kwp > 0.0))
        throw InputError("performance_ratio: insolation and rated capacity must be > 0");
    return energy_kwh / (g_poa_kwh_m2 * rated_kwp);
}

// EY = G_POA * PR * (rated / G_STC).
inline double energy_yield(double g_poa_kwh_m2, double pr, double rated_kwp) {
    if (g_poa_kwh_m2 < 0.0 || pr < 0.0 || rated_kwp < 0.0)
        throw InputError("energy_yield: inputs must be >= 0");
    return g_poa_kwh_m2 * pr * rated_kwp;
}

inline double specific_yield_kwh_per_kwp_day(double energy_kwh, double rated_kwp,
                                             double days) {
    if (!(rated_kwp > 0.0) || !(days > 0.0))
        throw InputError("specific_yield: rated capacity and days must be > 0");
    return energy_kwh / (rated_kwp * days);
}

inline double annualize_specific_yield(double kwh_per_kwp_day) {
    return kwh_per_kwp_day * 365.0;
}

// --- time-stepped simulation ---------------------------------------------

enum class Engine { simple, diode };

struct PlantConfig {
    ModuleSpec module;
    MountingConfig mounting;
    ThermalParams thermal;
    std::optional<PlantLayout> layout;           // scales power by module count
    std::optional<SingleDiodeParams> diode;      // reused when engine = diode
    bool apply_row_shading = false;              // row-on-row beam shading
    double row_slant_width_m = 0.0;              // 0: module length
    SolarOptions solar_options;                  // test hook: mean-time driving
};

struct StepRecord {
    DateTime timestamp;
    double g_front_wm2 = 0.0;
    double g_rear_wm2 = 0.0;
    double t_cell_c = 0.0;
    double dc_power_w = 0.0;
};

struct SimulationResult {
    std::string label;
    std::vector<StepRecord> steps;
    double energy_kwh = 0.0;
    double g_poa_kwh_m2 = 0.0;  // equivalent-plane insolation: front + phi rear
    double rated_kwp = 0.0;
    double pr = 0.0;
    double specific_yield_day = 0.0;  // kWh/kWp/day over the window
    DateTime window_start, window_end;
    double step_minutes = 0.0;

    double window_days() const {
        return (to_unix_seconds(window_end) - to_unix_seconds(window_start)) / 86400.0;
    }
};

namespace sim_detail {

inline std::vector<PowerSample> power_series(const SimulationResult& r) {
    std::vector<PowerSample> s;
    s.reserve(r.steps.size());
    for (const auto& st : r.steps) s.push_back({st.timestamp, st.dc_power_w});
    return s;
}

}  // namespace sim_detail

// Per step: sun position -> row shading -> both-face POA -> cell temperature
// -> DC power. Weather must cover every grid point of the window.
inline SimulationResult simulate(const PlantConfig& plant, const WeatherSeries& weather,
                                 const Location& loc, const DateTime& window_start,
                                 const DateTime& window_end, double step_minutes,
                                 Engine engine = Engine::simple) {
    validate(loc);
    validate(plant.module);
    validate(plant.mounting);
    validate(plant.thermal);
    if (step_minutes < 1.0 || step_minutes > 60.0)
        throw InputError("simulate: step must be within [1, 60] minutes");
    if (!(to_unix_seconds(window_start) < to_unix_seconds(window_end)))
        throw InputError("simulate: window start must precede end");

    std::optional<SingleDiodeParams> diode = plant.diode;
    if (engine == Engine::diode && !diode) diode = extract_single_diode(plant.module);

    const double slant = plant.row_slant_width_m > 0.0 ? plant.row_slant_width_m
                                                       : plant.module.length_m;
    const RowGeometry row = make_row_geometry(slant, plant.mounting.tilt_deg,
                                              plant.mounting.surface_azimuth_deg,
                                              plant.mounting.lower_edge_m,
                                              plant.mounting.row_pitch_m);

    SimulationResult res;
    res.label = plant.mounting.label;
    res.window_start = window_start;
    res.window_end = window_end;
    res.step_minutes = step_minutes;
    const int count = plant.layout ? plant.layout->total_modules : 1;
    res.rated_kwp = count * plant.module.p_max_w / 1000.0;

    std::vector<std::string> gaps;
    const double end_s = to_unix_seconds(window_end);
    for (DateTime t = window_start; to_unix_seconds(t) <= end_s + 1e-6;
         t = add_minutes(t, step_minutes)) {
        const auto sample = weather.at(t);
        if (!sample) {
            if (gaps.size() < 8) gaps.push_back(to_iso8601(t));
            continue;
        }
        WeatherSample w = *sample;
        const SunPosition sun = solar_position(loc, t, plant.solar_options);
        if (w.dni_missing()) {
            w.dni = (sun.elevation_deg > 0.0 && w.ghi > 0.0)
                        ? std::max(0.0, (w.ghi - w.dhi) / sind(sun.elevation_deg))
                        : 0.0;
        }
        double front_shade = 0.0, rear_shade = 0.0;
        if (plant.apply_row_shading) {
            front_shade =
                row_shading_fraction(row, plant.mounting.row_pitch_m, sun, Face::front);
            rear_shade =
                row_shading_fraction(row, plant.mounting.row_pitch_m, sun, Face::rear);
        }
        const PoaIrradiance poa =
            bifacial_poa(w, sun, plant.mounting.tilt_deg,
                         plant.mounting.surface_azimuth_deg, loc.albedo, front_shade,
                         rear_shade);
        const double g_f = poa.front.total(), g_r = poa.rear.total();
        const double t_cell = cell_temperature(w.ambient_temp_c, g_f, g_r, plant.thermal);
        double p_module;
        if (engine == Engine::diode) {
            p_module = mpp(*diode, g_f, g_r, plant.module.bifaciality, t_cell).p_mp;
        } else {
            const double g_e = equivalent_irradiance(g_f, g_r, plant.module.bifaciality);
            p_module = simple_power(plant.module, g_e, t_cell);
        }
        res.steps.push_back({t, g_f, g_r, t_cell, std::max(0.0, p_module) * count});
    }
    if (!gaps.empty()) {
        std::string msg = "simulate: weather does not cover the window; missing steps:";
        for (const auto& g : gaps) msg += " " + g;
        throw ComputationError(msg);
    }
    if (res.steps.size() >= 2) {
        res.energy_kwh = integrate_energy(sim_detail::power_series(res));
        std::vector<PowerSample> poa_series;
        poa_series.reserve(res.steps.size());
        for (const auto& st : res.steps)
            poa_series.push_back(
                {st.timestamp, st.g_front_wm2 + plant.module.bifaciality * st.g_rear_wm2});
        res.g_poa_kwh_m2 = integrate_energy(poa_series);
        res.pr = res.g_poa_kwh_m2 > 0.0
                     ? performance_ratio(res.energy_kwh, res.g_poa_kwh_m2, res.rated_kwp)
                     : 0.0;
        res.specific_yield_day =
            specific_yield_kwh_per_kwp_day(res.energy_kwh, res.rated_kwp, res.window_days());
    }
    return res;
}

// Strict interior maxima of the power profile (a dual-peak east-west day
// counts 2, a south-facing day counts 1).
inline int count_power_peaks(const SimulationResult& r) {
    double p_max = 0.0;
    for (const auto& s : r.steps) p_max = std::max(p_max, s.dc_power_w);
    if (p_max <= 0.0) return 0;
    const double eps = 1e-9 * p_max;
    int peaks = 0;
    for (std::size_t i = 1; i + 1 < r.steps.size(); ++i) {
        if (r.steps[i].dc_power_w > r.steps[i - 1].dc_power_w + eps &&
            r.steps[i].dc_power_w > r.steps[i + 1].dc_power_w + eps)
            ++peaks;
    }
    return peaks;
}

// Timestamp of the global power maximum.
inline DateTime peak_time(const SimulationResult& r) {
    if (r.steps.empty()) throw InputError("peak_time: empty result");
    std::size_t best = 0;
    for (std::size_t i = 1; i < r.steps.size(); ++i)
        if (r.steps[i].dc_power_w > r.steps[best].dc_power_w) best = i;
    return r.steps[best].timestamp;
}

// Timestamp of the interior minimum between the two highest peaks.
inline DateTime midday_minimum_time(const SimulationResult& r) {
    // locate the two largest interior maxima, then the valley between them
    std::vector<std::size_t> maxima;
    double p_max = 0.0;
    for (const auto& s : r.steps) p_max = std::max(p_max, s.dc_power_w);
    const double eps = 1e-9 * p_max;
    for (std::size_t i = 1; i + 1 < r.steps.size(); ++i)
        if (r.steps[i].dc_power_w > r.steps[i - 1].dc_power_w + eps &&
            r.steps[i].dc_power_w > r.steps[i + 1].dc_power_w + eps)
            maxima.push_back(i);
    if (maxima.size() < 2)
        throw ComputationError("midday_minimum_time: profile has fewer than two peaks");
    std::sort(maxima.begin(), maxima.end(), [&](std::size_t a, std::size_t b) {
        return r.steps[a].dc_power_w > r.steps[b].dc_power_w;
    });
    std::size_t lo = std::min(maxima[0], maxima[1]), hi = std::max(maxima[0], maxima[1]);
    std::size_t valley = lo;
    for (std::size_t i = lo; i <= hi; ++i)
        if (r.steps[i].dc_power_w < r.steps[valley].dc_power_w) valley = i;
    return r.steps[valley].timestamp;
}

// --- configuration comparison ----------------------------------------------

struct ComparisonTable {
    std::vector<std::string> labels;                 // sorted
    std::vector<double> specific_yield_day;          // kWh/kWp/day per label
    std::vector<std::vector<double>> ratio;          // ratio[i][j] = yield_i / yield_j
};

// Pairwise specific-energy ratios over identical windows.
inline ComparisonTable compare_configurations(
    const std::map<std::string, SimulationResult>& results) {
    if (results.size() < 2)
        throw InputError("compare_configurations: need at least two results");
    ComparisonTable t;
    const SimulationResult* first = nullptr;
    for (const auto& [label, r] : results) {
        if (!first) {
            first = &r;
        } else if (!same_instant(r.window_start, first->window_start) ||
                   !same_instant(r.window_end, first->window_end)) {
            throw InputError("compare_configurations: result windows differ for '" +
                             label + "'");
        }
        t.labels.push_back(label);
        t.specific_yield_day.push_back(r.specific_yield_day);
    }
    const std::size_t n = t.labels.size();
    t.ratio.assign(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            t.ratio[i][j] = t.specific_yield_day[j] != 0.0
                                ? t.specific_yield_day[i] / t.specific_yield_day[j]
                                : 0.0;
    return t;
}

// --- exports -----------------------------------------------------------------

inline void write_result_csv(std::ostream& os, const SimulationResult& r) {
    os << "timestamp,g_front_wm2,g_rear_wm2,t_cell_c,p_dc_w\n";
    char buf[128];
    for (const auto& s : r.steps) {
        std::snprintf(buf, sizeof buf, ",%.4f,%.4f,%.3f,%.4f\n", s.g_front_wm2,
                      s.g_rear_wm2, s.t_cell_c, s.dc_power_w);
        os << to_iso8601(s.timestamp) << buf;
    }
}

// Two columns for gnuplot: hours since window start, DC watts.
inline void write_gnuplot_profile(std::ostream& os, const SimulationResult& r) {
    os << "# hours_since_start p_dc_w\n";
    const double t0 = to_unix_seconds(r.window_start);
    char buf[64];
    for (const auto& s : r.steps) {
        std::snprintf(buf, sizeof buf, "%.4f %.4f\n",
                      (to_unix_seconds(s.timestamp) - t0) / 3600.0, s.dc_power_w);
        os << buf;
    }
}

inline nlohmann::ordered_json result_summary_json(const SimulationResult& r) {
    const int peaks = count_power_peaks(r);
    return {{"label", r.label},
            {"window_start", to_iso8601(r.window_start)},
            {"window_end", to_iso8601(r.window_end)},
            {"step_minutes", r.step_minutes},
            {"rated_kwp", r.rated_kwp},
            {"energy_kwh", r.energy_kwh},
            {"g_poa_kwh_m2", r.g_poa_kwh_m2},
            {"performance_ratio", r.pr},
            {"specific_yield_kwh_per_kwp_day", r.specific_yield_day},
            {"specific_yield_kwh_per_kwp_year",
             annualize_specific_yield(r.specific_yield_day)},
            {"power_peaks", peaks},
            {"dual_peak", peaks == 2}};
}

}  // namespace vbpv
