#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vbpv/errors.hpp"
#include "vbpv/layout.hpp"
#include "vbpv/simulation.hpp"

namespace vbpv {

enum class SweepObjective { specific_yield, energy_per_acre, weighted };

struct SweepSpec {
    std::vector<double> tilts_deg;
    std::vector<double> azimuths_deg;
    std::vector<double> pitches_m;   // centre-to-centre row pitch
    SweepObjective objective = SweepObjective::specific_yield;
    double lambda = 0.5;             // weighted: lambda on energy, 1-lambda on farmable
    double step_minutes = 30.0;
    int year = 2022;
    std::size_t max_points = 10000;
    bool apply_row_shading = false;
    double vertical_structure_width_m = 0.3;
    double inter_module_gap_m = 0.003;
    std::optional<WeatherSeries> weather;  // default: synthetic clear-sky year
};

struct SweepPoint {
    MountingConfig config;
    PlantLayout layout;
    double annual_energy_kwh = 0.0;           // plant energy on the parcel
    double specific_yield_kwh_per_kwp_year = 0.0;
    double farmable_fraction = 1.0;
    double objective_value = 0.0;
};

namespace sweep_detail {

// Rows at >= 80 deg go on narrow vertical structures, landscape mounting;
// shallower rows pack as tilted tables, portrait.
inline PlantLayout layout_for(const LandParcel& land, const ModuleSpec& module,
                              double tilt, double pitch, const SweepSpec& spec) {
    if (tilt >= 80.0) {
        const double gap = std::max(0.0, pitch - spec.vertical_structure_width_m);
        return pack_vertical(land, module, gap, spec.vertical_structure_width_m, true);
    }
    const double footprint = module.length_m * cosd(tilt);
    const double gap = std::max(0.0, pitch - footprint);
    return pack_conventional(land, module, tilt, gap, spec.inter_module_gap_m);
}

}  // namespace sweep_detail

// Exhaustive deterministic sweep over the (tilt, azimuth, pitch) grid.
// Output is sorted by objective descending, ties broken lexicographically by
// (tilt, azimuth, pitch).
inline std::vector<SweepPoint> grid_sweep(const SweepSpec& spec, const LandParcel& land,
                                          const ModuleSpec& module, const Location& loc) {
    if (spec.tilts_deg.empty() || spec.azimuths_deg.empty() || spec.pitches_m.empty())
        throw InputError("grid_sweep: tilt, azimuth and pitch ranges must be non-empty");
    if (spec.lambda < 0.0 || spec.lambda > 1.0)
        throw InputError("grid_sweep: lambda out of range [0, 1]");
    const std::size_t n_points =
        spec.tilts_deg.size() * spec.azimuths_deg.size() * spec.pitches_m.size();
    if (n_points > spec.max_points)
        throw InputError("grid_sweep: grid has " + std::to_string(n_points) +
                         " points, exceeding the cap of " + std::to_string(spec.max_points) +
                         "; raise max_points to at least " + std::to_string(n_points));
    validate(land);
    validate(module);
    validate(loc);

    DateTime start{spec.year, 1, 1, 0, 0, 0, loc.utc_offset_hours};
    DateTime end{spec.year, 12, 31, 23, 59, 0, loc.utc_offset_hours};
    WeatherSeries weather = spec.weather
                                ? *spec.weather
                                : make_clearsky_series(loc, start, end, spec.step_minutes);
    if (spec.weather) {
        if (weather.samples.empty()) throw InputError("grid_sweep: weather series is empty");
        start = weather.samples.front().timestamp;
        end = weather.samples.back().timestamp;
    }

    std::vector<SweepPoint> points;
    points.reserve(n_points);
    for (double tilt : spec.tilts_deg) {
        for (double az : spec.azimuths_deg) {
            // the per-kWp simulation is pitch-independent unless shading is on
            std::optional<SimulationResult> cached;
            for (double pitch : spec.pitches_m) {
                PlantConfig plant;
                plant.module = module;
                plant.mounting.tilt_deg = tilt;
                plant.mounting.surface_azimuth_deg = az;
                plant.mounting.row_pitch_m = pitch;
                plant.thermal = default_thermal(module.is_bifacial());
                plant.apply_row_shading = spec.apply_row_shading;
                if (!cached || spec.apply_row_shading) {
                    cached = simulate(plant, weather, loc, start, end, spec.step_minutes,
                                      Engine::simple);
                }
                SweepPoint p;
                p.config = plant.mounting;
                p.layout = sweep_detail::layout_for(land, module, tilt, pitch, spec);
                p.specific_yield_kwh_per_kwp_year =
                    annualize_specific_yield(cached->specific_yield_day);
                p.annual_energy_kwh = cached->specific_yield_day * cached->window_days() *
                                      p.layout.capacity_kwp;
                p.farmable_fraction = p.layout.farmable_fraction;
                points.push_back(p);
            }
        }
    }
    double e_max = 0.0;
    for (const auto& p : points) e_max = std::max(e_max, p.annual_energy_kwh);
    for (auto& p : points) {
        switch (spec.objective) {
            case SweepObjective::specific_yield:
                p.objective_value = p.specific_yield_kwh_per_kwp_year;
                break;
            case SweepObjective::energy_per_acre:
                p.objective_value = p.annual_energy_kwh / land.area_acres();
                break;
            case SweepObjective::weighted:
                p.objective_value =
                    spec.lambda * (e_max > 0.0 ? p.annual_energy_kwh / e_max : 0.0) +
                    (1.0 - spec.lambda) * p.farmable_fraction;
                break;
        }
    }
    std::stable_sort(points.begin(), points.end(), [](const SweepPoint& a,
                                                      const SweepPoint& b) {
        if (a.objective_value != b.objective_value)
            return a.objective_value > b.objective_value;
        if (a.config.tilt_deg != b.config.tilt_deg) return a.config.tilt_deg < b.config.tilt_deg;
        if (a.config.surface_azimuth_deg != b.config.surface_azimuth_deg)
            return a.config.surface_azimuth_deg < b.config.surface_azimuth_deg;
        return a.config.row_pitch_m < b.config.row_pitch_m;
    });
    return points;
}

// --- Pareto frontier -----------------------------------------------------

struct ParetoPoint {
    MountingConfig config;
    double annual_energy_kwh = 0.0;
    double farmable_fraction = 0.0;
    bool dominated = false;
};

// Non-dominated subset (maximize energy and farmable fraction), sorted by
// energy descending. A point dominates another when it is >= on both axes
// and > on at least one.
inline std::vector<ParetoPoint> pareto_frontier(std::vector<ParetoPoint> points) {
    std::stable_sort(points.begin(), points.end(),
                     [](const ParetoPoint& a, const ParetoPoint& b) {
                         if (a.annual_energy_kwh != b.annual_energy_kwh)
                             return a.annual_energy_kwh > b.annual_energy_kwh;
                         return a.farmable_fraction > b.farmable_fraction;
                     });
    std::vector<ParetoPoint> frontier;
    double best_f = -1.0, best_f_energy = 0.0;
    for (auto& p : points) {
        const bool tied_keeper =
            p.farmable_fraction == best_f && p.annual_energy_kwh == best_f_energy;
        if (p.farmable_fraction > best_f || tied_keeper) {
            p.dominated = false;
            frontier.push_back(p);
            if (p.farmable_fraction > best_f) {
                best_f = p.farmable_fraction;
                best_f_energy = p.annual_energy_kwh;
            }
        }
    }
    return frontier;
}

// --- reports -------------------------------------------------------------

inline void write_sweep_csv(std::ostream& os, const std::vector<SweepPoint>& points) {
    os << "tilt_deg,azimuth_deg,pitch_m,objective,annual_energy_kwh,"
          "specific_yield_kwh_per_kwp_year,farmable_fraction,capacity_kwp\n";
    char buf[256];
    for (const auto& p : points) {
        std::snprintf(buf, sizeof buf, "%.4f,%.4f,%.4f,%.6f,%.4f,%.4f,%.6f,%.4f\n",
                      p.config.tilt_deg, p.config.surface_azimuth_deg,
                      p.config.row_pitch_m, p.objective_value, p.annual_energy_kwh,
                      p.specific_yield_kwh_per_kwp_year, p.farmable_fraction,
                      p.layout.capacity_kwp);
        os << buf;
    }
}

inline nlohmann::ordered_json frontier_json(const std::vector<ParetoPoint>& frontier) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& p : frontier) {
        arr.push_back({{"tilt_deg", p.config.tilt_deg},
                       {"azimuth_deg", p.config.surface_azimuth_deg},
                       {"pitch_m", p.config.row_pitch_m},
                       {"annual_energy_kwh", p.annual_energy_kwh},
                       {"farmable_fraction", p.farmable_fraction}});
    }
    return arr;
}

}  // namespace vbpv
