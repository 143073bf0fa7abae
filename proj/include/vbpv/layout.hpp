#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include <json.hpp>

#include "vbpv/angles.hpp"
#include "vbpv/errors.hpp"
#include "vbpv/module.hpp"

namespace vbpv {

inline constexpr double kSquareMetersPerAcre = 4046.86;

// Rectangular land parcel. Rows run along `length`; rows stack across `width`.
struct LandParcel {
    double length_m = 0.0;
    double width_m = 0.0;

    double area_m2() const { return length_m * width_m; }
    double area_acres() const { return area_m2() / kSquareMetersPerAcre; }
};

inline LandParcel one_acre_square() {
    const double side = std::sqrt(kSquareMetersPerAcre);  // 63.61 m
    return {side, side};
}

inline void validate(const LandParcel& land) {
    if (!(land.length_m > 0.0) || !(land.width_m > 0.0))
        throw InputError("land parcel: length and width must be > 0");
}

struct PlantLayout {
    std::string mounting_label;
    double tilt_deg = 0.0;
    int modules_per_row = 0;
    int row_count = 0;
    int total_modules = 0;
    double capacity_kwp = 0.0;
    double inter_module_gap_m = 0.0;
    double inter_row_gap_m = 0.0;     // clear distance between row structures
    double row_pitch_m = 0.0;         // centre-to-centre
    double structure_width_m = 0.0;   // ground footprint depth of one row
    double row_length_m = 0.0;
    double gcr = 0.0;                 // module area / land area
    double footprint_fraction = 0.0;  // structure ground footprint / land area
    double farmable_fraction = 1.0;   // 1 - footprint_fraction
    bool empty = true;

    double module_p_max_w = 0.0;
};

namespace layout_detail {

// How many slots of `item` (+gap between consecutive items) fit along `edge`.
inline int count_with_gap(double edge, double item, double gap) {
    if (item <= 0.0 || edge < item) return 0;
    return static_cast<int>(std::floor((edge + gap) / (item + gap) + 1e-9));
}

inline PlantLayout finish(PlantLayout lay, const LandParcel& land, const ModuleSpec& spec,
                          double module_area_each) {
    lay.total_modules = lay.modules_per_row * lay.row_count;
    lay.empty = lay.total_modules == 0;
    lay.capacity_kwp = lay.total_modules * spec.p_max_w / 1000.0;
    lay.module_p_max_w = spec.p_max_w;
    lay.row_pitch_m = lay.structure_width_m + lay.inter_row_gap_m;
    if (!lay.empty) {
        lay.gcr = lay.total_modules * module_area_each / land.area_m2();
        lay.footprint_fraction =
            lay.row_count * lay.structure_width_m * lay.row_length_m / land.area_m2();
        lay.farmable_fraction = 1.0 - lay.footprint_fraction;
    } else {
        lay.gcr = 0.0;
        lay.footprint_fraction = 0.0;
        lay.farmable_fraction = 1.0;
    }
    return lay;
}

}  // namespace layout_detail

// Tilted rows, modules portrait (long side up the slope). Floor arithmetic on
// both axes; `inter_row` is the clear gap between row footprints.
inline PlantLayout pack_conventional(const LandParcel& land, const ModuleSpec& spec,
                                     double tilt_deg, double inter_row_m,
                                     double inter_module_gap_m) {
    validate(land);
    validate(spec);
    if (tilt_deg < 0.0 || tilt_deg > 90.0)
        throw InputError("pack_conventional: tilt out of range [0, 90]");
    if (inter_row_m < 0.0 || inter_module_gap_m < 0.0)
        throw InputError("pack_conventional: gaps must be >= 0");
    PlantLayout lay;
    lay.tilt_deg = tilt_deg;
    lay.inter_module_gap_m = inter_module_gap_m;
    lay.inter_row_gap_m = inter_row_m;
    lay.structure_width_m = spec.length_m * cosd(tilt_deg);
    lay.modules_per_row =
        layout_detail::count_with_gap(land.length_m, spec.width_m, inter_module_gap_m);
    lay.row_count =
        layout_detail::count_with_gap(land.width_m, lay.structure_width_m, inter_row_m);
    lay.row_length_m = lay.modules_per_row * spec.width_m +
                       std::max(0, lay.modules_per_row - 1) * inter_module_gap_m;
    return layout_detail::finish(lay, land, spec, spec.length_m * spec.width_m);
}

// Vertical rows on narrow mounting structures. Landscape mounting puts the
// module's long side along the row.
inline PlantLayout pack_vertical(const LandParcel& land, const ModuleSpec& spec,
                                 double inter_row_m, double structure_width_m,
                                 bool landscape) {
    validate(land);
    validate(spec);
    if (inter_row_m < 0.0) throw InputError("pack_vertical: inter_row must be >= 0");
    if (structure_width_m <= 0.0)
        throw InputError("pack_vertical: structure width must be > 0");
    PlantLayout lay;
    lay.tilt_deg = 90.0;
    lay.inter_row_gap_m = inter_row_m;
    lay.structure_width_m = structure_width_m;
    const double along_row = landscape ? spec.length_m : spec.width_m;
    lay.modules_per_row = layout_detail::count_with_gap(land.length_m, along_row, 0.0);
    lay.row_count =
        layout_detail::count_with_gap(land.width_m, structure_width_m, inter_row_m);
    lay.row_length_m = lay.modules_per_row * along_row;
    return layout_detail::finish(lay, land, spec, spec.length_m * spec.width_m);
}

// Row-to-row clearance sized for machinery access.
inline double tractor_clearance_pitch(double tractor_width_m, double side_clearance_m) {
    if (!(tractor_width_m > 0.0) || side_clearance_m < 0.0)
        throw InputError("tractor_clearance_pitch: widths must be > 0");
    return tractor_width_m + 2.0 * side_clearance_m;
}

inline double capacity_density_kwp_per_acre(const PlantLayout& lay, const LandParcel& land) {
    validate(land);
    return lay.capacity_kwp / land.area_acres();
}

// Share of the parcel left clear of mounting structures.
inline double farmable_fraction(const PlantLayout& lay, const LandParcel& land) {
    validate(land);
    if (lay.empty) return 1.0;
    const double footprint = lay.row_count * lay.structure_width_m * lay.row_length_m;
    if (footprint > land.area_m2() * (1.0 + 1e-9))
        throw InputError("farmable_fraction: layout does not fit the land parcel");
    return std::clamp(1.0 - footprint / land.area_m2(), 0.0, 1.0);
}

inline nlohmann::ordered_json layout_report_json(const PlantLayout& lay,
                                                 const LandParcel& land) {
    return {{"mounting", lay.mounting_label},
            {"tilt_deg", lay.tilt_deg},
            {"modules_per_row", lay.modules_per_row},
            {"row_count", lay.row_count},
            {"total_modules", lay.total_modules},
            {"capacity_kwp", lay.capacity_kwp},
            {"row_pitch_m", lay.row_pitch_m},
            {"inter_row_gap_m", lay.inter_row_gap_m},
            {"structure_width_m", lay.structure_width_m},
            {"gcr", lay.gcr},
            {"farmable_fraction", lay.farmable_fraction},
            {"capacity_density_kwp_per_acre", capacity_density_kwp_per_acre(lay, land)},
            {"empty", lay.empty}};
}

}  // namespace vbpv
