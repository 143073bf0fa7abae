#pragma once

#include <fstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "vbpv/errors.hpp"
#include "vbpv/location.hpp"
#include "vbpv/module.hpp"
#include "vbpv/simulation.hpp"

namespace vbpv {

// Bundled datasheet presets: a 375 Wp mono and a 330 Wp poly monofacial
// module, and a 355 Wp n-PERT bifacial module (87% bifaciality).
inline ModuleSpec module_preset(const std::string& name) {
    ModuleSpec m;
    m.name = name;
    m.n_cells = 72;
    m.length_m = 2.0;
    m.width_m = 1.0;
    if (name == "mono375") {
        m.p_max_w = 375.0; m.v_mp_v = 40.1; m.i_mp_a = 9.36;
        m.v_oc_v = 48.7; m.i_sc_a = 9.94; m.efficiency = 0.1933;
        m.tc_voc_pct_per_c = -0.28; m.tc_isc_pct_per_c = 0.057;
        m.tc_power_pct_per_c = -0.39; m.bifaciality = 0.0;
    } else if (name == "poly330") {
        m.p_max_w = 330.0; m.v_mp_v = 38.0; m.i_mp_a = 8.70;
        m.v_oc_v = 46.3; m.i_sc_a = 9.24; m.efficiency = 0.1703;
        m.tc_voc_pct_per_c = -0.29; m.tc_isc_pct_per_c = 0.057;
        m.tc_power_pct_per_c = -0.38; m.bifaciality = 0.0;
    } else if (name == "bifacial355") {
        m.p_max_w = 355.0; m.v_mp_v = 37.9; m.i_mp_a = 9.37;
        m.v_oc_v = 46.4; m.i_sc_a = 9.74; m.efficiency = 0.1759;
        m.tc_voc_pct_per_c = -0.31; m.tc_isc_pct_per_c = 0.065;
        m.tc_power_pct_per_c = -0.40; m.bifaciality = 0.87;
    } else {
        throw InputError("unknown module preset '" + name +
                         "' (known: mono375, poly330, bifacial355)");
    }
    validate(m);
    return m;
}

inline std::vector<std::string> module_preset_names() {
    return {"mono375", "poly330", "bifacial355"};
}

inline Location location_preset(const std::string& name) {
    Location loc;
    loc.name = name;
    loc.utc_offset_hours = 5.5;
    loc.albedo = 0.20;
    if (name == "raipur") {
        loc.latitude = 21.16; loc.longitude = 81.65;
    } else if (name == "leh") {
        loc.latitude = 34.16; loc.longitude = 77.58;
    } else if (name == "palakkad") {
        loc.latitude = 10.77; loc.longitude = 76.65;
    } else {
        throw InputError("unknown location preset '" + name +
                         "' (known: raipur, leh, palakkad)");
    }
    validate(loc);
    return loc;
}

inline std::vector<std::string> location_preset_names() {
    return {"raipur", "leh", "palakkad"};
}

// The six studied orientations: vertical (81 deg) bifacial facing south and
// east, vertical monofacials facing south, and latitude-tilt monofacials.
inline MountingConfig mounting_preset(const std::string& label) {
    MountingConfig m;
    m.label = label;
    m.lower_edge_m = 0.15;
    if (label == "SF81B")       { m.tilt_deg = 81.0; m.surface_azimuth_deg = 180.0; m.row_pitch_m = 3.3; }
    else if (label == "EF81B")  { m.tilt_deg = 81.0; m.surface_azimuth_deg = 90.0;  m.row_pitch_m = 3.3; }
    else if (label == "SF81MM") { m.tilt_deg = 81.0; m.surface_azimuth_deg = 180.0; m.row_pitch_m = 3.3; }
    else if (label == "SF81PM") { m.tilt_deg = 81.0; m.surface_azimuth_deg = 180.0; m.row_pitch_m = 3.3; }
    else if (label == "SF21PM") { m.tilt_deg = 21.0; m.surface_azimuth_deg = 180.0; m.row_pitch_m = 2.893; }
    else if (label == "SF21MM") { m.tilt_deg = 21.0; m.surface_azimuth_deg = 180.0; m.row_pitch_m = 2.893; }
    else
        throw InputError("unknown mounting preset '" + label +
                         "' (known: SF81B, EF81B, SF81MM, SF81PM, SF21PM, SF21MM)");
    validate(m);
    return m;
}

inline std::vector<std::string> mounting_preset_names() {
    return {"SF81B", "EF81B", "SF81MM", "SF81PM", "SF21PM", "SF21MM"};
}

inline Location location_from_json(const nlohmann::json& j) {
    Location loc;
    try {
        loc.name = j.value("name", std::string());
        loc.latitude = j.at("latitude").get<double>();
        loc.longitude = j.at("longitude").get<double>();
        loc.utc_offset_hours = j.at("utc_offset").get<double>();
        loc.albedo = j.value("albedo", 0.20);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("location json: ") + e.what());
    }
    validate(loc);
    return loc;
}

inline Location load_location_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("location: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("location '" + path + "': " + e.what());
    }
    return location_from_json(j);
}

// Accepts a preset name or a path to a location JSON file.
inline Location resolve_location(const std::string& ref) {
    for (const auto& name : location_preset_names())
        if (ref == name) return location_preset(ref);
    return load_location_json(ref);
}

// Accepts a preset name or a path to a module spec JSON file.
inline ModuleSpec resolve_module(const std::string& ref) {
    for (const auto& name : module_preset_names())
        if (ref == name) return module_preset(ref);
    return load_module_json(ref);
}

// Module technology implied by a mounting label's technology code.
inline ModuleSpec module_for_label(const std::string& label) {
    if (label.size() >= 2 && label.substr(label.size() - 2) == "MM")
        return module_preset("mono375");
    if (label.size() >= 2 && label.substr(label.size() - 2) == "PM")
        return module_preset("poly330");
    if (!label.empty() && label.back() == 'B') return module_preset("bifacial355");
    throw InputError("cannot infer module technology from label '" + label + "'");
}

}  // namespace vbpv
