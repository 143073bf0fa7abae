// vbpv - vertical bifacial PV plant simulator and design tool.
// Subcommands: sunpath | simulate | layout | sweep | compare.
// Exit codes: 0 success, 2 input error, 3 computation error.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "vbpv/vbpv.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

bool g_json_errors = false;

int fail(int code, const std::string& kind, const std::string& message) {
    if (g_json_errors) {
        ordered_json err = {{"error", kind}, {"message", message}};
        std::cerr << err.dump() << "\n";
    } else {
        std::cerr << "vbpv: " << message << "\n";
    }
    return code;
}

json load_config(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw vbpv::InputError("config: cannot open '" + path + "'");
    json j;
    try {
        f >> j;
    } catch (const json::exception& e) {
        throw vbpv::InputError("config '" + path + "': " + e.what());
    }
    return j;
}

// CLI flags win over config-file values; config wins over defaults.
template <typename T>
void merge(const json& cfg, const char* key, const CLI::Option* opt, T& value) {
    if (opt->count() > 0) return;  // explicit flag
    if (cfg.contains(key)) value = cfg.at(key).get<T>();
}

vbpv::DateTime parse_date(const std::string& s, double utc_offset) {
    vbpv::DateTime t;
    if (std::sscanf(s.c_str(), "%d-%d-%d", &t.year, &t.month, &t.day) != 3)
        throw vbpv::InputError("date: expected YYYY-MM-DD, got '" + s + "'");
    t.hour = 0; t.minute = 0; t.second = 0;
    t.utc_offset_hours = utc_offset;
    vbpv::validate(t);
    return t;
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == ',') { if (!cur.empty()) out.push_back(cur); cur.clear(); }
        else cur += c;
    }
    if (!cur.empty()) out.push_back(cur);
    return out;
}

void write_file(const std::string& path, const std::string& body) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw vbpv::InputError("cannot open '" + path + "' for writing");
    f << body;
}

vbpv::WeatherSeries weather_for(const std::string& source, const vbpv::Location& loc,
                                const vbpv::DateTime& start, const vbpv::DateTime& end,
                                double step_min, double ambient_c) {
    if (source == "clearsky")
        return vbpv::make_clearsky_series(loc, start, end, step_min, ambient_c);
    vbpv::WeatherSeries w = vbpv::load_weather_csv(source);
    vbpv::resolve_missing_dni(w, loc);
    return w;
}

// --- sunpath ---------------------------------------------------------------

struct SunpathArgs {
    std::string config_path, location = "raipur", dates, out = "sunpath.csv";
    double step = 15.0;
};

int run_sunpath(SunpathArgs& a, const CLI::App* cmd) {
    if (!a.config_path.empty()) {
        const json cfg = load_config(a.config_path);
        merge(cfg, "location", cmd->get_option("--location"), a.location);
        merge(cfg, "dates", cmd->get_option("--dates"), a.dates);
        merge(cfg, "step-minutes", cmd->get_option("--step-minutes"), a.step);
        merge(cfg, "out", cmd->get_option("--out"), a.out);
    }
    const vbpv::Location loc = vbpv::resolve_location(a.location);
    if (a.dates.empty()) throw vbpv::InputError("sunpath: --dates is required");
    std::vector<vbpv::DateTime> dates;
    for (const auto& d : split_list(a.dates))
        dates.push_back(parse_date(d, loc.utc_offset_hours));
    const auto rows = vbpv::sun_path_table(loc, dates, a.step);
    std::ostringstream os;
    vbpv::write_sun_path_csv(os, rows);
    write_file(a.out, os.str());
    std::cout << a.out << ": " << rows.size() << " daylight rows\n";
    return 0;
}

// --- simulate ---------------------------------------------------------------

struct SimulateArgs {
    std::string config_path, location = "raipur", mounting = "EF81B", module;
    std::string date, window_start, window_end;
    std::string engine = "simple", weather = "clearsky", out_dir = ".";
    double step = 15.0, ambient = 25.0;
    double tilt = -1.0, azimuth = -1.0;
    bool row_shading = false;
};

int run_simulate(SimulateArgs& a, const CLI::App* cmd) {
    if (!a.config_path.empty()) {
        const json cfg = load_config(a.config_path);
        merge(cfg, "location", cmd->get_option("--location"), a.location);
        merge(cfg, "mounting", cmd->get_option("--mounting"), a.mounting);
        merge(cfg, "module", cmd->get_option("--module"), a.module);
        merge(cfg, "date", cmd->get_option("--date"), a.date);
        merge(cfg, "window-start", cmd->get_option("--window-start"), a.window_start);
        merge(cfg, "window-end", cmd->get_option("--window-end"), a.window_end);
        merge(cfg, "engine", cmd->get_option("--engine"), a.engine);
        merge(cfg, "weather", cmd->get_option("--weather"), a.weather);
        merge(cfg, "out-dir", cmd->get_option("--out-dir"), a.out_dir);
        merge(cfg, "step-minutes", cmd->get_option("--step-minutes"), a.step);
        merge(cfg, "ambient-c", cmd->get_option("--ambient-c"), a.ambient);
        merge(cfg, "tilt", cmd->get_option("--tilt"), a.tilt);
        merge(cfg, "azimuth", cmd->get_option("--azimuth"), a.azimuth);
        merge(cfg, "row-shading", cmd->get_option("--row-shading"), a.row_shading);
    }
    const vbpv::Location loc = vbpv::resolve_location(a.location);

    vbpv::PlantConfig plant;
    plant.mounting = vbpv::mounting_preset(a.mounting);
    plant.module = a.module.empty() ? vbpv::module_for_label(a.mounting)
                                    : vbpv::resolve_module(a.module);
    if (a.tilt >= 0.0) plant.mounting.tilt_deg = a.tilt;
    if (a.azimuth >= 0.0) plant.mounting.surface_azimuth_deg = a.azimuth;
    plant.thermal = vbpv::default_thermal(plant.module.is_bifacial());
    plant.apply_row_shading = a.row_shading;

    vbpv::DateTime start, end;
    if (!a.window_start.empty() && !a.window_end.empty()) {
        start = vbpv::parse_iso8601(a.window_start);
        end = vbpv::parse_iso8601(a.window_end);
    } else if (!a.date.empty()) {
        start = parse_date(a.date, loc.utc_offset_hours);
        end = vbpv::add_minutes(start, 1439.0);
    } else {
        throw vbpv::InputError("simulate: set --date or --window-start/--window-end");
    }

    const vbpv::WeatherSeries weather =
        weather_for(a.weather, loc, start, end, a.step, a.ambient);
    vbpv::Engine engine;
    if (a.engine == "diode") engine = vbpv::Engine::diode;
    else if (a.engine == "simple") engine = vbpv::Engine::simple;
    else throw vbpv::InputError("simulate: engine must be 'simple' or 'diode'");
    const vbpv::SimulationResult result =
        vbpv::simulate(plant, weather, loc, start, end, a.step, engine);

    fs::create_directories(a.out_dir);
    const std::string base = (fs::path(a.out_dir) / plant.mounting.label).string();
    std::ostringstream csv, gp;
    vbpv::write_result_csv(csv, result);
    vbpv::write_gnuplot_profile(gp, result);
    write_file(base + "_series.csv", csv.str());
    write_file(base + "_profile.dat", gp.str());
    write_file(base + "_summary.json", vbpv::result_summary_json(result).dump(2) + "\n");
    std::cout << vbpv::result_summary_json(result).dump(2) << "\n";
    return 0;
}

// --- layout -------------------------------------------------------------

struct LayoutArgs {
    std::string config_path, module = "mono375", mode = "conventional", out;
    std::string label;
    double land_length = 63.61, land_width = 63.61;
    double tilt = 21.0, inter_row = 1.026, gap = 0.003, structure = 0.3;
    bool portrait = false;
};

int run_layout(LayoutArgs& a, const CLI::App* cmd) {
    if (!a.config_path.empty()) {
        const json cfg = load_config(a.config_path);
        merge(cfg, "module", cmd->get_option("--module"), a.module);
        merge(cfg, "mode", cmd->get_option("--mode"), a.mode);
        merge(cfg, "out", cmd->get_option("--out"), a.out);
        merge(cfg, "label", cmd->get_option("--label"), a.label);
        merge(cfg, "land-length", cmd->get_option("--land-length"), a.land_length);
        merge(cfg, "land-width", cmd->get_option("--land-width"), a.land_width);
        merge(cfg, "tilt", cmd->get_option("--tilt"), a.tilt);
        merge(cfg, "inter-row", cmd->get_option("--inter-row"), a.inter_row);
        merge(cfg, "inter-module-gap", cmd->get_option("--inter-module-gap"), a.gap);
        merge(cfg, "structure-width", cmd->get_option("--structure-width"), a.structure);
        merge(cfg, "portrait", cmd->get_option("--portrait"), a.portrait);
    }
    const vbpv::LandParcel land{a.land_length, a.land_width};
    const vbpv::ModuleSpec module = vbpv::resolve_module(a.module);
    vbpv::PlantLayout lay;
    if (a.mode == "conventional") {
        lay = vbpv::pack_conventional(land, module, a.tilt, a.inter_row, a.gap);
    } else if (a.mode == "vertical") {
        lay = vbpv::pack_vertical(land, module, a.inter_row, a.structure, !a.portrait);
    } else {
        throw vbpv::InputError("layout: mode must be 'conventional' or 'vertical'");
    }
    lay.mounting_label = a.label;
    const std::string body = vbpv::layout_report_json(lay, land).dump(2) + "\n";
    if (!a.out.empty()) write_file(a.out, body);
    std::cout << body;
    return 0;
}

// --- sweep --------------------------------------------------------------

struct SweepArgs {
    std::string config_path, location = "raipur", module = "bifacial355";
    std::string objective = "specific_yield", out_dir = ".";
    std::vector<double> tilts, azimuths, pitches;
    double lambda = 0.5, step = 30.0;
    double land_length = 63.61, land_width = 63.61;
    int year = 2022;
};

int run_sweep(SweepArgs& a, const CLI::App* cmd) {
    if (!a.config_path.empty()) {
        const json cfg = load_config(a.config_path);
        merge(cfg, "location", cmd->get_option("--location"), a.location);
        merge(cfg, "module", cmd->get_option("--module"), a.module);
        merge(cfg, "objective", cmd->get_option("--objective"), a.objective);
        merge(cfg, "out-dir", cmd->get_option("--out-dir"), a.out_dir);
        merge(cfg, "tilts", cmd->get_option("--tilts"), a.tilts);
        merge(cfg, "azimuths", cmd->get_option("--azimuths"), a.azimuths);
        merge(cfg, "pitches", cmd->get_option("--pitches"), a.pitches);
        merge(cfg, "lambda", cmd->get_option("--lambda"), a.lambda);
        merge(cfg, "step-minutes", cmd->get_option("--step-minutes"), a.step);
        merge(cfg, "land-length", cmd->get_option("--land-length"), a.land_length);
        merge(cfg, "land-width", cmd->get_option("--land-width"), a.land_width);
        merge(cfg, "year", cmd->get_option("--year"), a.year);
    }
    const vbpv::Location loc = vbpv::resolve_location(a.location);
    const vbpv::ModuleSpec module = vbpv::resolve_module(a.module);
    const vbpv::LandParcel land{a.land_length, a.land_width};

    vbpv::SweepSpec spec;
    spec.tilts_deg = a.tilts;
    spec.azimuths_deg = a.azimuths;
    spec.pitches_m = a.pitches;
    spec.lambda = a.lambda;
    spec.step_minutes = a.step;
    spec.year = a.year;
    if (a.objective == "specific_yield") spec.objective = vbpv::SweepObjective::specific_yield;
    else if (a.objective == "energy_per_acre") spec.objective = vbpv::SweepObjective::energy_per_acre;
    else if (a.objective == "weighted") spec.objective = vbpv::SweepObjective::weighted;
    else throw vbpv::InputError("sweep: unknown objective '" + a.objective + "'");

    const auto points = vbpv::grid_sweep(spec, land, module, loc);

    std::vector<vbpv::ParetoPoint> cloud;
    for (const auto& p : points) {
        vbpv::ParetoPoint pp;
        pp.config = p.config;
        pp.annual_energy_kwh = p.annual_energy_kwh;
        pp.farmable_fraction = p.farmable_fraction;
        cloud.push_back(pp);
    }
    const auto frontier = vbpv::pareto_frontier(cloud);

    fs::create_directories(a.out_dir);
    std::ostringstream csv;
    vbpv::write_sweep_csv(csv, points);
    write_file((fs::path(a.out_dir) / "sweep_points.csv").string(), csv.str());
    write_file((fs::path(a.out_dir) / "sweep_frontier.json").string(),
               vbpv::frontier_json(frontier).dump(2) + "\n");
    std::cout << "evaluated " << points.size() << " configurations; frontier size "
              << frontier.size() << "\n";
    return 0;
}

// --- compare ------------------------------------------------------------

struct CompareArgs {
    std::string config_path, locations = "raipur", configs = "SF21MM,SF81B,EF81B";
    std::string out;
    double step = 30.0;
    int year = 2022;
};

int run_compare(CompareArgs& a, const CLI::App* cmd) {
    if (!a.config_path.empty()) {
        const json cfg = load_config(a.config_path);
        merge(cfg, "locations", cmd->get_option("--locations"), a.locations);
        merge(cfg, "configs", cmd->get_option("--configs"), a.configs);
        merge(cfg, "out", cmd->get_option("--out"), a.out);
        merge(cfg, "step-minutes", cmd->get_option("--step-minutes"), a.step);
        merge(cfg, "year", cmd->get_option("--year"), a.year);
    }
    const auto loc_names = split_list(a.locations);
    const auto labels = split_list(a.configs);
    if (loc_names.empty() || labels.empty())
        throw vbpv::InputError("compare: need at least one location and one config");
    {
        auto sorted = labels;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw vbpv::InputError("compare: duplicate config labels");
        sorted = loc_names;
        std::sort(sorted.begin(), sorted.end());
        if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
            throw vbpv::InputError("compare: duplicate locations");
    }

    ordered_json table = ordered_json::array();
    for (const auto& loc_name : loc_names) {
        const vbpv::Location loc = vbpv::resolve_location(loc_name);
        const vbpv::DateTime start{a.year, 1, 1, 0, 0, 0, loc.utc_offset_hours};
        const vbpv::DateTime end{a.year, 12, 31, 23, 59, 0, loc.utc_offset_hours};
        const vbpv::WeatherSeries weather =
            vbpv::make_clearsky_series(loc, start, end, a.step);
        ordered_json row = {{"location", loc_name}};
        for (const auto& label : labels) {
            vbpv::PlantConfig plant;
            plant.mounting = vbpv::mounting_preset(label);
            plant.module = vbpv::module_for_label(label);
            plant.thermal = vbpv::default_thermal(plant.module.is_bifacial());
            const auto r = vbpv::simulate(plant, weather, loc, start, end, a.step);
            row[label] = vbpv::annualize_specific_yield(r.specific_yield_day);
        }
        table.push_back(row);
    }
    const std::string body = table.dump(2) + "\n";
    if (!a.out.empty()) write_file(a.out, body);
    std::cout << body;
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"vertical bifacial PV plant simulator and design tool"};
    app.require_subcommand(1);
    app.add_flag("--json-errors", g_json_errors, "emit errors as JSON on stderr");

    SunpathArgs sp;
    CLI::App* sunpath = app.add_subcommand("sunpath", "export a sun-path table as CSV");
    sunpath->add_option("--config", sp.config_path, "JSON config file");
    sunpath->add_option("--location", sp.location, "location preset or JSON file");
    sunpath->add_option("--dates", sp.dates, "comma-separated YYYY-MM-DD list");
    sunpath->add_option("--step-minutes", sp.step, "table step in minutes");
    sunpath->add_option("--out", sp.out, "output CSV path");

    SimulateArgs sim;
    CLI::App* simulate = app.add_subcommand("simulate", "run a time-stepped simulation");
    simulate->add_option("--config", sim.config_path, "JSON config file");
    simulate->add_option("--location", sim.location, "location preset or JSON file");
    simulate->add_option("--mounting", sim.mounting, "mounting preset label");
    simulate->add_option("--module", sim.module, "module preset or JSON file");
    simulate->add_option("--date", sim.date, "single civil day YYYY-MM-DD");
    simulate->add_option("--window-start", sim.window_start, "ISO-8601 window start");
    simulate->add_option("--window-end", sim.window_end, "ISO-8601 window end");
    simulate->add_option("--engine", sim.engine, "simple | diode");
    simulate->add_option("--weather", sim.weather, "'clearsky' or weather CSV path");
    simulate->add_option("--out-dir", sim.out_dir, "output directory");
    simulate->add_option("--step-minutes", sim.step, "simulation step in minutes");
    simulate->add_option("--ambient-c", sim.ambient, "clear-sky ambient temperature");
    simulate->add_option("--tilt", sim.tilt, "override mounting tilt");
    simulate->add_option("--azimuth", sim.azimuth, "override surface azimuth");
    simulate->add_flag("--row-shading", sim.row_shading, "apply row-on-row beam shading");

    LayoutArgs lay;
    CLI::App* layout = app.add_subcommand("layout", "pack module rows onto a parcel");
    layout->add_option("--config", lay.config_path, "JSON config file");
    layout->add_option("--module", lay.module, "module preset or JSON file");
    layout->add_option("--mode", lay.mode, "conventional | vertical");
    layout->add_option("--label", lay.label, "mounting label for the report");
    layout->add_option("--land-length", lay.land_length, "parcel edge along rows, m");
    layout->add_option("--land-width", lay.land_width, "parcel edge across rows, m");
    layout->add_option("--tilt", lay.tilt, "row tilt (conventional), deg");
    layout->add_option("--inter-row", lay.inter_row, "clear gap between rows, m");
    layout->add_option("--inter-module-gap", lay.gap, "gap between modules in a row, m");
    layout->add_option("--structure-width", lay.structure, "vertical structure width, m");
    layout->add_flag("--portrait", lay.portrait, "portrait mounting (vertical mode)");
    layout->add_option("--out", lay.out, "write the layout JSON here");

    SweepArgs sw;
    CLI::App* sweep = app.add_subcommand("sweep", "grid-sweep tilt/azimuth/pitch");
    sweep->add_option("--config", sw.config_path, "JSON config file");
    sweep->add_option("--location", sw.location, "location preset or JSON file");
    sweep->add_option("--module", sw.module, "module preset or JSON file");
    sweep->add_option("--objective", sw.objective,
                      "specific_yield | energy_per_acre | weighted");
    sweep->add_option("--tilts", sw.tilts, "tilt grid, deg");
    sweep->add_option("--azimuths", sw.azimuths, "azimuth grid, deg");
    sweep->add_option("--pitches", sw.pitches, "row pitch grid, m");
    sweep->add_option("--lambda", sw.lambda, "energy weight for 'weighted'");
    sweep->add_option("--step-minutes", sw.step, "simulation step in minutes");
    sweep->add_option("--year", sw.year, "clear-sky year");
    sweep->add_option("--land-length", sw.land_length, "parcel edge, m");
    sweep->add_option("--land-width", sw.land_width, "parcel edge, m");
    sweep->add_option("--out-dir", sw.out_dir, "output directory");

    CompareArgs cp;
    CLI::App* compare = app.add_subcommand("compare", "annual yields across locations");
    compare->add_option("--config", cp.config_path, "JSON config file");
    compare->add_option("--locations", cp.locations, "comma-separated presets/files");
    compare->add_option("--configs", cp.configs, "comma-separated mounting labels");
    compare->add_option("--step-minutes", cp.step, "simulation step in minutes");
    compare->add_option("--year", cp.year, "clear-sky year");
    compare->add_option("--out", cp.out, "write the comparison JSON here");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        if (e.get_exit_code() == 0) return app.exit(e);  // --help
        return fail(2, "input", e.what());
    }

    try {
        if (*sunpath) return run_sunpath(sp, sunpath);
        if (*simulate) return run_simulate(sim, simulate);
        if (*layout) return run_layout(lay, layout);
        if (*sweep) return run_sweep(sw, sweep);
        if (*compare) return run_compare(cp, compare);
    } catch (const vbpv::InputError& e) {
        return fail(2, "input", e.what());
    } catch (const vbpv::ComputationError& e) {
        return fail(3, "computation", e.what());
    } catch (const json::exception& e) {
        return fail(2, "input", e.what());
    }
    return 0;
}
