#pragma once

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "vbpv/errors.hpp"

namespace vbpv {

// Datasheet electrical parameters at STC plus bifaciality and physical size.
// Temperature coefficients carry datasheet units (%/degC).
struct ModuleSpec {
    std::string name;
    double p_max_w = 0.0;
    int n_cells = 72;
    double v_mp_v = 0.0;
    double i_mp_a = 0.0;
    double v_oc_v = 0.0;
    double i_sc_a = 0.0;
    double efficiency = 0.0;       // fraction
    double tc_voc_pct_per_c = 0.0; // beta, < 0
    double tc_isc_pct_per_c = 0.0; // alpha, > 0
    double tc_power_pct_per_c = 0.0; // gamma, < 0
    double bifaciality = 0.0;      // phi, 0 for monofacial
    double length_m = 2.0;
    double width_m = 1.0;

    bool is_bifacial() const { return bifaciality > 0.0; }
};

inline void validate(const ModuleSpec& m) {
    auto fail = [&](const std::string& what) {
        throw InputError("module spec" + (m.name.empty() ? "" : " '" + m.name + "'") +
                         ": " + what);
    };
    if (m.p_max_w <= 0.0) fail("p_max must be > 0");
    if (m.n_cells <= 0) fail("n_cells must be > 0");
    if (!(m.v_mp_v > 0.0 && m.v_mp_v < m.v_oc_v)) fail("requires 0 < v_mp < v_oc");
    if (!(m.i_mp_a > 0.0 && m.i_mp_a < m.i_sc_a)) fail("requires 0 < i_mp < i_sc");
    if (std::fabs(m.v_mp_v * m.i_mp_a - m.p_max_w) > 0.01 * m.p_max_w)
        fail("p_max inconsistent with v_mp * i_mp beyond 1%");
    if (!(m.tc_voc_pct_per_c < 0.0)) fail("tc_voc must be < 0");
    if (!(m.tc_isc_pct_per_c > 0.0)) fail("tc_isc must be > 0");
    if (!(m.tc_power_pct_per_c < 0.0)) fail("tc_power must be < 0");
    if (m.bifaciality < 0.0 || m.bifaciality > 1.0) fail("bifaciality out of range [0, 1]");
    if (m.efficiency <= 0.0 || m.efficiency >= 1.0) fail("efficiency out of range (0, 1)");
    if (m.length_m <= 0.0 || m.width_m <= 0.0) fail("dimensions must be > 0");
}

inline nlohmann::ordered_json to_json(const ModuleSpec& m) {
    return {{"name", m.name},
            {"p_max", m.p_max_w},
            {"n_cells", m.n_cells},
            {"v_mp", m.v_mp_v},
            {"i_mp", m.i_mp_a},
            {"v_oc", m.v_oc_v},
            {"i_sc", m.i_sc_a},
            {"efficiency", m.efficiency},
            {"tc_voc", m.tc_voc_pct_per_c},
            {"tc_isc", m.tc_isc_pct_per_c},
            {"tc_power", m.tc_power_pct_per_c},
            {"bifaciality", m.bifaciality},
            {"length", m.length_m},
            {"width", m.width_m}};
}

inline ModuleSpec module_from_json(const nlohmann::json& j) {
    ModuleSpec m;
    try {
        m.name = j.value("name", std::string());
        m.p_max_w = j.at("p_max").get<double>();
        m.n_cells = j.at("n_cells").get<int>();
        m.v_mp_v = j.at("v_mp").get<double>();
        m.i_mp_a = j.at("i_mp").get<double>();
        m.v_oc_v = j.at("v_oc").get<double>();
        m.i_sc_a = j.at("i_sc").get<double>();
        m.efficiency = j.at("efficiency").get<double>();
        m.tc_voc_pct_per_c = j.at("tc_voc").get<double>();
        m.tc_isc_pct_per_c = j.at("tc_isc").get<double>();
        m.tc_power_pct_per_c = j.at("tc_power").get<double>();
        m.bifaciality = j.value("bifaciality", 0.0);
        m.length_m = j.value("length", 2.0);
        m.width_m = j.value("width", 1.0);
    } catch (const nlohmann::json::exception& e) {
        throw InputError(std::string("module spec json: ") + e.what());
    }
    validate(m);
    return m;
}

inline ModuleSpec load_module_json(const std::string& path) {
    std::ifstream f(path);
    if (!f) throw InputError("module spec: cannot open '" + path + "'");
    nlohmann::json j;
    try {
        f >> j;
    } catch (const nlohmann::json::exception& e) {
        throw InputError("module spec '" + path + "': " + e.what());
    }
    return module_from_json(j);
}

// --- bifaciality -------------------------------------------------------------

struct FaceRatings {
    double p_max_w = 0.0;
    double v_oc_v = 0.0;
    double i_sc_a = 0.0;
};

struct BifacialityFactors {
    double phi_pmax = 0.0;
    double phi_voc = 0.0;
    double phi_isc = 0.0;
    bool rear_exceeds_front = false;  // physically unusual, flagged not rejected
};

inline BifacialityFactors bifaciality_factors(const FaceRatings& front,
                                              const FaceRatings& rear) {
    if (front.p_max_w <= 0.0 || front.v_oc_v <= 0.0 || front.i_sc_a <= 0.0)
        throw InputError("bifaciality_factors: front ratings must be > 0");
    BifacialityFactors f;
    f.phi_pmax = rear.p_max_w / front.p_max_w;
    f.phi_voc = rear.v_oc_v / front.v_oc_v;
    f.phi_isc = rear.i_sc_a / front.i_sc_a;
    f.rear_exceeds_front = f.phi_pmax > 1.0 || f.phi_voc > 1.0 || f.phi_isc > 1.0;
    return f;
}

// --- thermal -----------------------------------------------------------------

struct ThermalParams {
    double alpha_front = 0.9;   // absorptance, (0, 1]
    double alpha_rear = 0.9;
    double u_value = 28.8;      // W/(m2 K)
};

inline void validate(const ThermalParams& t) {
    if (!(t.alpha_front > 0.0 && t.alpha_front <= 1.0))
        throw InputError("thermal params: alpha_front out of range (0, 1]");
    if (!(t.alpha_rear > 0.0 && t.alpha_rear <= 1.0))
        throw InputError("thermal params: alpha_rear out of range (0, 1]");
    if (!(t.u_value > 0.0)) throw InputError("thermal params: u_value must be > 0");
}

// Defaults calibrated so NOCT-like conditions (800 W/m2, 20 C) give about
// 45 C for glass-backsheet and 47 C for glass-glass construction.
inline ThermalParams default_thermal(bool bifacial) {
    return bifacial ? ThermalParams{0.9, 0.9, 26.2} : ThermalParams{0.9, 0.9, 28.8};
}

// Heat balance: T_m = T_a + (alpha_f G_f + alpha_r G_r) / U.
inline double cell_temperature(double t_ambient_c, double g_front, double g_rear,
                               const ThermalParams& thermal) {
    validate(thermal);
    return t_ambient_c +
           (thermal.alpha_front * g_front + thermal.alpha_rear * g_rear) / thermal.u_value;
}

// --- single-diode model --------------------------------------------------

inline constexpr double kBoltzmannEv = 8.617333262e-5;  // eV/K
inline constexpr double kTRefK = 298.15;

struct SingleDiodeParams {
    double i_ph_f = 0.0;      // front photocurrent at 1000 W/m2, 25 C (A)
    double i_ph_r = 0.0;      // rear photocurrent at 1000 W/m2 rear illumination (A)
    double i_0 = 0.0;         // diode saturation current at 25 C (A)
    double n_ideality = 0.0;  // per-cell diode factor
    double r_s = 0.0;         // ohm
    double r_sh = 0.0;        // ohm
    int n_cells = 72;
    double tc_isc_frac_per_c = 0.0;  // photocurrent temperature slope
    bool beta_matched = false;       // dVoc/dT condition met exactly
    double beta_model_v_per_c = 0.0; // achieved dVoc/dT

    // module-level diode voltage scale a = n Ns k T / q
    double a_ref() const { return n_ideality * n_cells * kBoltzmannEv * kTRefK; }
};

struct MppPoint {
    double v_mp = 0.0;
    double i_mp = 0.0;
    double p_mp = 0.0;
};

namespace diode_detail {

inline double band_gap_ev(double t_k) { return 1.121 * (1.0 - 0.0002677 * (t_k - kTRefK)); }

inline double i0_at(double i0_ref, double t_k) {
    const double e = band_gap_ev(kTRefK) / (kBoltzmannEv * kTRefK) -
                     band_gap_ev(t_k) / (kBoltzmannEv * t_k);
    return i0_ref * std::pow(t_k / kTRefK, 3.0) * std::exp(e);
}

// Open-circuit voltage: iph - i0 expm1(v/a) - v/rsh = 0 (r_s drops at I = 0).
inline double open_circuit_voltage(double iph, double i0, double a, double rsh) {
    if (iph <= 0.0) return 0.0;
    double v = a * std::log1p(iph / i0);
    for (int i = 0; i < 200; ++i) {
        const double f = iph - i0 * std::expm1(v / a) - v / rsh;
        const double df = -i0 * std::exp(v / a) / a - 1.0 / rsh;
        const double step = f / df;
        v -= step;
        if (std::fabs(step) < 1e-14 * std::max(1.0, v)) break;
    }
    return v;
}

// Terminal current at voltage v; f(I) is strictly decreasing, so Newton with
// a bisection safeguard always lands on the unique root.
inline double cell_current(double v, double iph, double i0, double a, double rs,
                           double rsh, double i_guess) {
    auto f = [&](double i) {
        const double vd = v + i * rs;
        return iph - i0 * std::expm1(vd / a) - vd / rsh - i;
    };
    double lo = -iph - 1.0, hi = iph + 1.0;
    while (f(lo) < 0.0) lo = lo * 2.0 - 1.0;
    while (f(hi) > 0.0) hi = hi * 2.0 + 1.0;
    double i = std::clamp(i_guess, lo, hi);
    for (int it = 0; it < 200; ++it) {
        const double vd = v + i * rs;
        const double e = std::expm1(vd / a);
        const double fi = iph - i0 * e - vd / rsh - i;
        if (fi > 0.0) lo = i; else hi = i;
        const double dfi = -i0 * (e + 1.0) * rs / a - rs / rsh - 1.0;
        double next = i - fi / dfi;
        if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
        if (std::fabs(next - i) < 1e-14 * std::max(1.0, std::fabs(i))) return next;
        i = next;
    }
    return i;
}

struct OperatingPoint {
    double iph, i0, a;
};

inline OperatingPoint translate(const SingleDiodeParams& p, double g_front, double g_rear,
                                double phi_isc, double t_cell_c) {
    const double t_k = t_cell_c + 273.15;
    const double suns = g_front / 1000.0 + phi_isc * g_rear / 1000.0;
    OperatingPoint op;
    op.iph = suns * p.i_ph_f * (1.0 + p.tc_isc_frac_per_c * (t_cell_c - 25.0));
    op.i0 = i0_at(p.i_0, t_k);
    op.a = p.a_ref() * t_k / kTRefK;
    return op;
}

}  // namespace diode_detail

// IV curve sampled on n_points voltages in [0, Voc(g, T)].
struct IvPoint {
    double v = 0.0;
    double i = 0.0;
};

inline std::vector<IvPoint> iv_curve(const SingleDiodeParams& p, double g_front,
                                     double g_rear, double phi_isc, double t_cell_c,
                                     int n_points) {
    if (n_points < 2) throw InputError("iv_curve: need at least 2 points");
    if (t_cell_c < -40.0 || t_cell_c > 100.0)
        throw InputError("iv_curve: cell temperature out of range [-40, 100] C");
    if (g_front < 0.0 || g_rear < 0.0)
        throw InputError("iv_curve: irradiance must be >= 0");
    const auto op = diode_detail::translate(p, g_front, g_rear, phi_isc, t_cell_c);
    const double voc = diode_detail::open_circuit_voltage(op.iph, op.i0, op.a, p.r_sh);
    const double v_hi = voc > 0.0 ? voc : p.a_ref();  // dark curve: sample up to ~a
    std::vector<IvPoint> pts;
    pts.reserve(static_cast<std::size_t>(n_points));
    double guess = op.iph;
    for (int k = 0; k < n_points; ++k) {
        const double v = v_hi * k / (n_points - 1);
        guess = diode_detail::cell_current(v, op.iph, op.i0, op.a, p.r_s, p.r_sh, guess);
        pts.push_back({v, guess});
    }
    return pts;
}

// Maximum power point by golden-section search on [0, Voc]; P(V) is unimodal.
inline MppPoint mpp(const SingleDiodeParams& p, double g_front, double g_rear,
                    double phi_isc, double t_cell_c) {
    if (t_cell_c < -40.0 || t_cell_c > 100.0)
        throw InputError("mpp: cell temperature out of range [-40, 100] C");
    const auto op = diode_detail::translate(p, g_front, g_rear, phi_isc, t_cell_c);
    if (op.iph <= 0.0) return {0.0, 0.0, 0.0};
    const double voc = diode_detail::open_circuit_voltage(op.iph, op.i0, op.a, p.r_sh);
    if (voc <= 0.0) return {0.0, 0.0, 0.0};

    double guess = op.iph;
    auto power = [&](double v) {
        guess = diode_detail::cell_current(v, op.iph, op.i0, op.a, p.r_s, p.r_sh, guess);
        return v * guess;
    };
    constexpr double kGolden = 0.6180339887498949;
    double lo = 0.0, hi = voc;
    double x1 = hi - kGolden * (hi - lo), x2 = lo + kGolden * (hi - lo);
    double f1 = power(x1), f2 = power(x2);
    for (int it = 0; it < 200 && (hi - lo) > 1e-11 * voc; ++it) {
        if (f1 < f2) {
            lo = x1; x1 = x2; f1 = f2;
            x2 = lo + kGolden * (hi - lo); f2 = power(x2);
        } else {
            hi = x2; x2 = x1; f2 = f1;
            x1 = hi - kGolden * (hi - lo); f1 = power(x1);
        }
    }
    MppPoint m;
    m.v_mp = 0.5 * (lo + hi);
    m.p_mp = power(m.v_mp);
    m.i_mp = m.v_mp > 0.0 ? m.p_mp / m.v_mp : 0.0;
    return m;
}

namespace diode_detail {

// dVoc/dT of the translated model, central difference.
inline double model_beta(const SingleDiodeParams& p) {
    const double dt = 0.5;
    double v[2];
    for (int k = 0; k < 2; ++k) {
        const double tc = 25.0 + (k == 0 ? -dt : dt);
        const auto op = translate(p, 1000.0, 0.0, 0.0, tc);
        v[k] = open_circuit_voltage(op.iph, op.i0, op.a, p.r_sh);
    }
    return (v[1] - v[0]) / (2.0 * dt);
}

struct InnerResult {
    double r_s, r_sh, i_0, i_ph;
    bool converged;
};

// For a fixed diode scale a, (I0, Iph) follow from the Isc and Voc anchors;
// damped Newton drives (Rs, Rsh) onto the MPP current and zero-derivative
// conditions.
inline InnerResult solve_anchor_system(const ModuleSpec& m, double a) {
    const double isc = m.i_sc_a, voc = m.v_oc_v, vmp = m.v_mp_v, imp = m.i_mp_a;
    const double rs_cap = 2.0 * (voc - vmp) / imp;

    auto eliminate = [&](double rs, double rsh, double& i0, double& iph) {
        i0 = (isc * (1.0 + rs / rsh) - voc / rsh) /
             (std::expm1(voc / a) - std::expm1(isc * rs / a));
        iph = i0 * std::expm1(voc / a) + voc / rsh;
    };
    auto residual = [&](double rs, double rsh, double& i0, double& iph, double r[2]) {
        eliminate(rs, rsh, i0, iph);
        const double vdm = vmp + imp * rs;
        const double em = std::expm1(vdm / a);
        r[0] = (iph - i0 * em - vdm / rsh - imp) / isc;
        const double g = i0 * (em + 1.0) / a + 1.0 / rsh;
        r[1] = (imp + vmp * (-g / (1.0 + rs * g))) / (vmp * imp);
    };

    double x0 = 0.5 * (voc - vmp) / imp;              // Rs seed: Voc-slope heuristic
    double x1 = std::log(5.0 * vmp / (isc - imp));    // ln Rsh seed: Isc-slope heuristic
    double i0 = 0.0, iph = 0.0, r[2];
    residual(x0, std::exp(x1), i0, iph, r);
    double nr = std::hypot(r[0], r[1]);
    for (int it = 0; it < 200; ++it) {
        if (nr < 1e-12) return {x0, std::exp(x1), i0, iph, true};
        // finite-difference Jacobian
        double J[2][2], rp[2], ti0, tiph;
        const double h0 = 1e-7 * std::max(0.01, std::fabs(x0));
        residual(x0 + h0, std::exp(x1), ti0, tiph, rp);
        J[0][0] = (rp[0] - r[0]) / h0;
        J[1][0] = (rp[1] - r[1]) / h0;
        const double h1 = 1e-7 * std::max(0.01, std::fabs(x1));
        residual(x0, std::exp(x1 + h1), ti0, tiph, rp);
        J[0][1] = (rp[0] - r[0]) / h1;
        J[1][1] = (rp[1] - r[1]) / h1;
        const double det = J[0][0] * J[1][1] - J[0][1] * J[1][0];
        if (std::fabs(det) < 1e-30) break;
        double dx0 = (-r[0] * J[1][1] + r[1] * J[0][1]) / det;
        double dx1 = (-r[1] * J[0][0] + r[0] * J[1][0]) / det;
        dx0 = std::clamp(dx0, -0.2, 0.2);
        dx1 = std::clamp(dx1, -1.5, 1.5);
        double lambda = 1.0;
        bool improved = false;
        for (int ls = 0; ls < 30; ++ls) {
            const double n0 = x0 + lambda * dx0, n1 = x1 + lambda * dx1;
            if (n0 >= 0.0 && n0 <= rs_cap && n1 > 0.0 && n1 < std::log(1e7)) {
                double rn[2];
                residual(n0, std::exp(n1), ti0, tiph, rn);
                const double nn = std::hypot(rn[0], rn[1]);
                if (nn < nr) {
                    x0 = n0; x1 = n1;
                    r[0] = rn[0]; r[1] = rn[1];
                    i0 = ti0; iph = tiph;
                    nr = nn;
                    improved = true;
                    break;
                }
            }
            lambda *= 0.5;
        }
        if (!improved) break;
    }
    return {x0, std::exp(x1), i0, iph, nr < 1e-9};
}

}  // namespace diode_detail

// Extracts the five diode parameters from datasheet values. Conditions: the
// four STC anchors (Isc, Voc, MPP location, zero power slope at MPP) plus
// dVoc/dT equal to the datasheet beta. The beta condition is dropped to the
// nearest attainable value when the anchor geometry cannot reach it (flagged
// on the result); the anchors are never compromised.
inline SingleDiodeParams extract_single_diode(const ModuleSpec& m) {
    validate(m);
    const double beta_target = m.tc_voc_pct_per_c / 100.0 * m.v_oc_v;  // V/degC
    const double a_unit = m.n_cells * kBoltzmannEv * kTRefK;

    auto assemble = [&](double n, const diode_detail::InnerResult& in) {
        SingleDiodeParams p;
        p.i_ph_f = in.i_ph;
        p.i_ph_r = m.bifaciality * in.i_ph;
        p.i_0 = in.i_0;
        p.n_ideality = n;
        p.r_s = in.r_s;
        p.r_sh = in.r_sh;
        p.n_cells = m.n_cells;
        p.tc_isc_frac_per_c = m.tc_isc_pct_per_c / 100.0;
        p.beta_model_v_per_c = diode_detail::model_beta(p);
        p.beta_matched = std::fabs(p.beta_model_v_per_c - beta_target) <
                         1e-6 * std::fabs(beta_target);
        return p;
    };
    auto beta_gap = [&](double n) -> std::optional<std::pair<double, diode_detail::InnerResult>> {
        const auto in = diode_detail::solve_anchor_system(m, n * a_unit);
        if (!in.converged) return std::nullopt;
        SingleDiodeParams p = assemble(n, in);
        return std::make_pair(p.beta_model_v_per_c - beta_target, in);
    };

    // deterministic scan, then bisection on the bracketed beta root
    constexpr double kNLo = 0.35, kNHi = 2.50;
    constexpr int kGrid = 44;
    double best_n = 0.0, best_gap = 0.0;
    diode_detail::InnerResult best{};
    bool have_any = false;
    double prev_n = 0.0, prev_gap = 0.0;
    bool have_prev = false, bracketed = false;
    double lo = 0.0, hi = 0.0, gap_lo = 0.0;
    for (int k = 0; k <= kGrid; ++k) {
        const double n = kNLo + (kNHi - kNLo) * k / kGrid;
        const auto bg = beta_gap(n);
        if (!bg) { have_prev = false; continue; }
        if (!have_any || std::fabs(bg->first) < std::fabs(best_gap)) {
            best_n = n; best_gap = bg->first; best = bg->second; have_any = true;
        }
        if (have_prev && prev_gap * bg->first <= 0.0 && !bracketed) {
            lo = prev_n; hi = n; gap_lo = prev_gap; bracketed = true;
        }
        prev_n = n; prev_gap = bg->first; have_prev = true;
    }
    if (!have_any)
        throw ComputationError("single-diode extraction: no feasible parameters for '" +
                               m.name + "'");
    if (bracketed) {
        for (int it = 0; it < 80 && hi - lo > 1e-13; ++it) {
            const double mid = 0.5 * (lo + hi);
            const auto bg = beta_gap(mid);
            if (!bg) break;
            best_n = mid; best_gap = bg->first; best = bg->second;
            if (std::fabs(bg->first) < 1e-12) break;
            if (gap_lo * bg->first <= 0.0) hi = mid;
            else { lo = mid; gap_lo = bg->first; }
        }
    }
    SingleDiodeParams p = assemble(best_n, best);

    // verify the datasheet anchors before handing the parameters out
    const auto stc = mpp(p, 1000.0, 0.0, 0.0, 25.0);
    const double isc_model =
        diode_detail::cell_current(0.0, p.i_ph_f, p.i_0, p.a_ref(), p.r_s, p.r_sh, p.i_ph_f);
    const double voc_model =
        diode_detail::open_circuit_voltage(p.i_ph_f, p.i_0, p.a_ref(), p.r_sh);
    auto rel = [](double a, double b) { return std::fabs(a - b) / std::fabs(b); };
    if (rel(isc_model, m.i_sc_a) > 0.005 || rel(voc_model, m.v_oc_v) > 0.005 ||
        rel(stc.v_mp, m.v_mp_v) > 0.005 || rel(stc.i_mp, m.i_mp_a) > 0.005)
        throw ComputationError(
            "single-diode extraction: residuals exceed 0.5% for '" + m.name +
            "' (Isc " + std::to_string(isc_model) + ", Voc " + std::to_string(voc_model) +
            ", Vmp " + std::to_string(stc.v_mp) + ", Imp " + std::to_string(stc.i_mp) + ")");
    return p;
}

inline void validate(const SingleDiodeParams& p) {
    if (!(p.i_ph_f > 0.0 && p.i_0 > 0.0 && p.n_ideality > 0.0 && p.r_s > 0.0 &&
          p.r_sh > 0.0))
        throw InputError("single-diode params: all parameters must be positive");
    if (p.r_sh / p.r_s <= 10.0)
        throw InputError("single-diode params: r_sh must exceed 10 r_s");
}

// Nameplate power at bifacial test conditions (1000 W/m2 front + 135 W/m2
// rear), 25 C cell.
inline double bstc_rating(const ModuleSpec& m, const SingleDiodeParams& p) {
    if (!m.is_bifacial())
        throw InputError("bstc_rating: module '" + m.name + "' is monofacial");
    return mpp(p, 1000.0, 135.0, m.bifaciality, 25.0).p_mp;
}

// Temperature-corrected linear power: P = Pmax (G_E/1000)(1 + gamma dT).
// The plant-scale default engine; the diode model is the verification path.
inline double simple_power(const ModuleSpec& m, double g_equivalent, double t_cell_c) {
    if (g_equivalent < 0.0) throw InputError("simple_power: irradiance must be >= 0");
    const double gamma = m.tc_power_pct_per_c / 100.0;
    const double p = m.p_max_w * (g_equivalent / 1000.0) * (1.0 + gamma * (t_cell_c - 25.0));
    return std::max(p, 0.0);
}

}  // namespace vbpv
