#pragma once

#include <cstdint>
#include <cstdio>
#include <fstream>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include <json.hpp>

#include "twpa/circuit.hpp"
#include "twpa/errors.hpp"
#include "twpa/lossmodel.hpp"

namespace twpa {

using json = nlohmann::json;

namespace detail {

inline void require_keys(const json& obj, const std::string& where,
                         const std::set<std::string>& allowed) {
    if (!obj.is_object()) throw ConfigError(where + ": expected an object");
    for (auto it = obj.begin(); it != obj.end(); ++it)
        if (!allowed.count(it.key()))
            throw ConfigError(where + ": unknown key '" + it.key() + "'");
}

template <class T>
T get_req(const json& obj, const std::string& where, const std::string& key) {
    if (!obj.contains(key)) throw ConfigError(where + ": missing key '" + key + "'");
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": bad value for '" + key + "'");
    }
}

template <class T>
T get_opt(const json& obj, const std::string& where, const std::string& key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception&) {
        throw ConfigError(where + ": bad value for '" + key + "'");
    }
}

} // namespace detail

/// Full workbench configuration. All config frequencies are ordinary GHz,
/// capacitances fF/pF, currents uA and powers nW; conversion to SI happens
/// here and nowhere else.
struct WorkbenchConfig {
    CircuitParams circuit;

    struct Pumps {
        double p1_nw = 0.0;
        double p2_nw = 0.0;
        double c_p1 = 0.0; // 1/W
        double c_p2 = 0.0;
        double loss_db_total = 0.0; // shared by both pumps
    } pumps;

    LossProfile loss;

    struct Simulation {
        int ladder_depth = 0;
        double rel_tol = 1e-10;
        double abs_tol = 1e-12;
        std::string sweep_param = "p2_nw"; // or f_signal_ghz
        double sweep_start = 0.0;
        double sweep_stop = 0.0;
        int sweep_points = 0;
        double f_signal_ghz = 0.0; // 0 = center between the pumps
    } simulation;

    struct Analysis {
        double eta_meas = 1.0;
        double n_bar = 1.4e-4;
        double phi_grid_deg = 1.0;
        double nu = 0.0; // 0 = derive from the vacuum cells
        double frequency_ghz = 0.0;
    } analysis;

    struct Paths {
        std::string dataset;
        std::string sntj_csv;
        std::string wqed_csv;
        std::string wqed_reference_csv;
    } paths;

    std::string config_hash;

    double pump_gamma_per_cell() const {
        return gamma_per_cell_from_db(pumps.loss_db_total, circuit.n_cells);
    }
};

inline uint64_t fnv1a_hash(const std::string& text) {
    uint64_t h = 1469598103934665603ull;
    for (unsigned char c : text) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

inline std::string config_hash_hex(const json& j) {
    // nlohmann dump sorts object keys, so this is canonical.
    const uint64_t h = fnv1a_hash(j.dump());
    char buf[17];
    std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
    return buf;
}

inline WorkbenchConfig parse_config(const json& j) {
    using detail::get_opt;
    using detail::get_req;
    detail::require_keys(j, "config",
                         {"circuit", "pumps", "loss", "simulation", "analysis", "paths"});

    WorkbenchConfig cfg;
    cfg.config_hash = config_hash_hex(j);

    const json& cj = j.contains("circuit") ? j.at("circuit") : json::object();
    detail::require_keys(cj, "circuit",
                         {"n_cells", "c_ground_ff", "i_critical_ua", "c_junction_ff",
                          "tan_delta", "resonators", "pump_freqs_ghz"});
    cfg.circuit.n_cells = get_req<double>(cj, "circuit", "n_cells");
    cfg.circuit.c_ground = get_req<double>(cj, "circuit", "c_ground_ff") * 1e-15;
    cfg.circuit.i_critical = get_req<double>(cj, "circuit", "i_critical_ua") * 1e-6;
    cfg.circuit.c_junction = get_opt<double>(cj, "circuit", "c_junction_ff", 0.0) * 1e-15;
    cfg.circuit.tan_delta = get_opt<double>(cj, "circuit", "tan_delta", 0.0);
    if (cj.contains("resonators")) {
        for (const auto& rj : cj.at("resonators")) {
            detail::require_keys(rj, "resonator",
                                 {"f_res_ghz", "c_res_pf", "c_couple_ff", "insertion_period"});
            ResonatorBank r;
            r.f_res = get_req<double>(rj, "resonator", "f_res_ghz") * 1e9;
            r.c_res = get_req<double>(rj, "resonator", "c_res_pf") * 1e-12;
            r.c_couple = get_req<double>(rj, "resonator", "c_couple_ff") * 1e-15;
            r.insertion_period = get_opt<double>(rj, "resonator", "insertion_period", 10.0);
            cfg.circuit.resonators.push_back(r);
        }
    }
    const auto pf = get_req<std::vector<double>>(cj, "circuit", "pump_freqs_ghz");
    if (pf.size() != 2) throw ConfigError("circuit: pump_freqs_ghz needs two entries");
    cfg.circuit.pump_freqs = {pf[0] * 1e9, pf[1] * 1e9};
    cfg.circuit.validate();

    if (j.contains("pumps")) {
        const json& pj = j.at("pumps");
        detail::require_keys(pj, "pumps",
                             {"p1_nw", "p2_nw", "c_p1_per_w", "c_p2_per_w", "loss_db_total"});
        cfg.pumps.p1_nw = get_opt<double>(pj, "pumps", "p1_nw", 0.0);
        cfg.pumps.p2_nw = get_opt<double>(pj, "pumps", "p2_nw", 0.0);
        cfg.pumps.c_p1 = get_opt<double>(pj, "pumps", "c_p1_per_w", 0.0);
        cfg.pumps.c_p2 = get_opt<double>(pj, "pumps", "c_p2_per_w", 0.0);
        cfg.pumps.loss_db_total = get_opt<double>(pj, "pumps", "loss_db_total", 0.0);
    }

    if (j.contains("loss")) {
        const json& lj = j.at("loss");
        detail::require_keys(lj, "loss",
                             {"kind", "total_db", "table", "fridge_temp_k",
                              "n_thermal_floor", "strict_range"});
        const std::string kind = get_opt<std::string>(lj, "loss", "kind", "constant");
        const double total = get_opt<double>(lj, "loss", "total_db", 0.0);
        if (kind == "constant" || kind == "lossless")
            cfg.loss = LossProfile::constant(kind == "lossless" ? 0.0 : total);
        else if (kind == "distributed")
            cfg.loss = LossProfile::distributed(total);
        else if (kind == "lumped_end")
            cfg.loss = LossProfile::lumped_at_end(total);
        else if (kind == "saturable") {
            std::vector<LossTablePoint> table;
            if (lj.contains("table")) {
                for (const auto& tj : lj.at("table")) {
                    detail::require_keys(tj, "loss.table", {"temp_k", "loss_db_total"});
                    table.push_back(LossTablePoint{
                        get_req<double>(tj, "loss.table", "temp_k"),
                        get_req<double>(tj, "loss.table", "loss_db_total")});
                }
            } else {
                table = LossProfile::default_saturation_table();
            }
            const double fridge = get_opt<double>(lj, "loss", "fridge_temp_k", 0.030);
            const double fc =
                0.5 * (cfg.circuit.pump_freqs[0] + cfg.circuit.pump_freqs[1]);
            const double floor_default = bose_einstein_occupation(fridge, fc);
            cfg.loss = LossProfile::saturable(
                table, get_opt<double>(lj, "loss", "n_thermal_floor", floor_default));
            cfg.loss.strict_range = get_opt<bool>(lj, "loss", "strict_range", false);
        } else {
            throw ConfigError("loss: unknown kind '" + kind + "'");
        }
    }

    if (j.contains("simulation")) {
        const json& sj = j.at("simulation");
        detail::require_keys(sj, "simulation",
                             {"ladder_depth", "rel_tol", "abs_tol", "sweep_param",
                              "sweep_start", "sweep_stop", "sweep_points", "f_signal_ghz"});
        cfg.simulation.ladder_depth = get_opt<int>(sj, "simulation", "ladder_depth", 0);
        cfg.simulation.rel_tol = get_opt<double>(sj, "simulation", "rel_tol", 1e-10);
        cfg.simulation.abs_tol = get_opt<double>(sj, "simulation", "abs_tol", 1e-12);
        cfg.simulation.sweep_param =
            get_opt<std::string>(sj, "simulation", "sweep_param", "p2_nw");
        cfg.simulation.sweep_start = get_opt<double>(sj, "simulation", "sweep_start", 0.0);
        cfg.simulation.sweep_stop = get_opt<double>(sj, "simulation", "sweep_stop", 0.0);
        cfg.simulation.sweep_points = get_opt<int>(sj, "simulation", "sweep_points", 0);
        cfg.simulation.f_signal_ghz = get_opt<double>(sj, "simulation", "f_signal_ghz", 0.0);
        if (cfg.simulation.sweep_param != "p2_nw" &&
            cfg.simulation.sweep_param != "f_signal_ghz")
            throw ConfigError("simulation: sweep_param must be p2_nw or f_signal_ghz");
    }

    if (j.contains("analysis")) {
        const json& aj = j.at("analysis");
        detail::require_keys(aj, "analysis",
                             {"eta_meas", "n_bar", "phi_grid_deg", "nu", "frequency_ghz"});
        cfg.analysis.eta_meas = get_opt<double>(aj, "analysis", "eta_meas", 1.0);
        cfg.analysis.n_bar = get_opt<double>(aj, "analysis", "n_bar", 1.4e-4);
        cfg.analysis.phi_grid_deg = get_opt<double>(aj, "analysis", "phi_grid_deg", 1.0);
        cfg.analysis.nu = get_opt<double>(aj, "analysis", "nu", 0.0);
        cfg.analysis.frequency_ghz = get_opt<double>(aj, "analysis", "frequency_ghz", 0.0);
    }

    if (j.contains("paths")) {
        const json& pj = j.at("paths");
        detail::require_keys(pj, "paths",
                             {"dataset", "sntj_csv", "wqed_csv", "wqed_reference_csv"});
        cfg.paths.dataset = get_opt<std::string>(pj, "paths", "dataset", "");
        cfg.paths.sntj_csv = get_opt<std::string>(pj, "paths", "sntj_csv", "");
        cfg.paths.wqed_csv = get_opt<std::string>(pj, "paths", "wqed_csv", "");
        cfg.paths.wqed_reference_csv =
            get_opt<std::string>(pj, "paths", "wqed_reference_csv", "");
    }

    return cfg;
}

inline WorkbenchConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config " + path);
    json j;
    try {
        in >> j;
    } catch (const json::exception& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

} // namespace twpa
