// Workbench CLI: dispersion, phase matching, gain, squeezing and the
// measurement-analysis / noise-calibration pipelines, driven by a single
// JSON config. Every report embeds the config hash; reruns with the same
// config and inputs are bit-identical.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "twpa/analysis.hpp"
#include "twpa/calibration.hpp"
#include "twpa/circuit.hpp"
#include "twpa/config.hpp"
#include "twpa/csv.hpp"
#include "twpa/lossmodel.hpp"
#include "twpa/modeladder.hpp"
#include "twpa/phasematch.hpp"
#include "twpa/pump.hpp"
#include "twpa/solver.hpp"
#include "twpa/synthetic.hpp"

namespace fs = std::filesystem;
using twpa::json;

namespace {

int log_level() {
    const char* env = std::getenv("WORKBENCH_LOG");
    if (!env) return 1;
    const std::string v = env;
    if (v == "quiet" || v == "0") return 0;
    if (v == "debug" || v == "2") return 2;
    return 1;
}

void log_info(const std::string& msg) {
    if (log_level() >= 1) std::cerr << "[workbench] " << msg << "\n";
}

struct Context {
    twpa::WorkbenchConfig cfg;
    fs::path out_dir;
    std::string format = "csv";
    int threads = 1;
    std::uint64_t seed = 1;

    fs::path out(const std::string& name) const { return out_dir / name; }

    void write_json(const std::string& name, json j) const {
        j["schema_version"] = 1;
        j["config_hash"] = cfg.config_hash;
        std::ofstream f(out(name));
        if (!f) throw twpa::Error("cannot write " + out(name).string());
        f << j.dump(2) << "\n";
        log_info("wrote " + out(name).string());
    }
};

std::pair<twpa::PumpState, twpa::PumpState> pumps_from_config(
    const twpa::WorkbenchConfig& cfg) {
    const auto& c = cfg.circuit;
    twpa::PumpState p1, p2;
    p1.freq = c.pump_freqs[0];
    p2.freq = c.pump_freqs[1];
    p1.k = twpa::wavevector(p1.freq, c, 0.0).real();
    p2.k = twpa::wavevector(p2.freq, c, 0.0).real();
    p1.gamma = cfg.pump_gamma_per_cell();
    p2.gamma = cfg.pump_gamma_per_cell();
    p1.c_p = cfg.pumps.c_p1;
    p2.c_p = cfg.pumps.c_p2;
    if (cfg.pumps.p1_nw > 0.0) {
        p1.beta0 = std::sqrt(twpa::calibrate_beta_from_power(
            cfg.pumps.p1_nw * 1e-9, p1.gamma, p1.k, c.n_cells, cfg.pumps.c_p1));
    }
    if (cfg.pumps.p2_nw > 0.0) {
        p2.beta0 = std::sqrt(twpa::calibrate_beta_from_power(
            cfg.pumps.p2_nw * 1e-9, p2.gamma, p2.k, c.n_cells, cfg.pumps.c_p2));
    }
    return {p1, p2};
}

double signal_freq(const twpa::WorkbenchConfig& cfg) {
    if (cfg.simulation.f_signal_ghz > 0.0) return cfg.simulation.f_signal_ghz * 1e9;
    return 0.5 * (cfg.circuit.pump_freqs[0] + cfg.circuit.pump_freqs[1]);
}

// ---------------------------------------------------------------------------

void cmd_dispersion(const Context& ctx, double fmin_ghz, double fmax_ghz,
                    double step_mhz) {
    std::ofstream out(ctx.out("dispersion.csv"));
    if (!out) throw twpa::Error("cannot write dispersion.csv");
    out << "frequency_ghz,k_real_rad_per_cell,k_imag_rad_per_cell,loss_db_total\n";
    out.precision(10);
    for (double f = fmin_ghz * 1e9; f <= fmax_ghz * 1e9 + 1.0; f += step_mhz * 1e6) {
        out << f * 1e-9 << ',';
        try {
            const auto k = twpa::wavevector(f, ctx.cfg.circuit);
            const auto loss = twpa::insertion_loss_db(f, ctx.cfg.circuit);
            out << k.real() << ',' << k.imag() << ',' << loss.total_db << '\n';
        } catch (const twpa::StopbandError&) {
            out << "nan,nan,nan\n";
        }
    }
    log_info("wrote " + ctx.out("dispersion.csv").string());
}

void cmd_phasematch(const Context& ctx, double fmin_ghz, double fmax_ghz,
                    double step_mhz) {
    const auto [p1, p2] = pumps_from_config(ctx.cfg);
    const twpa::PumpAmplitudes betas{p1.beta0, p2.beta0};
    std::ofstream out(ctx.out("phasematch.csv"));
    if (!out) throw twpa::Error("cannot write phasematch.csv");
    out << "f_signal_ghz,process,delta_k_rad_per_cell\n";
    out.precision(10);
    using PK = twpa::ProcessKind;
    for (double f = fmin_ghz * 1e9; f <= fmax_ghz * 1e9 + 1.0; f += step_mhz * 1e6) {
        for (PK kind : {PK::PA, PK::DFWM1, PK::DFWM2, PK::FC1, PK::FC2}) {
            try {
                const auto rep = twpa::delta_k(kind, f, betas, ctx.cfg.circuit);
                out << f * 1e-9 << ',' << twpa::to_string(kind) << ',' << rep.delta_k
                    << '\n';
            } catch (const twpa::Error&) {
                // participant in a stop band; row omitted
            }
        }
    }
    log_info("wrote " + ctx.out("phasematch.csv").string());
}

twpa::SweepConfig base_sweep_config(const Context& ctx) {
    twpa::SweepConfig sc;
    sc.circuit = ctx.cfg.circuit;
    sc.loss = ctx.cfg.loss;
    sc.p1_nw = ctx.cfg.pumps.p1_nw;
    sc.p2_nw = ctx.cfg.pumps.p2_nw;
    sc.f_signal_ghz = ctx.cfg.simulation.f_signal_ghz;
    sc.c_p1 = ctx.cfg.pumps.c_p1;
    sc.c_p2 = ctx.cfg.pumps.c_p2;
    sc.pump_gamma1 = ctx.cfg.pump_gamma_per_cell();
    sc.pump_gamma2 = ctx.cfg.pump_gamma_per_cell();
    sc.ladder_depth = ctx.cfg.simulation.ladder_depth;
    sc.rel_tol = ctx.cfg.simulation.rel_tol;
    sc.abs_tol = ctx.cfg.simulation.abs_tol;
    sc.threads = ctx.threads;
    return sc;
}

void write_sweep_outputs(const Context& ctx, const std::string& stem,
                         const std::vector<twpa::SweepPoint>& rows) {
    if (ctx.format == "csv") {
        std::ofstream out(ctx.out(stem + ".csv"));
        if (!out) throw twpa::Error("cannot write " + stem + ".csv");
        out << "p2_nw,f_signal_ghz,gain_db,squeeze_db,antisqueeze_db,purity,loss_model\n";
        out.precision(10);
        for (const auto& r : rows) {
            if (!r.error.empty()) {
                out << r.p2_nw << ',' << r.f_signal_ghz << ",nan,nan,nan,nan,"
                    << r.loss_model << '\n';
                continue;
            }
            out << r.p2_nw << ',' << r.f_signal_ghz << ',' << r.gain_db << ','
                << r.s_min_db << ',' << r.s_max_db << ',' << r.purity << ','
                << r.loss_model << '\n';
        }
        log_info("wrote " + ctx.out(stem + ".csv").string());
    }
    json rows_json = json::array();
    for (const auto& r : rows) {
        json rj{{"p2_nw", r.p2_nw},
                {"f_signal_ghz", r.f_signal_ghz},
                {"loss_model", r.loss_model}};
        if (r.error.empty()) {
            rj["gain_db"] = r.gain_db;
            rj["squeeze_db"] = r.s_min_db;
            rj["antisqueeze_db"] = r.s_max_db;
            rj["purity"] = r.purity;
        } else {
            rj["error"] = r.error;
        }
        rows_json.push_back(rj);
    }
    ctx.write_json(stem + ".json", json{{"rows", rows_json}});
}

void cmd_gain(const Context& ctx, double fmin_ghz, double fmax_ghz, double step_mhz) {
    twpa::SweepConfig sc = base_sweep_config(ctx);
    sc.param = twpa::SweepConfig::Param::SignalFreq;
    for (double f = fmin_ghz; f <= fmax_ghz + 1e-9; f += step_mhz * 1e-3)
        sc.values.push_back(f);
    write_sweep_outputs(ctx, "gain", twpa::sweep(sc));
}

void cmd_pser(const Context& ctx, int n_theta) {
    const auto [p1, p2] = pumps_from_config(ctx.cfg);
    const auto modes =
        twpa::build_modes(signal_freq(ctx.cfg), ctx.cfg.circuit.pump_freqs[0],
                          ctx.cfg.circuit.pump_freqs[1], ctx.cfg.simulation.ladder_depth);
    twpa::CoupledModeSystem system(ctx.cfg.circuit, modes, {p1, p2}, ctx.cfg.loss);
    twpa::SolveOptions opt;
    opt.rel_tol = ctx.cfg.simulation.rel_tol;
    opt.abs_tol = ctx.cfg.simulation.abs_tol;
    const auto psg = twpa::phase_sensitive_gain(system, n_theta, opt);

    std::ofstream out(ctx.out("pser.csv"));
    if (!out) throw twpa::Error("cannot write pser.csv");
    out << "theta_rad,gain_db\n";
    out.precision(10);
    for (std::size_t i = 0; i < psg.theta.size(); ++i)
        out << psg.theta[i] << ',' << psg.gain_db[i] << '\n';
    ctx.write_json("pser.json", json{{"pser_db", psg.pser_db},
                                     {"f_signal_ghz", signal_freq(ctx.cfg) * 1e-9}});
}

void cmd_squeeze(const Context& ctx) {
    const auto [p1, p2] = pumps_from_config(ctx.cfg);
    const double f_sig = signal_freq(ctx.cfg);
    const auto modes = twpa::build_modes(f_sig, ctx.cfg.circuit.pump_freqs[0],
                                         ctx.cfg.circuit.pump_freqs[1],
                                         ctx.cfg.simulation.ladder_depth);
    twpa::CoupledModeSystem system(ctx.cfg.circuit, modes, {p1, p2}, ctx.cfg.loss);
    twpa::SolveOptions opt;
    opt.rel_tol = ctx.cfg.simulation.rel_tol;
    opt.abs_tol = ctx.cfg.simulation.abs_tol;
    opt.fundamental = true;
    const auto sol = twpa::solve_moments(system, opt);
    const auto gain = twpa::mean_gain_from_propagator(sol.propagator, 1.0);
    const int partner = modes.pairings[0].sq[0][1];
    const auto sq = twpa::squeeze(sol.corr, 0, partner >= 0 ? partner : 0);

    ctx.write_json("squeeze.json",
                   json{{"f_signal_ghz", f_sig * 1e-9},
                        {"p1_nw", ctx.cfg.pumps.p1_nw},
                        {"p2_nw", ctx.cfg.pumps.p2_nw},
                        {"modes_ghz", [&] {
                             json a = json::array();
                             for (double f : modes.freqs) a.push_back(f * 1e-9);
                             return a;
                         }()},
                        {"gain_db", gain.gain_db},
                        {"theta_opt_rad", sq.theta_opt},
                        {"var_min_quanta", sq.var_min},
                        {"var_max_quanta", sq.var_max},
                        {"squeeze_db", sq.s_min_db},
                        {"antisqueeze_db", sq.s_max_db},
                        {"purity", sq.purity},
                        {"loss_model", twpa::to_string(ctx.cfg.loss.kind)}});
}

void cmd_sweep(const Context& ctx) {
    const auto& sim = ctx.cfg.simulation;
    if (sim.sweep_points <= 0)
        throw twpa::ConfigError("sweep: simulation.sweep_points must be > 0");
    twpa::SweepConfig sc = base_sweep_config(ctx);
    sc.param = sim.sweep_param == "p2_nw" ? twpa::SweepConfig::Param::Pump2Power
                                          : twpa::SweepConfig::Param::SignalFreq;
    for (int i = 0; i < sim.sweep_points; ++i) {
        const double t = sim.sweep_points == 1
                             ? 0.0
                             : static_cast<double>(i) / (sim.sweep_points - 1);
        sc.values.push_back(sim.sweep_start + t * (sim.sweep_stop - sim.sweep_start));
    }
    write_sweep_outputs(ctx, "sweep", twpa::sweep(sc));
}

json chain_stage_json(const twpa::VarianceEstimate& on, const twpa::VarianceEstimate& off,
                      const twpa::ChainModel& chain) {
    bool clamped_min = false, clamped_max = false;
    const double x_min = twpa::to_photon_basis(on.var_min, chain, on.stderr_min, &clamped_min);
    const double x_max = twpa::to_photon_basis(on.var_max, chain, on.stderr_max, &clamped_max);
    const double x_off = chain.photon_vacuum_variance();
    const double s_min_db = twpa::squeezing_db(x_min, x_off);
    const double s_max_db = twpa::squeezing_db(x_max, x_off);
    return json{
        {"sigma_min_off_mv", std::sqrt(off.var_min)},
        {"sigma_max_off_mv", std::sqrt(off.var_max)},
        {"sigma_min_sqz_mv", std::sqrt(on.var_min)},
        {"sigma_max_sqz_mv", std::sqrt(on.var_max)},
        {"var_sqz_min_mv2", on.var_min},
        {"var_sqz_max_mv2", on.var_max},
        {"var_off_mv2", 0.5 * (off.var_min + off.var_max)},
        {"x_sqz_min_quanta", chain.alpha * on.var_min},
        {"x_sqz_max_quanta", chain.alpha * on.var_max},
        {"x_off_quanta", chain.chain_vacuum_variance()},
        {"alpha_quanta_per_mv2", chain.alpha},
        {"eta_meas", chain.eta_meas},
        {"n_bar", chain.n_bar},
        {"big_x_sqz_min_quanta", x_min},
        {"big_x_sqz_max_quanta", x_max},
        {"big_x_off_quanta", x_off},
        {"squeeze_db", s_min_db},
        {"antisqueeze_db", s_max_db},
        {"purity", twpa::purity(x_min / x_off, x_max / x_off)},
        {"clamped", clamped_min || clamped_max},
    };
}

void cmd_analyze(const Context& ctx, const std::string& dataset_flag) {
    const std::string path =
        !dataset_flag.empty() ? dataset_flag : ctx.cfg.paths.dataset;
    if (path.empty()) throw twpa::ConfigError("analyze: no dataset path");
    const auto ds = twpa::read_quadrature_csv(path);
    const double eta = ctx.cfg.analysis.eta_meas;
    const double n_bar = ctx.cfg.analysis.n_bar;

    json report;
    const auto single_off = ds.cell(twpa::PumpSwitch::Off, twpa::Channel::Single);
    const auto single_on = ds.cell(twpa::PumpSwitch::On, twpa::Channel::Single);
    if (!single_off.empty() || !single_on.empty()) {
        const auto off = twpa::estimate_variances(single_off);
        const auto on = twpa::estimate_variances(single_on);
        const auto chain =
            twpa::build_chain(0.5 * (off.var_min + off.var_max), eta, n_bar);
        report["single_mode"] = chain_stage_json(on, off, chain);
    }

    const auto sig_off = ds.cell(twpa::PumpSwitch::Off, twpa::Channel::Signal);
    const auto idl_off = ds.cell(twpa::PumpSwitch::Off, twpa::Channel::Idler);
    const auto sig_on = ds.cell(twpa::PumpSwitch::On, twpa::Channel::Signal);
    const auto idl_on = ds.cell(twpa::PumpSwitch::On, twpa::Channel::Idler);
    if (!sig_on.empty() && !idl_on.empty()) {
        const auto voff_s = twpa::estimate_variances(sig_off);
        const auto voff_i = twpa::estimate_variances(idl_off);
        const double var_s_off = 0.5 * (voff_s.var_min + voff_s.var_max);
        const double var_i_off = 0.5 * (voff_i.var_min + voff_i.var_max);
        const double nu = ctx.cfg.analysis.nu > 0.0
                              ? ctx.cfg.analysis.nu
                              : twpa::asymmetry_ratio(var_s_off, var_i_off);

        const auto sweep_res = twpa::phase_sweep(
            sig_on, idl_on, nu,
            ctx.cfg.analysis.phi_grid_deg * std::numbers::pi / 180.0);
        const auto joint_on =
            twpa::collective_quadratures(sig_on, idl_on, sweep_res.phi_opt, nu);
        const auto joint_off =
            twpa::collective_quadratures(sig_off, idl_off, sweep_res.phi_opt, nu);

        // Collective vacuum variance is the sum of the two mode vacua; the
        // same chain inversion applies to the joint quadrature pair.
        const double var_plus_off = twpa::sample_variance(joint_off.x_plus);
        const double var_plus_on = twpa::sample_variance(joint_on.x_plus);
        const double var_minus_on = twpa::sample_variance(joint_on.x_minus);
        const auto chain = twpa::build_chain(var_plus_off, eta, n_bar);
        const double x_min = twpa::to_photon_basis(
            std::min(var_plus_on, var_minus_on), chain);
        const double x_max = twpa::to_photon_basis(
            std::max(var_plus_on, var_minus_on), chain);
        const double x_off = chain.photon_vacuum_variance();
        report["two_mode"] = json{
            {"nu_tms", nu},
            {"phi_opt_rad", sweep_res.phi_opt},
            {"var_signal_off_mv2", var_s_off},
            {"var_idler_off_mv2", var_i_off},
            {"var_plus_off_mv2", var_plus_off},
            {"var_plus_on_mv2", var_plus_on},
            {"var_minus_on_mv2", var_minus_on},
            {"variance_change",
             twpa::variance_change(std::min(var_plus_on, var_minus_on), var_plus_off)},
            {"squeeze_db", twpa::squeezing_db(x_min, x_off)},
            {"antisqueeze_db", twpa::squeezing_db(x_max, x_off)},
            {"purity", twpa::purity(x_min / x_off, x_max / x_off)},
        };
    }

    if (report.empty()) throw twpa::Error("analyze: dataset has no usable cells");
    ctx.write_json("analysis.json", std::move(report));
}

void cmd_calibrate_sntj(const Context& ctx, const std::string& csv_flag, double f_ghz,
                        double bandwidth_hz) {
    const std::string path = !csv_flag.empty() ? csv_flag : ctx.cfg.paths.sntj_csv;
    if (path.empty()) throw twpa::ConfigError("calibrate-sntj: no input CSV");
    const auto curve = twpa::read_sntj_csv(path);
    const auto fit = twpa::sntj_fit(curve, f_ghz * 1e9, bandwidth_hz);
    ctx.write_json("sntj_fit.json",
                   json{{"frequency_ghz", f_ghz},
                        {"t_junction_k", fit.t_junction},
                        {"t_junction_err_k", fit.t_junction_err},
                        {"t_noise_k", fit.t_noise},
                        {"t_noise_err_k", fit.t_noise_err},
                        {"gain_kb_bandwidth_w_per_k", fit.gain_kb_bandwidth}});
}

void cmd_calibrate_wqed(const Context& ctx, const std::string& csv_flag, double f_ghz) {
    const std::string path = !csv_flag.empty() ? csv_flag : ctx.cfg.paths.wqed_csv;
    if (path.empty()) throw twpa::ConfigError("calibrate-wqed: no input CSV");
    const auto scan = twpa::read_wqed_csv(path);
    const auto fit = twpa::wqed_fit_2d(scan);
    json omegas = json::array();
    json powers = json::array();
    for (std::size_t i = 0; i < fit.omega_drive.size(); ++i) {
        omegas.push_back(fit.omega_drive[i]);
        powers.push_back(twpa::power_at_qubit(fit.omega_drive[i], fit.gamma1, f_ghz * 1e9));
    }
    ctx.write_json("wqed_fit.json", json{{"frequency_ghz", f_ghz},
                                         {"gamma1_hz", fit.gamma1},
                                         {"gamma1_err_hz", fit.gamma1_err},
                                         {"gamma2_hz", fit.gamma2},
                                         {"gamma2_err_hz", fit.gamma2_err},
                                         {"omega_drive_hz", omegas},
                                         {"power_at_qubit_w", powers}});
}

std::vector<twpa::NoiseRecord> read_noise_records(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw twpa::Error("cannot open " + path);
    json j;
    in >> j;
    std::vector<twpa::NoiseRecord> rec;
    for (const auto& r : j.at("records"))
        rec.push_back(twpa::NoiseRecord{r.at("frequency_ghz").get<double>() * 1e9,
                                        r.at("g_sys_db").get<double>(),
                                        r.at("t_sys_k").get<double>()});
    return rec;
}

void cmd_cross_cal(const Context& ctx, const std::string& sntj_json,
                   const std::string& wqed_json) {
    const auto sntj = read_noise_records(sntj_json);
    const auto wqed = read_noise_records(wqed_json);
    const auto corrected = twpa::cross_calibrate_sntj(sntj, wqed);
    json out = json::array();
    for (std::size_t i = 0; i < corrected.size(); ++i) {
        const double f = corrected[i].frequency;
        out.push_back(json{{"frequency_ghz", f * 1e-9},
                           {"g_sys_db", corrected[i].g_sys_db},
                           {"t_sys_k", corrected[i].t_sys},
                           {"eta_meas", twpa::kHbar * twpa::angular(f) /
                                            (2.0 * twpa::kBoltzmann * corrected[i].t_sys)}});
    }
    ctx.write_json("cross_cal.json", json{{"records", out}});
}

void cmd_synth(const Context& ctx, const std::string& what, std::size_t n) {
    twpa::GaussianStream g(ctx.seed);
    if (what == "single-mode") {
        // Voltage-basis clouds reproducing the worked single-mode example.
        twpa::QuadratureDataset ds;
        auto off = twpa::exact_gaussian_cloud(n, 3.87448, 3.87448, 0.0, g,
                                              twpa::PumpSwitch::Off);
        auto on = twpa::exact_gaussian_cloud(n, 3.64065, 13.1258, 0.5236, g,
                                             twpa::PumpSwitch::On);
        ds.samples.insert(ds.samples.end(), off.begin(), off.end());
        ds.samples.insert(ds.samples.end(), on.begin(), on.end());
        twpa::write_quadrature_csv(ctx.out("synth_single_mode.csv").string(), ds);
        log_info("wrote " + ctx.out("synth_single_mode.csv").string());
    } else if (what == "two-mode") {
        twpa::QuadratureDataset ds;
        auto vac_s = twpa::exact_gaussian_cloud(n, 1.119, 1.119, 0.0, g,
                                                twpa::PumpSwitch::Off,
                                                twpa::Channel::Signal);
        auto vac_i = twpa::exact_gaussian_cloud(n, 1.424, 1.424, 0.0, g,
                                                twpa::PumpSwitch::Off,
                                                twpa::Channel::Idler);
        auto [sig, idl] = twpa::two_mode_squeezed_pairs(n, 1.0, std::sqrt(2.0 * 1.119),
                                                        0.17, g);
        ds.samples.insert(ds.samples.end(), vac_s.begin(), vac_s.end());
        ds.samples.insert(ds.samples.end(), vac_i.begin(), vac_i.end());
        ds.samples.insert(ds.samples.end(), sig.begin(), sig.end());
        ds.samples.insert(ds.samples.end(), idl.begin(), idl.end());
        twpa::write_quadrature_csv(ctx.out("synth_two_mode.csv").string(), ds);
        log_info("wrote " + ctx.out("synth_two_mode.csv").string());
    } else if (what == "sntj") {
        const double f = 6.7e9, bw = 100.0;
        const auto curve = twpa::synthetic_sntj_curve(
            0.0304, 2.46, twpa::power_ratio_from_db(65.06), bw, f, 400e-6, n, 0.01, g);
        twpa::write_sntj_csv(ctx.out("synth_sntj.csv").string(), curve);
        log_info("wrote " + ctx.out("synth_sntj.csv").string());
    } else if (what == "wqed") {
        std::vector<double> omegas;
        for (std::size_t i = 0; i < 8; ++i)
            omegas.push_back(0.2e6 * std::pow(2.0, static_cast<double>(i)));
        const auto scan =
            twpa::synthetic_wqed_scan(1.0e6, 0.55e6, omegas, 10e6, n, 0.01, g);
        twpa::write_wqed_csv(ctx.out("synth_wqed.csv").string(), scan);
        log_info("wrote " + ctx.out("synth_wqed.csv").string());
    } else {
        throw twpa::ConfigError("synth: unknown generator '" + what + "'");
    }
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Dual-pump traveling-wave parametric amplifier workbench"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir = ".";
    std::string format = "csv";
    int threads = 1;
    std::uint64_t seed = 1;
    app.add_option("--config", config_path, "workbench JSON config");
    app.add_option("--out", out_dir, "output directory");
    app.add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}));
    app.add_option("--threads", threads, "sweep worker threads");
    app.add_option("--seed", seed, "seed for synthetic generators");

    double fmin_ghz = 3.0, fmax_ghz = 10.0, step_mhz = 10.0;
    int n_theta = 360;
    std::string dataset_flag, sntj_flag, wqed_flag, sntj_json, wqed_json;
    double cal_f_ghz = 6.7, cal_bw_hz = 100.0;
    std::string synth_what = "single-mode";
    std::size_t synth_n = 5000;

    auto* disp = app.add_subcommand("dispersion", "dispersion and insertion loss curves");
    disp->add_option("--fmin-ghz", fmin_ghz);
    disp->add_option("--fmax-ghz", fmax_ghz);
    disp->add_option("--step-mhz", step_mhz);

    auto* pm = app.add_subcommand("phasematch", "per-process phase mismatch table");
    pm->add_option("--fmin-ghz", fmin_ghz);
    pm->add_option("--fmax-ghz", fmax_ghz);
    pm->add_option("--step-mhz", step_mhz);

    auto* gain = app.add_subcommand("gain", "phase-preserving gain across the band");
    gain->add_option("--fmin-ghz", fmin_ghz);
    gain->add_option("--fmax-ghz", fmax_ghz);
    gain->add_option("--step-mhz", step_mhz);

    auto* pser = app.add_subcommand("pser", "phase-sensitive gain at the center frequency");
    pser->add_option("--n-theta", n_theta);

    app.add_subcommand("squeeze", "single squeezing point");
    app.add_subcommand("sweep", "squeezing/gain sweep from the config grid");

    auto* analyze = app.add_subcommand("analyze", "quadrature dataset to audit report");
    analyze->add_option("--dataset", dataset_flag, "CSV path (overrides config)");

    auto* csntj = app.add_subcommand("calibrate-sntj", "fit a shot-noise junction curve");
    csntj->add_option("--csv", sntj_flag);
    csntj->add_option("--f-ghz", cal_f_ghz);
    csntj->add_option("--bandwidth-hz", cal_bw_hz);

    auto* cwqed = app.add_subcommand("calibrate-wqed", "fit a qubit transmission scan");
    cwqed->add_option("--csv", wqed_flag);
    cwqed->add_option("--f-ghz", cal_f_ghz);

    auto* xcal = app.add_subcommand("cross-cal", "calibrate the SNTJ against the wQED");
    xcal->add_option("--sntj-json", sntj_json)->required();
    xcal->add_option("--wqed-json", wqed_json)->required();

    auto* synth = app.add_subcommand("synth", "seeded synthetic datasets");
    synth->add_option("--what", synth_what, "single-mode|two-mode|sntj|wqed");
    synth->add_option("--n", synth_n, "samples per cell / points");

    CLI11_PARSE(app, argc, argv);

    try {
        Context ctx;
        if (!config_path.empty()) ctx.cfg = twpa::load_config(config_path);
        ctx.out_dir = out_dir;
        ctx.format = format;
        ctx.threads = threads;
        ctx.seed = seed;
        fs::create_directories(ctx.out_dir);

        const bool needs_config = disp->parsed() || pm->parsed() || gain->parsed() ||
                                  pser->parsed() || app.got_subcommand("squeeze") ||
                                  app.got_subcommand("sweep");
        if (needs_config && config_path.empty())
            throw twpa::ConfigError("this subcommand requires --config");

        if (disp->parsed()) cmd_dispersion(ctx, fmin_ghz, fmax_ghz, step_mhz);
        if (pm->parsed()) cmd_phasematch(ctx, fmin_ghz, fmax_ghz, step_mhz);
        if (gain->parsed()) cmd_gain(ctx, fmin_ghz, fmax_ghz, step_mhz);
        if (pser->parsed()) cmd_pser(ctx, n_theta);
        if (app.got_subcommand("squeeze")) cmd_squeeze(ctx);
        if (app.got_subcommand("sweep")) cmd_sweep(ctx);
        if (analyze->parsed()) cmd_analyze(ctx, dataset_flag);
        if (csntj->parsed()) cmd_calibrate_sntj(ctx, sntj_flag, cal_f_ghz, cal_bw_hz);
        if (cwqed->parsed()) cmd_calibrate_wqed(ctx, wqed_flag, cal_f_ghz);
        if (xcal->parsed()) cmd_cross_cal(ctx, sntj_json, wqed_json);
        if (synth->parsed()) cmd_synth(ctx, synth_what, synth_n);
    } catch (const std::exception& e) {
        json err{{"error", {{"type", typeid(e).name()}, {"message", e.what()}}}};
        std::cout << err.dump(2) << std::endl;
        return 1;
    }
    return 0;
}
