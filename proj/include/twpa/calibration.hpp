#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <limits>
#include <numbers>
#include <optional>
#include <vector>

#include <Eigen/Dense>

#include "twpa/constants.hpp"
#include "twpa/errors.hpp"
#include "twpa/levmar.hpp"
#include "twpa/units.hpp"

namespace twpa {

// ---------------------------------------------------------------------------
// Shot-noise tunnel junction reference
// ---------------------------------------------------------------------------

/// Fitted SNTJ parameters: junction temperature, system noise temperature
/// and the gain-bandwidth product G kB B in W/K.
struct SntjFit {
    double t_junction = 0.0;     // K
    double t_noise = 0.0;        // K
    double gain_kb_bandwidth = 0.0; // G kB B, W/K
    double t_junction_err = 0.0;
    double t_noise_err = 0.0;
};

inline double coth(double x) { return 1.0 / std::tanh(x); }

/// Noise power of a voltage-biased tunnel junction at temperature T seen
/// through a chain with gain G, bandwidth B and noise temperature T_N.
inline double sntj_model(double v, double t, double t_noise, double gain, double bandwidth,
                         double f) {
    if (!(t > 0.0)) throw Error("sntj_model: junction temperature must be > 0");
    if (!(bandwidth > 0.0)) throw Error("sntj_model: bandwidth must be > 0");
    const double up = (kElectronCharge * v + kPlanck * f) / (2.0 * kBoltzmann);
    const double um = (kElectronCharge * v - kPlanck * f) / (2.0 * kBoltzmann);
    auto branch = [&](double u) {
        if (u == 0.0) return t; // x coth(x/T) -> T as x -> 0
        return u * coth(u / t);
    };
    return gain * kBoltzmann * bandwidth *
           (t_noise + 0.5 * (branch(up) + branch(um)));
}

struct SntjPoint {
    double v_bias;     // V
    double noise_watts;
};

/// Nonlinear least squares over (T, T_N, G kB B) with analytic Jacobian.
/// Initialization comes from the curve geometry: the shot-noise asymptote
/// slope fixes the gain, the zero-bias plateau fixes T_N.
inline SntjFit sntj_fit(const std::vector<SntjPoint>& curve, double f, double bandwidth) {
    if (curve.size() < 20) throw Error("sntj_fit: need at least 20 points");
    const double hf2k = kPlanck * f / (2.0 * kBoltzmann);
    double vmax = 0.0, vmin = 1e300;
    for (const auto& pt : curve) {
        vmax = std::max(vmax, std::abs(pt.v_bias));
        vmin = std::min(vmin, std::abs(pt.v_bias));
    }
    const double e2k = kElectronCharge / (2.0 * kBoltzmann);
    if (vmax * e2k < 3.0 * hf2k || vmin * e2k > 0.5 * hf2k)
        throw IdentifiabilityError(
            "sntj_fit: bias range must span the quantum plateau and the shot-noise asymptote");

    // Slope of N vs |V| over the outer third of the bias range.
    double sxx = 0.0, sxy = 0.0, sx = 0.0, sy = 0.0;
    int n_tail = 0;
    double plateau = 0.0;
    int n_plateau = 0;
    for (const auto& pt : curve) {
        const double av = std::abs(pt.v_bias);
        if (av > 2.0 * vmax / 3.0) {
            sx += av;
            sy += pt.noise_watts;
            sxx += av * av;
            sxy += av * pt.noise_watts;
            ++n_tail;
        }
        if (av < 0.2 * hf2k / e2k) {
            plateau += pt.noise_watts;
            ++n_plateau;
        }
    }
    const double slope = (n_tail * sxy - sx * sy) / std::max(n_tail * sxx - sx * sx, 1e-300);
    double gkb0 = slope / e2k; // N ~ G kB B (T_N + e|V|/2kB)
    if (!(gkb0 > 0.0)) gkb0 = sy / std::max(n_tail, 1) / (2.0 * hf2k);
    double tn0 = hf2k;
    if (n_plateau > 0) tn0 = std::max(plateau / n_plateau / gkb0 - hf2k, 0.01);

    auto residual = [&](const Eigen::VectorXd& p) {
        Eigen::VectorXd r(curve.size());
        for (std::size_t i = 0; i < curve.size(); ++i)
            r[i] = sntj_model(curve[i].v_bias, p[0], p[1], p[2] / kBoltzmann, 1.0, f) -
                   curve[i].noise_watts;
        return r;
    };
    auto jacobian = [&](const Eigen::VectorXd& p) {
        Eigen::MatrixXd jac(curve.size(), 3);
        const double t = p[0];
        for (std::size_t i = 0; i < curve.size(); ++i) {
            const double v = curve[i].v_bias;
            const double up = (kElectronCharge * v + kPlanck * f) / (2.0 * kBoltzmann);
            const double um = (kElectronCharge * v - kPlanck * f) / (2.0 * kBoltzmann);
            auto dbranch_dt = [&](double u) {
                if (u == 0.0) return 1.0;
                const double s = std::sinh(u / t);
                return (u / t) * (u / t) / (s * s);
            };
            auto branch = [&](double u) { return u == 0.0 ? t : u * coth(u / t); };
            jac(i, 0) = p[2] * 0.5 * (dbranch_dt(up) + dbranch_dt(um));
            jac(i, 1) = p[2];
            jac(i, 2) = p[1] + 0.5 * (branch(up) + branch(um));
        }
        return jac;
    };

    Eigen::VectorXd p0(3);
    p0 << 0.03, tn0, gkb0;
    const LevMarResult res = levmar_fit(residual, jacobian, p0);

    SntjFit fit;
    fit.t_junction = res.params[0];
    fit.t_noise = res.params[1];
    fit.gain_kb_bandwidth = res.params[2];
    fit.t_junction_err = std::sqrt(std::max(res.covariance(0, 0), 0.0));
    fit.t_noise_err = std::sqrt(std::max(res.covariance(1, 1), 0.0));
    if (fit.t_noise < kPlanck * f / (2.0 * kBoltzmann) - 3.0 * fit.t_noise_err)
        throw QuantumBoundViolation("sntj_fit: fitted noise temperature below hf/2kB");
    return fit;
}

// ---------------------------------------------------------------------------
// Waveguide-QED reference
// ---------------------------------------------------------------------------

/// Fitted qubit-in-waveguide parameters. omega_drive holds the drive
/// amplitude (Hz) for each power point of the scan.
struct WqedFit {
    double gamma1 = 0.0; // Hz
    double gamma2 = 0.0; // Hz
    std::vector<double> omega_drive;
    double gamma1_err = 0.0;
    double gamma2_err = 0.0;
    double xi = 1.0;
};

/// Transmission coefficient of a coherent tone past a waveguide-coupled
/// qubit at detuning delta and drive amplitude omega_drive.
inline std::complex<double> wqed_transmission(double delta, double omega_drive,
                                              double gamma1, double gamma2,
                                              double xi = 1.0) {
    if (!(gamma1 > 0.0) || !(gamma2 > 0.0))
        throw Error("wqed_transmission: decay rates must be > 0");
    const std::complex<double> i1(0.0, 1.0);
    const double denom = 1.0 + (delta / gamma2) * (delta / gamma2) +
                         omega_drive * omega_drive / (gamma1 * gamma2);
    return 1.0 - (xi * gamma1 / (2.0 * gamma2)) * (1.0 - i1 * delta / gamma2) / denom;
}

struct WqedScan {
    std::vector<double> detunings; // Hz
    std::vector<double> powers;    // arbitrary monotone labels, one per row
    // s21[row * detunings.size() + col], background-normalized
    std::vector<std::complex<double>> s21;
};

/// Joint least squares of (Gamma1, Gamma2, Omega per power) on the real and
/// imaginary parts of a background-normalized 2D scan; xi is held at 1.
inline WqedFit wqed_fit_2d(const WqedScan& scan) {
    const std::size_t nd = scan.detunings.size();
    const std::size_t np = scan.powers.size();
    if (nd < 5 || np < 2) throw Error("wqed_fit_2d: scan too small");
    if (scan.s21.size() != nd * np) throw LengthMismatch("wqed_fit_2d: scan shape mismatch");

    // Resonant transmittance per power; all saturated means Gamma1 is invisible.
    std::size_t col0 = 0;
    for (std::size_t c = 1; c < nd; ++c)
        if (std::abs(scan.detunings[c]) < std::abs(scan.detunings[col0])) col0 = c;
    double tmin = 1e300, tmax = -1e300;
    for (std::size_t r = 0; r < np; ++r) {
        const double t0 = std::abs(scan.s21[r * nd + col0]);
        tmin = std::min(tmin, t0);
        tmax = std::max(tmax, t0);
    }
    if (tmin > 0.6)
        throw IdentifiabilityError("wqed_fit_2d: every power saturates the qubit");

    // Width of the least saturated row initializes Gamma2.
    std::size_t row0 = 0;
    for (std::size_t r = 1; r < np; ++r)
        if (std::abs(scan.s21[r * nd + col0]) < std::abs(scan.s21[row0 * nd + col0]))
            row0 = r;
    double gamma2_0 = std::abs(scan.detunings[nd - 1] - scan.detunings[0]) / 10.0;
    {
        const double depth = 1.0 - std::abs(scan.s21[row0 * nd + col0]);
        const double half = 1.0 - 0.5 * depth;
        for (std::size_t c = col0; c < nd; ++c) {
            if (std::abs(scan.s21[row0 * nd + c]) > half) {
                gamma2_0 = std::max(std::abs(scan.detunings[c]), 1e-3);
                break;
            }
        }
    }
    const double t00 = std::abs(scan.s21[row0 * nd + col0]);
    const double gamma1_0 = std::clamp(2.0 * gamma2_0 * (1.0 - t00), 0.1 * gamma2_0,
                                       2.0 * gamma2_0);

    Eigen::VectorXd p0(2 + np);
    p0[0] = gamma1_0;
    p0[1] = std::max(gamma2_0, 0.5 * gamma1_0);
    for (std::size_t r = 0; r < np; ++r) {
        const double t0 = std::abs(scan.s21[r * nd + col0]);
        const double g1 = p0[0], g2 = p0[1];
        const double denom = std::max(1.0 - t0, 1e-6);
        const double om2 = g1 * g2 * std::max(g1 / (2.0 * g2 * denom) - 1.0, 0.0);
        p0[2 + r] = std::sqrt(om2);
    }

    auto unpack = [&](const Eigen::VectorXd& p, std::size_t r) {
        return std::array<double, 3>{std::abs(p[0]), std::abs(p[1]), std::abs(p[2 + r])};
    };
    auto residual = [&, nd, np](const Eigen::VectorXd& p) {
        Eigen::VectorXd res(2 * nd * np);
        for (std::size_t r = 0; r < np; ++r) {
            const auto [g1, g2, om] = unpack(p, r);
            for (std::size_t c = 0; c < nd; ++c) {
                const std::complex<double> t =
                    wqed_transmission(scan.detunings[c], om, g1, g2);
                const std::complex<double> d = t - scan.s21[r * nd + c];
                res[2 * (r * nd + c)] = d.real();
                res[2 * (r * nd + c) + 1] = d.imag();
            }
        }
        return res;
    };
    auto jacobian = [&, nd, np](const Eigen::VectorXd& p) {
        Eigen::MatrixXd jac = Eigen::MatrixXd::Zero(2 * nd * np, p.size());
        for (std::size_t r = 0; r < np; ++r) {
            const auto [g1, g2, om] = unpack(p, r);
            for (std::size_t c = 0; c < nd; ++c) {
                const double delta = scan.detunings[c];
                const std::complex<double> i1(0.0, 1.0);
                const double dd = delta / g2;
                const double den = 1.0 + dd * dd + om * om / (g1 * g2);
                const std::complex<double> num = 1.0 - i1 * dd;
                const double u = g1 / (2.0 * g2);
                // t = 1 - u num / den
                const std::complex<double> dt_dg1 =
                    -num / den / (2.0 * g2) + u * num / (den * den) * (-om * om / (g1 * g1 * g2));
                const std::complex<double> dden_dg2 =
                    -2.0 * delta * delta / (g2 * g2 * g2) - om * om / (g1 * g2 * g2);
                const std::complex<double> dnum_dg2 = i1 * delta / (g2 * g2);
                const std::complex<double> dt_dg2 =
                    (g1 / (2.0 * g2 * g2)) * num / den - u * dnum_dg2 / den +
                    u * num / (den * den) * dden_dg2;
                const std::complex<double> dt_dom =
                    u * num / (den * den) * (2.0 * om / (g1 * g2));
                const std::size_t row = 2 * (r * nd + c);
                jac(row, 0) = dt_dg1.real();
                jac(row + 1, 0) = dt_dg1.imag();
                jac(row, 1) = dt_dg2.real();
                jac(row + 1, 1) = dt_dg2.imag();
                jac(row, 2 + r) = dt_dom.real();
                jac(row + 1, 2 + r) = dt_dom.imag();
            }
        }
        return jac;
    };

    const LevMarResult res = levmar_fit(residual, jacobian, p0);
    WqedFit fit;
    fit.gamma1 = std::abs(res.params[0]);
    fit.gamma2 = std::abs(res.params[1]);
    for (std::size_t r = 0; r < np; ++r)
        fit.omega_drive.push_back(std::abs(res.params[2 + r]));
    fit.gamma1_err = std::sqrt(std::max(res.covariance(0, 0), 0.0));
    fit.gamma2_err = std::sqrt(std::max(res.covariance(1, 1), 0.0));
    return fit;
}

/// Coherent drive power at the qubit for a fitted drive amplitude.
inline double power_at_qubit(double omega_drive, double gamma1, double f_qubit) {
    if (!(gamma1 > 0.0)) throw Error("power_at_qubit: gamma1 must be > 0");
    return std::numbers::pi * kHbar * angular(f_qubit) * omega_drive * omega_drive /
           (2.0 * gamma1);
}

// ---------------------------------------------------------------------------
// System noise
// ---------------------------------------------------------------------------

struct SystemNoise {
    double g_sys_db = 0.0;
    double t_sys = 0.0;    // K
    double eta_meas = 0.0;
    double frequency = 0.0; // Hz
};

/// System gain from the calibrated through power, noise temperature from
/// the measured noise floor, and the resulting measurement efficiency.
inline SystemNoise system_noise(double p_rt_cal, double p_mxc_cal, double p_noise_rt,
                                double bandwidth, double f) {
    if (!(p_rt_cal > 0.0) || !(p_mxc_cal > 0.0) || !(p_noise_rt > 0.0))
        throw Error("system_noise: powers must be > 0");
    SystemNoise out;
    const double g_sys = p_rt_cal / p_mxc_cal;
    out.g_sys_db = db_from_power_ratio(g_sys);
    out.t_sys = p_noise_rt / (g_sys * kBoltzmann * bandwidth);
    out.eta_meas = kHbar * angular(f) / (2.0 * kBoltzmann * out.t_sys);
    out.frequency = f;
    if (out.eta_meas > 1.0)
        throw QuantumBoundViolation("system_noise: efficiency above the quantum bound");
    return out;
}

struct NoiseRecord {
    double frequency = 0.0; // Hz
    double g_sys_db = 0.0;
    double t_sys = 0.0;
};

/// Attribute the gain difference between the two references to insertion
/// loss on the SNTJ path and rescale the SNTJ noise temperatures.
inline std::vector<NoiseRecord> cross_calibrate_sntj(const std::vector<NoiseRecord>& sntj,
                                                     const std::vector<NoiseRecord>& wqed,
                                                     double f_tol = 1e6) {
    std::vector<NoiseRecord> out;
    for (const auto& s : sntj) {
        const NoiseRecord* match = nullptr;
        for (const auto& w : wqed)
            if (std::abs(w.frequency - s.frequency) <= f_tol) {
                match = &w;
                break;
            }
        if (!match)
            throw FrequencyMismatch("cross_calibrate_sntj: no wQED record near " +
                                    std::to_string(s.frequency * 1e-9) + " GHz");
        const double delta_a_db = match->g_sys_db - s.g_sys_db;
        NoiseRecord corrected = s;
        corrected.g_sys_db = match->g_sys_db;
        corrected.t_sys = s.t_sys * power_ratio_from_db(-delta_a_db);
        out.push_back(corrected);
    }
    return out;
}

struct ThermalStage {
    double temp_k = 0.0;
    double attenuation = 1.0; // net power transmission from the stage, in (0, 1]
};

/// Residual thermal photons at the device input summed over refrigerator
/// stages, each weighted by the attenuation between it and the device.
inline double residual_thermal(const std::vector<ThermalStage>& stages, double f) {
    double n = 0.0;
    for (const auto& s : stages) {
        if (!(s.attenuation > 0.0) || s.attenuation > 1.0)
            throw Error("residual_thermal: attenuation must be in (0, 1]");
        if (s.temp_k <= 0.0) continue;
        n += s.attenuation / std::expm1(kPlanck * f / (kBoltzmann * s.temp_k));
    }
    return n;
}

// ---------------------------------------------------------------------------
// Wavevector de-embedding
// ---------------------------------------------------------------------------

struct DeembedResult {
    std::vector<double> k;        // rad/cell, NaN where flagged
    std::vector<bool> flagged;    // stop-band / unwrap exclusion
};

struct FrequencyWindow {
    double f_lo = 0.0, f_hi = 0.0;
    bool contains(double f) const { return f >= f_lo && f <= f_hi; }
};

/// Recover k(f) from transmission phases of the device and a through line
/// sharing the same fixturing. The through phase is modelled as linear
/// with zero DC intercept; its linear model restores the device's own
/// electrical length after the common-path subtraction.
inline DeembedResult deembed_wavevector(const std::vector<double>& freqs,
                                        const std::vector<double>& phase_dut,
                                        const std::vector<double>& phase_thru,
                                        double n_cells,
                                        const std::vector<FrequencyWindow>& exclusions = {}) {
    const std::size_t n = freqs.size();
    if (phase_dut.size() != n || phase_thru.size() != n)
        throw LengthMismatch("deembed_wavevector: grids differ");
    if (n < 3) throw Error("deembed_wavevector: need at least 3 points");

    auto in_exclusion = [&](double f) {
        for (const auto& w : exclusions)
            if (w.contains(f)) return true;
        return false;
    };

    // Least-squares slope of the through phase, zero intercept at DC.
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        sxy += freqs[i] * phase_thru[i];
        sxx += freqs[i] * freqs[i];
    }
    const double slope = sxy / sxx;

    DeembedResult out;
    out.k.resize(n);
    out.flagged.resize(n, false);
    double prev = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double total = phase_dut[i] - phase_thru[i] + slope * freqs[i];
        const double k = total / n_cells;
        if (in_exclusion(freqs[i])) {
            out.k[i] = std::numeric_limits<double>::quiet_NaN();
            out.flagged[i] = true;
            continue;
        }
        if (i > 0 && !out.flagged[i - 1] &&
            std::abs(k - prev) * n_cells > std::numbers::pi)
            throw UnwrapError("deembed_wavevector: phase jump above pi outside exclusions");
        out.k[i] = k;
        prev = k;
    }
    return out;
}

} // namespace twpa
