#pragma once

#include <algorithm>
#include <cmath>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "twpa/constants.hpp"
#include "twpa/errors.hpp"
#include "twpa/units.hpp"

namespace twpa {

enum class PumpSwitch { Off, On };
enum class Channel { Single, Signal, Idler };

inline const char* to_string(PumpSwitch s) { return s == PumpSwitch::On ? "on" : "off"; }
inline const char* to_string(Channel c) {
    switch (c) {
        case Channel::Single: return "single";
        case Channel::Signal: return "signal";
        case Channel::Idler: return "idler";
    }
    return "?";
}

/// One demodulated I/Q pair in digitizer millivolts.
struct IqSample {
    double i_mv = 0.0;
    double q_mv = 0.0;
    PumpSwitch pump = PumpSwitch::Off;
    Channel channel = Channel::Single;
};

struct QuadratureDataset {
    std::vector<IqSample> samples;
    double frequency = 0.0;       // Hz
    double demod_bandwidth = 0.0; // Hz

    std::vector<IqSample> cell(PumpSwitch pump, Channel channel) const {
        std::vector<IqSample> out;
        for (const auto& s : samples)
            if (s.pump == pump && s.channel == channel) out.push_back(s);
        return out;
    }
};

inline constexpr std::size_t kMinSamplesPerCell = 1000;

/// Principal-axis variances of one measurement cell in mV^2.
struct VarianceEstimate {
    double var_min = 0.0;
    double var_max = 0.0;
    double angle = 0.0; // principal axis of the larger variance, rad
    std::size_t n = 0;
    double stderr_min = 0.0;
    double stderr_max = 0.0;
};

/// Eigendecomposition of the 2x2 sample covariance. The raw I/Q clouds are
/// single Gaussians, so the principal-axis variances are the maximum
/// likelihood estimates of the squeezed/anti-squeezed quadrature variances.
inline VarianceEstimate estimate_variances(const std::vector<IqSample>& cell) {
    const std::size_t n = cell.size();
    if (n < kMinSamplesPerCell)
        throw Error("estimate_variances: need at least 1000 samples per cell");

    double mi = 0.0, mq = 0.0;
    for (const auto& s : cell) {
        mi += s.i_mv;
        mq += s.q_mv;
    }
    mi /= n;
    mq /= n;
    double vi = 0.0, vq = 0.0, cv = 0.0;
    for (const auto& s : cell) {
        const double di = s.i_mv - mi;
        const double dq = s.q_mv - mq;
        vi += di * di;
        vq += dq * dq;
        cv += di * dq;
    }
    const double norm = 1.0 / (n - 1);
    vi *= norm;
    vq *= norm;
    cv *= norm;

    const double mean = 0.5 * (vi + vq);
    const double radius = std::sqrt(0.25 * (vi - vq) * (vi - vq) + cv * cv);
    VarianceEstimate est;
    est.var_min = mean - radius;
    est.var_max = mean + radius;
    est.angle = 0.5 * std::atan2(2.0 * cv, vi - vq);
    est.n = n;
    const double rel = std::sqrt(2.0 / (n - 1));
    est.stderr_min = est.var_min * rel;
    est.stderr_max = est.var_max * rel;
    if (est.var_min <= 1e-12 * est.var_max)
        throw DegenerateData("estimate_variances: singular sample covariance");
    return est;
}

/// Measurement-chain constants linking digitizer voltage variances to
/// photon-basis variances at the device output.
struct ChainModel {
    double eta_meas = 1.0;  // in (0, 1]
    double n_bar = 0.0;     // residual thermal photons at the device input
    double alpha = 0.0;     // quanta per mV^2
    double var_off_mv2 = 0.0;
    std::optional<double> t_sys; // K, provenance
    std::optional<double> frequency;

    double photon_vacuum_variance() const { return 0.5 + n_bar; } // at the device
    double chain_vacuum_variance() const { return 0.5 + eta_meas * n_bar; }
};

/// Derive the voltage-to-photon conversion from the pump-off (vacuum)
/// voltage variance: alpha = (1/2 + eta nbar) / var_off.
inline ChainModel build_chain(double var_off_mv2, double eta_meas, double n_bar,
                              std::optional<double> t_sys = std::nullopt,
                              std::optional<double> frequency = std::nullopt) {
    if (!(var_off_mv2 > 0.0)) throw Error("build_chain: var_off must be > 0");
    if (!(eta_meas > 0.0) || eta_meas > 1.0)
        throw Error("build_chain: eta_meas must be in (0, 1]");
    if (n_bar < 0.0) throw Error("build_chain: n_bar must be >= 0");
    ChainModel chain;
    chain.eta_meas = eta_meas;
    chain.n_bar = n_bar;
    chain.var_off_mv2 = var_off_mv2;
    chain.alpha = chain.chain_vacuum_variance() / var_off_mv2;
    chain.t_sys = t_sys;
    chain.frequency = frequency;
    if (t_sys && frequency) {
        const double eta_check = kHbar * angular(*frequency) / (2.0 * kBoltzmann * *t_sys);
        if (std::abs(eta_check - eta_meas) > 1e-6 * eta_meas)
            throw Error("build_chain: eta_meas inconsistent with t_sys");
    }
    return chain;
}

/// Invert the measurement-chain beamsplitter: device-output variance in
/// quanta from a voltage variance in mV^2. Values up to 3 propagated
/// standard errors below zero are clamped; beyond that the chain is
/// miscalibrated and NonPhysicalVariance is thrown.
inline double to_photon_basis(double var_mv2, const ChainModel& chain,
                              double stderr_mv2 = 0.0, bool* clamped = nullptr) {
    const double x = chain.alpha * var_mv2;
    const double value = (x - 0.5 * (1.0 - chain.eta_meas)) / chain.eta_meas;
    if (clamped) *clamped = false;
    if (value < 0.0) {
        const double stderr_quanta = chain.alpha * stderr_mv2 / chain.eta_meas;
        if (value < -3.0 * stderr_quanta)
            throw NonPhysicalVariance("photon-basis variance " + std::to_string(value) +
                                      " below zero beyond statistical tolerance");
        if (clamped) *clamped = true;
        return 0.0;
    }
    return value;
}

/// Squeezing level in dB relative to the measured vacuum variance.
inline double squeezing_db(double var_quanta, double var_off_quanta) {
    if (!(var_quanta > 0.0) || !(var_off_quanta > 0.0))
        throw Error("squeezing_db: variances must be > 0");
    return db_from_power_ratio(var_quanta / var_off_quanta);
}

/// Gaussian-state purity from the squeezing and anti-squeezing factors
/// (variance ratios to vacuum).
inline double purity(double s_min_linear, double s_max_linear) {
    if (!(s_min_linear > 0.0) || !(s_max_linear > 0.0))
        throw Error("purity: factors must be > 0");
    return 1.0 / std::sqrt(s_min_linear * s_max_linear);
}

/// Vacuum-referenced fractional variance change 1 - var_sqz / var_off,
/// used where the chain efficiency is not calibrated.
inline double variance_change(double var_sqz, double var_off) {
    if (!(var_off > 0.0)) throw Error("variance_change: var_off must be > 0");
    return 1.0 - var_sqz / var_off;
}

struct JointQuadratures {
    std::vector<double> x_plus, x_minus, p_plus, p_minus;
};

/// Collective quadratures of paired signal/idler samples. The idler is
/// scaled by the vacuum asymmetry ratio nu and rotated by phi_m in its own
/// I/Q plane before forming the sums and differences.
inline JointQuadratures collective_quadratures(const std::vector<IqSample>& signal,
                                               const std::vector<IqSample>& idler,
                                               double phi_m, double nu) {
    if (signal.size() != idler.size())
        throw LengthMismatch("collective_quadratures: signal/idler sample counts differ");
    JointQuadratures out;
    const std::size_t n = signal.size();
    out.x_plus.reserve(n);
    out.x_minus.reserve(n);
    out.p_plus.reserve(n);
    out.p_minus.reserve(n);
    const double c = std::cos(phi_m);
    const double s = std::sin(phi_m);
    for (std::size_t k = 0; k < n; ++k) {
        const double xi = nu * (c * idler[k].i_mv - s * idler[k].q_mv);
        const double pi = nu * (s * idler[k].i_mv + c * idler[k].q_mv);
        out.x_plus.push_back(signal[k].i_mv + xi);
        out.x_minus.push_back(signal[k].i_mv - xi);
        out.p_plus.push_back(signal[k].q_mv + pi);
        out.p_minus.push_back(signal[k].q_mv - pi);
    }
    return out;
}

inline double sample_variance(const std::vector<double>& v) {
    if (v.size() < 2) throw Error("sample_variance: need >= 2 samples");
    double m = 0.0;
    for (double x : v) m += x;
    m /= v.size();
    double s = 0.0;
    for (double x : v) s += (x - m) * (x - m);
    return s / (v.size() - 1);
}

/// Vacuum asymmetry ratio between the signal and idler readout paths.
inline double asymmetry_ratio(double var_signal_off, double var_idler_off) {
    if (!(var_signal_off > 0.0) || !(var_idler_off > 0.0))
        throw Error("asymmetry_ratio: variances must be > 0");
    return std::sqrt(var_signal_off / var_idler_off);
}

struct PhaseSweepResult {
    double phi_opt = 0.0;
    std::vector<double> phi;
    std::vector<double> var_plus;
};

/// Sweep the signal-idler phase and locate the minimum of Var(X+), with a
/// parabolic refinement around the best grid point.
inline PhaseSweepResult phase_sweep(const std::vector<IqSample>& signal,
                                    const std::vector<IqSample>& idler, double nu,
                                    double grid_step_rad = std::numbers::pi / 180.0) {
    if (!(grid_step_rad > 0.0)) throw Error("phase_sweep: grid step must be > 0");
    PhaseSweepResult out;
    const int n = static_cast<int>(std::ceil(2.0 * std::numbers::pi / grid_step_rad));
    out.phi.reserve(n);
    out.var_plus.reserve(n);
    for (int k = 0; k < n; ++k) {
        const double phi = 2.0 * std::numbers::pi * k / n;
        const JointQuadratures j = collective_quadratures(signal, idler, phi, nu);
        out.phi.push_back(phi);
        out.var_plus.push_back(sample_variance(j.x_plus));
    }
    int best = 0;
    for (int k = 1; k < n; ++k)
        if (out.var_plus[k] < out.var_plus[best]) best = k;

    // Parabola through the minimum and its periodic neighbors.
    const double ym = out.var_plus[(best + n - 1) % n];
    const double y0 = out.var_plus[best];
    const double yp = out.var_plus[(best + 1) % n];
    const double denom = ym - 2.0 * y0 + yp;
    double shift = 0.0;
    if (std::abs(denom) > 1e-300) shift = 0.5 * (ym - yp) / denom;
    shift = std::clamp(shift, -0.5, 0.5);
    const double step = 2.0 * std::numbers::pi / n;
    out.phi_opt = std::fmod(out.phi[best] + shift * step + 2.0 * std::numbers::pi,
                            2.0 * std::numbers::pi);
    return out;
}

} // namespace twpa
