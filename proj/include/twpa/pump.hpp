#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <utility>
#include <vector>

#include "twpa/errors.hpp"
#include "twpa/phasematch.hpp"

namespace twpa {

/// Classical pump at the device input. beta0 is the dimensionless
/// amplitude I_p / 4 I_c; gamma is the power decay rate per cell.
struct PumpState {
    double freq = 0.0;                   // Hz
    std::complex<double> beta0{0.0, 0.0};
    double gamma = 0.0;                  // 1/cell, >= 0
    double c_p = 0.0;                    // power-to-|beta|^2 fit constant, 1/W
    double k = 0.0;                      // rad/cell at freq, lossless dispersion

    void validate() const {
        if (std::abs(beta0) >= kMaxPumpAmplitude)
            throw OverdriveError("pump |beta0| must stay below 0.25");
        if (gamma < 0.0) throw ConfigError("pump gamma must be >= 0");
    }
};

/// Integral of the squared pump envelope, (1 - exp(-gamma x)) / gamma,
/// with the gamma -> 0 limit x.
inline double loss_phase_integral(double gamma, double x) {
    const double gx = gamma * x;
    if (std::abs(gx) < 1e-12) return x * (1.0 - 0.5 * gx);
    return -std::expm1(-gx) / gamma;
}

/// Closed-form pump amplitudes at position x: exponential amplitude decay
/// with the accumulated self- and cross-phase modulation.
inline std::pair<std::complex<double>, std::complex<double>>
propagate(const std::pair<PumpState, PumpState>& pumps, double x) {
    const PumpState& a = pumps.first;
    const PumpState& b = pumps.second;
    const double na = std::norm(a.beta0);
    const double nb = std::norm(b.beta0);
    const double ea = loss_phase_integral(a.gamma, x);
    const double eb = loss_phase_integral(b.gamma, x);

    const double phase_a = a.k * (ea * na + 2.0 * eb * nb);
    const double phase_b = b.k * (eb * nb + 2.0 * ea * na);
    const std::complex<double> i1(0.0, 1.0);
    return {a.beta0 * std::exp(-0.5 * a.gamma * x + i1 * phase_a),
            b.beta0 * std::exp(-0.5 * b.gamma * x + i1 * phase_b)};
}

/// |beta(0)|^2 from generator power at the device input using the fitted
/// linear power law.
inline double calibrate_beta_from_power(double p_watts, double gamma_p, double k_p,
                                        double z, double c_p) {
    if (p_watts < 0.0) throw Error("pump power must be >= 0");
    if (!(c_p > 0.0)) throw Error("c_p must be > 0");
    const double beta_sq = c_p * p_watts / (k_p * loss_phase_integral(gamma_p, z));
    if (beta_sq >= kMaxPumpAmplitude * kMaxPumpAmplitude)
        throw OverdriveError("calibrated |beta| would reach 0.25");
    return beta_sq;
}

/// |beta(0)|^2 from the measured power-dependent phase shift accumulated
/// over the device in a single-pump configuration.
inline double beta_from_phase_shift(double delta_phi, double gamma_p, double k_p,
                                    double z) {
    if (delta_phi < 0.0) throw Error("phase shift must be >= 0");
    return delta_phi / (k_p * loss_phase_integral(gamma_p, z));
}

struct GainPoint {
    double power_watts;
    double gain_db;
};

/// Least-squares fit of the power-to-amplitude constant c_p against a
/// measured (or target) gain curve. The model maps (c_p, P) to gain in dB.
inline double fit_cp(const std::vector<GainPoint>& curve,
                     const std::function<double(double, double)>& gain_model_db,
                     double c_p_initial, int max_iter = 60) {
    if (curve.size() < 3) throw Error("fit_cp needs at least 3 gain points");
    if (!(c_p_initial > 0.0)) throw Error("fit_cp needs a positive initial c_p");

    // Damped Gauss-Newton on u = log(c_p); the single parameter keeps the
    // linear algebra scalar.
    double u = std::log(c_p_initial);
    auto cost = [&](double uu) {
        const double cp = std::exp(uu);
        double s = 0.0;
        for (const auto& pt : curve) {
            const double r = gain_model_db(cp, pt.power_watts) - pt.gain_db;
            s += r * r;
        }
        return 0.5 * s;
    };

    double f0 = cost(u);
    double lambda = 1e-3;
    int stall = 0;
    for (int it = 0; it < max_iter; ++it) {
        const double h = 1e-6;
        double jtj = 0.0, jtr = 0.0;
        const double cp = std::exp(u);
        const double cph = std::exp(u + h);
        for (const auto& pt : curve) {
            const double r = gain_model_db(cp, pt.power_watts) - pt.gain_db;
            const double rh = gain_model_db(cph, pt.power_watts) - pt.gain_db;
            const double j = (rh - r) / h;
            jtj += j * j;
            jtr += j * r;
        }
        if (std::sqrt(jtj) < 1e-14) break;
        bool improved = false;
        for (int trial = 0; trial < 12; ++trial) {
            const double step = -jtr / (jtj * (1.0 + lambda));
            const double f1 = cost(u + step);
            if (f1 < f0) {
                u += step;
                f0 = f1;
                lambda = std::max(lambda * 0.3, 1e-12);
                improved = true;
                break;
            }
            lambda *= 8.0;
        }
        if (!improved) {
            if (++stall >= 2) break;
        } else {
            stall = 0;
        }
        if (f0 < 1e-22) break;
    }
    if (!(f0 < cost(std::log(c_p_initial)) + 1e-18) && f0 > 1e-10)
        throw FitDivergence("fit_cp: residual failed to decrease");
    return std::exp(u);
}

} // namespace twpa
