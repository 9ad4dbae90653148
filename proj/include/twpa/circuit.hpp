#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "twpa/constants.hpp"
#include "twpa/errors.hpp"
#include "twpa/units.hpp"

namespace twpa {

/// Interleaved LC phase-matching resonator bank coupled to the line.
struct ResonatorBank {
    double f_res = 0.0;            // bare resonance, Hz
    double c_res = 0.0;            // resonator capacitance, F
    double c_couple = 0.0;         // coupling capacitance, F
    double insertion_period = 10.0; // one resonator every this many cells

    double inductance() const {
        const double w = angular(f_res);
        return 1.0 / (w * w * c_res);
    }
};

/// Linear electromagnetic model of the loaded junction transmission line.
/// Unit-cell length is 1 by convention: wavevectors are rad/cell and the
/// device length equals n_cells.
struct CircuitParams {
    double n_cells = 0.0;
    double c_ground = 0.0;   // F
    double i_critical = 0.0; // A
    double c_junction = 0.0; // F, junction shunt, may be 0
    double tan_delta = 0.0;
    std::vector<ResonatorBank> resonators;
    std::array<double, 2> pump_freqs{0.0, 0.0}; // Hz, ordinary frequency

    double junction_inductance() const {
        return kFluxQuantum / (2.0 * std::numbers::pi * i_critical);
    }

    void validate() const {
        if (!(n_cells > 0.0)) throw ConfigError("n_cells must be > 0");
        if (!(c_ground > 0.0)) throw ConfigError("c_ground must be > 0");
        if (!(i_critical > 0.0)) throw ConfigError("i_critical must be > 0");
        if (tan_delta < 0.0) throw ConfigError("tan_delta must be >= 0");
        if (c_junction < 0.0) throw ConfigError("c_junction must be >= 0");
        for (const auto& r : resonators) {
            if (!(r.f_res > 0.0) || !(r.c_res > 0.0))
                throw ConfigError("resonator f_res and c_res must be > 0");
            if (r.c_couple < 0.0) throw ConfigError("c_couple must be >= 0");
            if (r.insertion_period < 1.0)
                throw ConfigError("insertion_period must be >= 1");
        }
    }
};

/// Complex wavevector in rad/cell. Forward-propagating convention with
/// Im(k) >= 0, so that |exp(i k x)| <= 1 along the line.
struct Wavevector {
    std::complex<double> value;

    double real() const { return value.real(); }
    double imag() const { return value.imag(); }
};

namespace detail {

// Square of the resonator loading factor xi. Each capacitor C enters as
// C (1 - i tan_delta); the per-bank weight carries the insertion period.
inline std::complex<double> xi_squared(double w, const CircuitParams& p,
                                       std::complex<double> lossy) {
    std::complex<double> xi2 = 1.0;
    for (const auto& r : p.resonators) {
        const double weight = r.c_couple / (r.insertion_period * p.c_ground);
        const double lr = r.inductance();
        const std::complex<double> num = 1.0 - w * w * lr * r.c_res * lossy;
        const std::complex<double> den =
            1.0 - w * w * lr * (r.c_res + r.c_couple) * lossy;
        xi2 += weight * (num / den - 1.0);
    }
    return xi2;
}

} // namespace detail

/// Wavevector of the loaded line at ordinary frequency f. The optional
/// override replaces the circuit loss tangent (0 gives the lossless
/// dispersion). Throws StopbandError inside a resonator stop band.
inline Wavevector wavevector(double f, const CircuitParams& params,
                             std::optional<double> tan_delta_override = std::nullopt) {
    if (f < 0.0) throw Error("wavevector: negative frequency");
    const double td = tan_delta_override.value_or(params.tan_delta);
    const std::complex<double> lossy(1.0, -td);
    const double w = angular(f);
    const double lj = params.junction_inductance();

    const std::complex<double> xi2 = detail::xi_squared(w, params, lossy);
    const std::complex<double> series =
        w * w * lj * params.c_ground * lossy /
        (1.0 - w * w * lj * params.c_junction * lossy);
    const std::complex<double> radicand = series * xi2;

    if (radicand.real() < 0.0) {
        throw StopbandError("frequency " + std::to_string(f * 1e-9) +
                            " GHz lies inside a resonator stop band");
    }
    std::complex<double> k = std::sqrt(radicand);
    if (k.imag() < 0.0) k = std::conj(k); // decaying forward wave
    return Wavevector{k};
}

struct InsertionLoss {
    double per_cell_db;
    double total_db;
};

/// Transmission magnitude 20 log10 |exp(i k n_cells)| of the undriven line.
inline InsertionLoss insertion_loss_db(double f, const CircuitParams& params) {
    const Wavevector k = wavevector(f, params);
    const double per_cell = -20.0 / std::numbers::ln10 * k.imag();
    return InsertionLoss{per_cell, per_cell * params.n_cells};
}

/// True if f lies inside a stop band (radicand of the dispersion relation
/// has negative real part).
inline bool in_stopband(double f, const CircuitParams& params) {
    try {
        wavevector(f, params, 0.0);
        return false;
    } catch (const StopbandError&) {
        return true;
    }
}

} // namespace twpa
