#pragma once

#include <array>
#include <cmath>
#include <complex>
#include <optional>
#include <string>

#include "twpa/circuit.hpp"
#include "twpa/errors.hpp"

namespace twpa {

inline constexpr double kMaxPumpAmplitude = 0.25; // beta = I/4Ic keeps I < Ic

/// Five four-wave-mixing processes of the dual-pump device: the wanted
/// parametric amplification plus the four parasitic ones.
enum class ProcessKind { PA, DFWM1, DFWM2, FC1, FC2 };

inline const char* to_string(ProcessKind k) {
    switch (k) {
        case ProcessKind::PA: return "PA";
        case ProcessKind::DFWM1: return "DFWM1";
        case ProcessKind::DFWM2: return "DFWM2";
        case ProcessKind::FC1: return "FC1";
        case ProcessKind::FC2: return "FC2";
    }
    return "?";
}

/// Partner (idler) frequency of a process for signal frequency f_s.
inline double process_idler(ProcessKind kind, double f_s, double pump1, double pump2) {
    switch (kind) {
        case ProcessKind::PA: return pump1 + pump2 - f_s;
        case ProcessKind::DFWM1: return 2.0 * pump1 - f_s;
        case ProcessKind::DFWM2: return 2.0 * pump2 - f_s;
        case ProcessKind::FC1: return f_s - (pump2 - pump1);
        case ProcessKind::FC2: return f_s + (pump2 - pump1);
    }
    return 0.0;
}

/// Dimensionless pump amplitudes at one position along the line.
struct PumpAmplitudes {
    std::complex<double> b1{0.0, 0.0};
    std::complex<double> b2{0.0, 0.0};

    double mag1_sq() const { return std::norm(b1); }
    double mag2_sq() const { return std::norm(b2); }
};

inline void require_drivable(const PumpAmplitudes& b) {
    if (std::abs(b.b1) >= kMaxPumpAmplitude || std::abs(b.b2) >= kMaxPumpAmplitude)
        throw OverdriveError("pump amplitude |beta| must stay below 0.25");
}

enum class WaveRole { Signal, Pump1, Pump2 };

/// Kerr-shifted wavevector: signal-band modes acquire twice the cross-phase
/// shift of each pump, each pump acquires its self-phase plus twice the
/// other pump's cross-phase contribution.
inline double nonlinear_wavevector(double f, WaveRole role, const PumpAmplitudes& betas,
                                   const CircuitParams& params) {
    require_drivable(betas);
    const double k = wavevector(f, params, 0.0).real();
    const double p1 = betas.mag1_sq();
    const double p2 = betas.mag2_sq();
    switch (role) {
        case WaveRole::Signal: return (1.0 + 2.0 * (p1 + p2)) * k;
        case WaveRole::Pump1: return (1.0 + p1 + 2.0 * p2) * k;
        case WaveRole::Pump2: return (1.0 + p2 + 2.0 * p1) * k;
    }
    return k;
}

/// Phase mismatch of one process, split into the bare dispersion part and
/// the per-pump Kerr contributions (delta_k = bare + kerr_pump1 + kerr_pump2
/// exactly, since the Kerr shifts are linear in each |beta|^2).
struct MismatchReport {
    ProcessKind process = ProcessKind::PA;
    double f_signal = 0.0; // Hz
    double f_idler = 0.0;  // Hz
    double delta_k = 0.0;  // rad/cell
    double bare = 0.0;
    double kerr_pump1 = 0.0;
    double kerr_pump2 = 0.0;
};

namespace detail {

inline double process_mismatch(ProcessKind kind, double f_s, const PumpAmplitudes& betas,
                               const CircuitParams& params) {
    const double o1 = params.pump_freqs[0];
    const double o2 = params.pump_freqs[1];
    const double f_i = process_idler(kind, f_s, o1, o2);
    if (f_i <= 0.0)
        throw Error("process idler frequency is not positive");
    const double ks = nonlinear_wavevector(f_s, WaveRole::Signal, betas, params);
    const double k1 = nonlinear_wavevector(o1, WaveRole::Pump1, betas, params);
    const double k2 = nonlinear_wavevector(o2, WaveRole::Pump2, betas, params);
    switch (kind) {
        case ProcessKind::PA:
            return k1 + k2 - ks - nonlinear_wavevector(f_i, WaveRole::Signal, betas, params);
        case ProcessKind::DFWM1:
            return 2.0 * k1 - ks - nonlinear_wavevector(f_i, WaveRole::Signal, betas, params);
        case ProcessKind::DFWM2:
            return 2.0 * k2 - ks - nonlinear_wavevector(f_i, WaveRole::Signal, betas, params);
        case ProcessKind::FC1:
            return ks - nonlinear_wavevector(f_i, WaveRole::Signal, betas, params) - (k2 - k1);
        case ProcessKind::FC2:
            return ks - nonlinear_wavevector(f_i, WaveRole::Signal, betas, params) - (k1 - k2);
    }
    return 0.0;
}

} // namespace detail

inline MismatchReport delta_k(ProcessKind kind, double f_s, const PumpAmplitudes& betas,
                              const CircuitParams& params) {
    MismatchReport rep;
    rep.process = kind;
    rep.f_signal = f_s;
    rep.f_idler = process_idler(kind, f_s, params.pump_freqs[0], params.pump_freqs[1]);
    rep.bare = detail::process_mismatch(kind, f_s, PumpAmplitudes{}, params);
    const PumpAmplitudes only1{betas.b1, 0.0};
    const PumpAmplitudes only2{0.0, betas.b2};
    rep.kerr_pump1 = detail::process_mismatch(kind, f_s, only1, params) - rep.bare;
    rep.kerr_pump2 = detail::process_mismatch(kind, f_s, only2, params) - rep.bare;
    rep.delta_k = rep.bare + rep.kerr_pump1 + rep.kerr_pump2;
    return rep;
}

/// One frequency-conversion or pair-creation coupling: strength and the
/// Kerr-corrected phase mismatch of the paired mode.
struct CouplingEntry {
    std::complex<double> lambda{0.0, 0.0}; // rad/cell
    double delta_k = 0.0;                  // rad/cell
    double partner_freq = 0.0;             // Hz
};

/// All couplings of one signal-band frequency to its pump-generated
/// partners. Entries whose partner frequency is nonpositive or falls in a
/// stop band are absent.
struct Couplings {
    std::array<std::array<std::optional<CouplingEntry>, 2>, 2> fc; // [p][q]
    std::array<std::array<std::optional<CouplingEntry>, 2>, 2> sq; // [p][q]
};

inline Couplings couplings(double f, const PumpAmplitudes& betas,
                           const CircuitParams& params) {
    require_drivable(betas);
    const double o[2] = {params.pump_freqs[0], params.pump_freqs[1]};
    const std::complex<double> b[2] = {betas.b1, betas.b2};
    const double k_f = wavevector(f, params, 0.0).real();
    const double kp[2] = {
        nonlinear_wavevector(o[0], WaveRole::Pump1, betas, params),
        nonlinear_wavevector(o[1], WaveRole::Pump2, betas, params)};
    const double ks = nonlinear_wavevector(f, WaveRole::Signal, betas, params);

    Couplings out;
    for (int p = 0; p < 2; ++p) {
        for (int q = 0; q < 2; ++q) {
            const double f_fc = f + o[p] - o[q];
            if (f_fc > 0.0 && !in_stopband(f_fc, params)) {
                const double k_partner = wavevector(f_fc, params, 0.0).real();
                CouplingEntry e;
                e.partner_freq = f_fc;
                e.lambda = std::conj(b[p]) * b[q] * std::sqrt(k_f * k_partner);
                e.delta_k = -ks + nonlinear_wavevector(f_fc, WaveRole::Signal, betas, params) -
                            kp[p] + kp[q];
                out.fc[p][q] = e;
            }
            const double f_sq = o[p] + o[q] - f;
            if (f_sq > 0.0 && !in_stopband(f_sq, params)) {
                const double k_partner = wavevector(f_sq, params, 0.0).real();
                CouplingEntry e;
                e.partner_freq = f_sq;
                e.lambda = b[p] * b[q] * std::sqrt(k_f * k_partner);
                e.delta_k = -ks - nonlinear_wavevector(f_sq, WaveRole::Signal, betas, params) +
                            kp[p] + kp[q];
                out.sq[p][q] = e;
            }
        }
    }
    return out;
}

} // namespace twpa
