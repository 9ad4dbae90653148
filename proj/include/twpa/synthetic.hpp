#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <vector>

#include "twpa/analysis.hpp"
#include "twpa/calibration.hpp"

namespace twpa {

/// Deterministic standard-normal stream. Box-Muller on explicit 64-bit
/// uniforms so that a given seed produces the same stream on every
/// platform, unlike std::normal_distribution.
class GaussianStream {
public:
    explicit GaussianStream(std::uint64_t seed) : rng_(seed) {}

    double next() {
        if (have_spare_) {
            have_spare_ = false;
            return spare_;
        }
        const double u1 = uniform();
        const double u2 = uniform();
        const double r = std::sqrt(-2.0 * std::log(u1));
        const double a = 2.0 * std::numbers::pi * u2;
        spare_ = r * std::sin(a);
        have_spare_ = true;
        return r * std::cos(a);
    }

private:
    double uniform() {
        // (0, 1]: guards the log.
        return (static_cast<double>(rng_() >> 11) + 1.0) * 0x1.0p-53;
    }
    std::mt19937_64 rng_;
    double spare_ = 0.0;
    bool have_spare_ = false;
};

/// I/Q cloud whose *sample* covariance matches the requested principal
/// variances and angle exactly: the raw draws are empirically whitened and
/// recolored, so the targets are hit to machine precision at any n.
inline std::vector<IqSample> exact_gaussian_cloud(std::size_t n, double var_min,
                                                  double var_max, double angle,
                                                  GaussianStream& g,
                                                  PumpSwitch pump = PumpSwitch::Off,
                                                  Channel channel = Channel::Single) {
    std::vector<double> xi(n), xq(n);
    double mi = 0.0, mq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        xi[k] = g.next();
        xq[k] = g.next();
        mi += xi[k];
        mq += xq[k];
    }
    mi /= n;
    mq /= n;
    double vii = 0.0, vqq = 0.0, viq = 0.0;
    for (std::size_t k = 0; k < n; ++k) {
        xi[k] -= mi;
        xq[k] -= mq;
        vii += xi[k] * xi[k];
        vqq += xq[k] * xq[k];
        viq += xi[k] * xq[k];
    }
    const double norm = 1.0 / (n - 1);
    vii *= norm;
    vqq *= norm;
    viq *= norm;

    // Cholesky whitening of the empirical covariance.
    const double l11 = std::sqrt(vii);
    const double l21 = viq / l11;
    const double l22 = std::sqrt(vqq - l21 * l21);
    const double c = std::cos(angle), s = std::sin(angle);
    const double smax = std::sqrt(var_max), smin = std::sqrt(var_min);

    std::vector<IqSample> out(n);
    for (std::size_t k = 0; k < n; ++k) {
        const double w1 = xi[k] / l11;
        const double w2 = (xq[k] - l21 * w1) / l22;
        const double a = smax * w1; // principal axis with the larger variance
        const double b = smin * w2;
        out[k] = IqSample{c * a - s * b, s * a + c * b, pump, channel};
    }
    return out;
}

/// Correlated signal/idler clouds of a two-mode squeezed vacuum in voltage
/// units: collective sums/differences have variances scale^2 e^{-2r} and
/// scale^2 e^{+2r} (vacuum 1/2 per quadrature maps to scale^2 / 2 mV^2).
/// The idler is rotated by idler_phase in its own I/Q plane.
inline std::pair<std::vector<IqSample>, std::vector<IqSample>>
two_mode_squeezed_pairs(std::size_t n, double r, double scale, double idler_phase,
                        GaussianStream& g) {
    std::vector<IqSample> signal(n), idler(n);
    const double sm = std::exp(-r) / std::sqrt(2.0);
    const double sp = std::exp(+r) / std::sqrt(2.0);
    const double c = std::cos(idler_phase), s = std::sin(idler_phase);
    for (std::size_t k = 0; k < n; ++k) {
        const double xp = sm * g.next() * scale; // squeezed: (Xs + Xi) / sqrt2
        const double xm = sp * g.next() * scale;
        const double pp = sp * g.next() * scale;
        const double pm = sm * g.next() * scale; // squeezed: (Ps - Pi) / sqrt2
        const double xs = (xp + xm) / std::sqrt(2.0);
        const double x_i = (xp - xm) / std::sqrt(2.0);
        const double ps = (pp + pm) / std::sqrt(2.0);
        const double p_i = (pp - pm) / std::sqrt(2.0);
        signal[k] = IqSample{xs, ps, PumpSwitch::On, Channel::Signal};
        // Rotate the idler by -idler_phase so the analyzer recovers it.
        idler[k] = IqSample{c * x_i + s * p_i, -s * x_i + c * p_i, PumpSwitch::On,
                            Channel::Idler};
    }
    return {signal, idler};
}

/// Synthetic SNTJ noise curve with multiplicative Gaussian noise.
inline std::vector<SntjPoint> synthetic_sntj_curve(double t, double t_noise, double gain,
                                                   double bandwidth, double f,
                                                   double v_span, std::size_t n_points,
                                                   double noise_frac, GaussianStream& g) {
    std::vector<SntjPoint> out;
    out.reserve(n_points);
    for (std::size_t i = 0; i < n_points; ++i) {
        const double v = -v_span + 2.0 * v_span * i / (n_points - 1);
        double p = sntj_model(v, t, t_noise, gain, bandwidth, f);
        p *= 1.0 + noise_frac * g.next();
        out.push_back(SntjPoint{v, p});
    }
    return out;
}

/// Synthetic wQED 2D transmission scan with additive complex noise.
inline WqedScan synthetic_wqed_scan(double gamma1, double gamma2,
                                    const std::vector<double>& omegas,
                                    double detuning_span, std::size_t n_detunings,
                                    double noise, GaussianStream& g) {
    WqedScan scan;
    for (std::size_t c = 0; c < n_detunings; ++c)
        scan.detunings.push_back(-detuning_span + 2.0 * detuning_span * c / (n_detunings - 1));
    for (std::size_t r = 0; r < omegas.size(); ++r) {
        scan.powers.push_back(static_cast<double>(r));
        for (double d : scan.detunings) {
            std::complex<double> t = wqed_transmission(d, omegas[r], gamma1, gamma2);
            t += noise * std::complex<double>(g.next(), g.next());
            scan.s21.push_back(t);
        }
    }
    return scan;
}

} // namespace twpa
