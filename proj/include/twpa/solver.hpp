#pragma once

#include <atomic>
#include <cmath>
#include <complex>
#include <functional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "twpa/circuit.hpp"
#include "twpa/errors.hpp"
#include "twpa/lossmodel.hpp"
#include "twpa/modeladder.hpp"
#include "twpa/ode.hpp"
#include "twpa/phasematch.hpp"
#include "twpa/pump.hpp"

namespace twpa {

/// Coupled-mode system matrices at one position. The full drift matrix of
/// the doubled vector [c, c+] is i K H - Gamma/2 with K = diag(I, -I) and
/// H = [[lambda1, lambda2], [lambda2*, lambda1*]].
struct SystemMatrices {
    Eigen::MatrixXcd lambda1; // n x n, Hermitian
    Eigen::MatrixXcd lambda2; // n x n, symmetric
    Eigen::VectorXd gamma;    // n, per-cell power loss rates

    Eigen::Index n_modes() const { return lambda1.rows(); }

    Eigen::MatrixXcd hamiltonian() const {
        const auto n = n_modes();
        Eigen::MatrixXcd h(2 * n, 2 * n);
        h.topLeftCorner(n, n) = lambda1;
        h.topRightCorner(n, n) = lambda2;
        h.bottomLeftCorner(n, n) = lambda2.conjugate();
        h.bottomRightCorner(n, n) = lambda1.conjugate();
        return h;
    }

    Eigen::MatrixXcd drift() const {
        const auto n = n_modes();
        const std::complex<double> i1(0.0, 1.0);
        Eigen::MatrixXcd a(2 * n, 2 * n);
        a.topLeftCorner(n, n) = i1 * lambda1;
        a.topRightCorner(n, n) = i1 * lambda2;
        a.bottomLeftCorner(n, n) = -i1 * lambda2.conjugate();
        a.bottomRightCorner(n, n) = -i1 * lambda1.conjugate();
        for (Eigen::Index m = 0; m < n; ++m) {
            a(m, m) -= 0.5 * gamma[m];
            a(n + m, n + m) -= 0.5 * gamma[m];
        }
        return a;
    }
};

inline Eigen::MatrixXcd k_metric(Eigen::Index n) {
    Eigen::VectorXcd d(2 * n);
    d.head(n).setConstant(1.0);
    d.tail(n).setConstant(-1.0);
    return d.asDiagonal();
}

/// Vacuum second moments [[0, I], [0, 0]] in the block layout
/// [[<c c>, <c c+>], [<c+ c>, <c+ c+>]].
inline Eigen::MatrixXcd vacuum_correlation(Eigen::Index n) {
    Eigen::MatrixXcd c = Eigen::MatrixXcd::Zero(2 * n, 2 * n);
    c.topRightCorner(n, n).setIdentity();
    return c;
}

/// System matrices for the physical device: couplings from the analytic
/// pump solution with exact accumulated phases, loss rates from the
/// profile. Mode frequencies must sit in passbands (StopbandError at
/// construction otherwise).
class CoupledModeSystem {
public:
    CoupledModeSystem(CircuitParams circuit, ModeSet modes,
                      std::pair<PumpState, PumpState> pumps, LossProfile loss)
        : circuit_(std::move(circuit)),
          modes_(std::move(modes)),
          pumps_(std::move(pumps)),
          loss_(std::move(loss)) {
        pumps_.first.validate();
        pumps_.second.validate();
        pumps_.first.k = wavevector(pumps_.first.freq, circuit_, 0.0).real();
        pumps_.second.k = wavevector(pumps_.second.freq, circuit_, 0.0).real();
        mode_k_.resize(modes_.size());
        for (int i = 0; i < modes_.size(); ++i)
            mode_k_[i] = wavevector(modes_.freqs[i], circuit_, 0.0).real();
    }

    int n_modes() const { return modes_.size(); }
    double length() const { return circuit_.n_cells; }
    const ModeSet& modes() const { return modes_; }
    const LossProfile& loss() const { return loss_; }
    const CircuitParams& circuit() const { return circuit_; }

    /// Assemble H(x) and Gamma(x). The coupling phases accumulate the
    /// instantaneous Kerr-shifted mismatch, i.e. each entry carries
    /// exp(i [bare mismatch * x + pump phases(x) - signal Kerr phases(x)]),
    /// which reduces to the constant-mismatch form for lossless pumps.
    SystemMatrices at(double x, const Eigen::VectorXd& photons) const {
        const int n = n_modes();
        SystemMatrices sys;
        sys.lambda1 = Eigen::MatrixXcd::Zero(n, n);
        sys.lambda2 = Eigen::MatrixXcd::Zero(n, n);
        sys.gamma.resize(n);

        const auto [b1, b2] = propagate(pumps_, x);
        const std::complex<double> b[2] = {b1, b2};
        const double kp[2] = {pumps_.first.k, pumps_.second.k};
        const double n10 = std::norm(pumps_.first.beta0);
        const double n20 = std::norm(pumps_.second.beta0);
        const double e1 = loss_phase_integral(pumps_.first.gamma, x);
        const double e2 = loss_phase_integral(pumps_.second.gamma, x);
        const std::complex<double> i1(0.0, 1.0);

        std::vector<double> psi(n);
        for (int i = 0; i < n; ++i)
            psi[i] = 2.0 * mode_k_[i] * (n10 * e1 + n20 * e2);

        for (int i = 0; i < n; ++i) {
            for (int p = 0; p < 2; ++p) {
                for (int q = 0; q < 2; ++q) {
                    if (p != q) {
                        const int j = modes_.pairings[i].fc[p][q];
                        if (j >= 0) {
                            const double phase = (mode_k_[j] - mode_k_[i] - kp[p] + kp[q]) * x +
                                                 psi[j] - psi[i];
                            sys.lambda1(i, j) += 2.0 * std::conj(b[p]) * b[q] *
                                                 std::sqrt(mode_k_[i] * mode_k_[j]) *
                                                 std::exp(i1 * phase);
                        }
                    }
                    const int j = modes_.pairings[i].sq[p][q];
                    if (j >= 0) {
                        const double phase = (kp[p] + kp[q] - mode_k_[i] - mode_k_[j]) * x -
                                             psi[i] - psi[j];
                        sys.lambda2(i, j) += b[p] * b[q] *
                                             std::sqrt(mode_k_[i] * mode_k_[j]) *
                                             std::exp(i1 * phase);
                    }
                }
            }
            sys.gamma[i] = gamma_at(modes_.freqs[i], x, photons.size() > i ? photons[i] : 0.0,
                                    loss_, circuit_.n_cells);
        }
        return sys;
    }

    std::function<SystemMatrices(double, const Eigen::VectorXd&)> fn() const {
        return [self = *this](double x, const Eigen::VectorXd& ph) {
            return self.at(x, ph);
        };
    }

private:
    CircuitParams circuit_;
    ModeSet modes_;
    std::pair<PumpState, PumpState> pumps_;
    LossProfile loss_;
    std::vector<double> mode_k_;
};

using SystemFn = std::function<SystemMatrices(double, const Eigen::VectorXd&)>;

struct SolveOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    bool fundamental = false; // co-integrate the 2n x 2n mean-field propagator
    int checkpoints = 0;      // number of interior callback positions
    std::function<void(double, const Eigen::MatrixXcd&)> on_checkpoint;
    // Lumped end loss in dB applied after propagation (0 = none); filled in
    // automatically when solving a CoupledModeSystem with that profile.
    double lumped_end_db = 0.0;
};

struct SolveResult {
    Eigen::MatrixXcd corr;       // C(z)
    Eigen::MatrixXcd propagator; // mean-field M(z) when requested
};

/// Integrate the second moments (and optionally the mean-field propagator)
/// from vacuum input at x = 0 to x = z. Saturable loss rates are evaluated
/// from the concomitant <c+ c> diagonal of the running state.
inline SolveResult solve_moments(const SystemFn& system, int n_modes, double z,
                                 const SolveOptions& opt = {}) {
    const int n = n_modes;
    const int d = 2 * n;
    const int corr_len = d * d;
    const int len = corr_len + (opt.fundamental ? d * d : 0);

    Eigen::VectorXcd y(len);
    Eigen::Map<Eigen::MatrixXcd>(y.data(), d, d) = vacuum_correlation(n);
    if (opt.fundamental)
        Eigen::Map<Eigen::MatrixXcd>(y.data() + corr_len, d, d).setIdentity();

    Eigen::VectorXd photons(n);
    auto rhs = [&](double x, const Eigen::VectorXcd& state, Eigen::VectorXcd& deriv) {
        deriv.resize(state.size());
        const Eigen::Map<const Eigen::MatrixXcd> c(state.data(), d, d);
        for (int i = 0; i < n; ++i)
            photons[i] = std::max(0.0, c(n + i, i).real());
        const SystemMatrices sys = system(x, photons);
        const Eigen::MatrixXcd a = sys.drift();

        Eigen::Map<Eigen::MatrixXcd> dc(deriv.data(), d, d);
        dc = a * c + c * a.transpose();
        for (int i = 0; i < n; ++i) dc(i, n + i) += sys.gamma[i];

        if (opt.fundamental) {
            const Eigen::Map<const Eigen::MatrixXcd> m(state.data() + corr_len, d, d);
            Eigen::Map<Eigen::MatrixXcd>(deriv.data() + corr_len, d, d) = a * m;
        }
    };

    OdeOptions ode;
    ode.rel_tol = opt.rel_tol;
    ode.abs_tol = opt.abs_tol;

    if (opt.checkpoints > 0 && opt.on_checkpoint) {
        for (int k = 1; k <= opt.checkpoints; ++k) {
            const double x0 = z * (k - 1) / opt.checkpoints;
            const double x1 = z * k / opt.checkpoints;
            integrate_adaptive(rhs, y, x0, x1, ode);
            opt.on_checkpoint(x1, Eigen::Map<Eigen::MatrixXcd>(y.data(), d, d));
        }
    } else {
        integrate_adaptive(rhs, y, 0.0, z, ode);
    }

    SolveResult result;
    result.corr = Eigen::Map<Eigen::MatrixXcd>(y.data(), d, d);
    if (opt.fundamental)
        result.propagator = Eigen::Map<Eigen::MatrixXcd>(y.data() + corr_len, d, d);

    if (opt.lumped_end_db < 0.0) {
        result.corr = lumped_end_loss(result.corr, opt.lumped_end_db);
        if (opt.fundamental)
            result.propagator *=
                std::sqrt(power_ratio_from_db(opt.lumped_end_db));
    }
    return result;
}

inline SolveResult solve_moments(const CoupledModeSystem& system, SolveOptions opt = {}) {
    if (system.loss().kind == LossKind::LumpedAtEnd)
        opt.lumped_end_db = system.loss().total_db;
    return solve_moments(system.fn(), system.n_modes(), system.length(), opt);
}

struct MeanGain {
    std::complex<double> g{0.0, 0.0};
    double power_gain = 0.0;
    double gain_db = 0.0;
};

/// Amplitude gain g = <c_0(z)> / alpha for a coherent seed alpha on mode 0.
inline MeanGain mean_gain_from_propagator(const Eigen::MatrixXcd& m,
                                          std::complex<double> alpha) {
    if (alpha == std::complex<double>(0.0, 0.0))
        throw Error("mean gain needs a nonzero input amplitude");
    const auto n = m.rows() / 2;
    MeanGain out;
    out.g = m(0, 0) + m(0, n) * std::conj(alpha) / alpha;
    out.power_gain = std::norm(out.g);
    out.gain_db = db_from_power_ratio(out.power_gain);
    return out;
}

inline MeanGain integrate_mean(const CoupledModeSystem& system, std::complex<double> alpha,
                               SolveOptions opt = {}) {
    opt.fundamental = true;
    const SolveResult r = solve_moments(system, opt);
    return mean_gain_from_propagator(r.propagator, alpha);
}

struct PhaseSensitiveGain {
    std::vector<double> theta;
    std::vector<double> gain_db;
    double pser_db = 0.0;
};

/// Phase-sensitive gain G(theta) of the degenerate center mode and the
/// extinction ratio between maximal amplification and deamplification.
inline PhaseSensitiveGain phase_sensitive_gain(const Eigen::MatrixXcd& m,
                                               int n_theta = 360) {
    const auto n = m.rows() / 2;
    const std::complex<double> u = m(0, 0);
    const std::complex<double> w = m(0, n);
    PhaseSensitiveGain out;
    out.theta.reserve(n_theta);
    out.gain_db.reserve(n_theta);
    const std::complex<double> i1(0.0, 1.0);
    for (int t = 0; t < n_theta; ++t) {
        const double th = 2.0 * std::numbers::pi * t / n_theta;
        const double g = std::norm(u * std::exp(i1 * th) + w * std::exp(-i1 * th));
        out.theta.push_back(th);
        out.gain_db.push_back(db_from_power_ratio(g));
    }
    const double gmax = std::norm(std::abs(u) + std::abs(w));
    const double gmin = std::norm(std::abs(u) - std::abs(w));
    out.pser_db = db_from_power_ratio(gmax / std::max(gmin, 1e-300));
    return out;
}

inline PhaseSensitiveGain phase_sensitive_gain(const CoupledModeSystem& system,
                                               int n_theta = 360, SolveOptions opt = {}) {
    opt.fundamental = true;
    const SolveResult r = solve_moments(system, opt);
    return phase_sensitive_gain(r.propagator, n_theta);
}

/// Quadrature variances at the optimal squeezing angle. Vacuum-normalized:
/// both the single-mode (i = j) and joint (i != j) variance equal 1/2 for
/// vacuum input, so the dB values are relative to vacuum in both cases.
struct SqueezeResult {
    double theta_opt = 0.0;
    double var_min = 0.5;
    double var_max = 0.5;
    double s_min_db = 0.0;
    double s_max_db = 0.0;
    double purity = 1.0;
};

inline SqueezeResult squeeze(const Eigen::MatrixXcd& corr, int i, int j) {
    const auto n = corr.rows() / 2;
    if (i < 0 || j < 0 || i >= n || j >= n)
        throw Error("squeeze: mode index out of range");

    const int idx[2] = {i, j};
    std::complex<double> sum_cc(0.0, 0.0);   // <c c>
    std::complex<double> sum_hold(0.0, 0.0); // <c c+> + <c+ c>
    std::complex<double> sum_pp(0.0, 0.0);   // <c+ c+>
    for (int a = 0; a < 2; ++a) {
        for (int b = 0; b < 2; ++b) {
            const int ia = idx[a], jb = idx[b];
            sum_cc += corr(ia, jb);
            sum_hold += corr(ia, n + jb) + corr(n + ia, jb);
            sum_pp += corr(n + ia, n + jb);
        }
    }
    const double scale = (i == j) ? 0.125 : 0.25; // vacuum -> 1/2 in both cases

    const std::complex<double> pair = corr(n + i, n + j);
    const double theta = (std::abs(pair) > 0.0) ? -std::arg(pair) : 0.0;
    const std::complex<double> i1(0.0, 1.0);
    auto variance = [&](double th) {
        const std::complex<double> v =
            sum_hold - std::exp(i1 * th) * sum_pp - std::exp(-i1 * th) * sum_cc;
        return scale * v.real();
    };

    SqueezeResult out;
    out.theta_opt = theta;
    out.var_min = variance(theta);
    out.var_max = variance(theta + std::numbers::pi);
    if (out.var_min > out.var_max) std::swap(out.var_min, out.var_max);
    out.s_min_db = db_from_power_ratio(out.var_min / 0.5);
    out.s_max_db = db_from_power_ratio(out.var_max / 0.5);
    out.purity = 0.5 / std::sqrt(out.var_min * out.var_max);
    return out;
}

struct SweepPoint {
    double p2_nw = 0.0;
    double f_signal_ghz = 0.0;
    double gain_db = 0.0;
    double s_min_db = 0.0;
    double s_max_db = 0.0;
    double purity = 1.0;
    std::string loss_model;
    std::string error; // nonempty when this grid point failed
};

struct SweepConfig {
    enum class Param { Pump2Power, SignalFreq };
    Param param = Param::Pump2Power;
    std::vector<double> values; // nW for Pump2Power, GHz for SignalFreq

    CircuitParams circuit;
    LossProfile loss;
    double p1_nw = 0.0;
    double p2_nw = 0.0;         // fixed pump 2 power for SignalFreq sweeps
    double f_signal_ghz = 0.0;  // fixed signal for Pump2Power sweeps (0 = center)
    double c_p1 = 0.0, c_p2 = 0.0;
    double pump_gamma1 = 0.0, pump_gamma2 = 0.0;
    int ladder_depth = 0;
    double rel_tol = 1e-10, abs_tol = 1e-12;
    int threads = 1;
};

inline SweepPoint sweep_point(const SweepConfig& cfg, double value) {
    SweepPoint row;
    row.loss_model = to_string(cfg.loss.kind);
    const double fc = 0.5 * (cfg.circuit.pump_freqs[0] + cfg.circuit.pump_freqs[1]);
    double p2_nw = cfg.p2_nw;
    double f_sig = cfg.f_signal_ghz > 0.0 ? cfg.f_signal_ghz * 1e9 : fc;
    if (cfg.param == SweepConfig::Param::Pump2Power)
        p2_nw = value;
    else
        f_sig = value * 1e9;
    row.p2_nw = p2_nw;
    row.f_signal_ghz = f_sig * 1e-9;

    try {
        const double z = cfg.circuit.n_cells;
        PumpState pump1{cfg.circuit.pump_freqs[0], 0.0, cfg.pump_gamma1, cfg.c_p1, 0.0};
        PumpState pump2{cfg.circuit.pump_freqs[1], 0.0, cfg.pump_gamma2, cfg.c_p2, 0.0};
        pump1.k = wavevector(pump1.freq, cfg.circuit, 0.0).real();
        pump2.k = wavevector(pump2.freq, cfg.circuit, 0.0).real();
        pump1.beta0 = std::sqrt(
            calibrate_beta_from_power(cfg.p1_nw * 1e-9, pump1.gamma, pump1.k, z, cfg.c_p1));
        pump2.beta0 = std::sqrt(
            calibrate_beta_from_power(p2_nw * 1e-9, pump2.gamma, pump2.k, z, cfg.c_p2));

        const ModeSet modes = build_modes(f_sig, cfg.circuit.pump_freqs[0],
                                          cfg.circuit.pump_freqs[1], cfg.ladder_depth);
        CoupledModeSystem system(cfg.circuit, modes, {pump1, pump2}, cfg.loss);

        SolveOptions opt;
        opt.rel_tol = cfg.rel_tol;
        opt.abs_tol = cfg.abs_tol;
        opt.fundamental = true;
        if (cfg.loss.kind == LossKind::LumpedAtEnd) opt.lumped_end_db = cfg.loss.total_db;
        const SolveResult sol = solve_moments(system.fn(), system.n_modes(), z, opt);

        row.gain_db = mean_gain_from_propagator(sol.propagator, 1.0).gain_db;
        const int partner = modes.pairings[0].sq[0][1];
        const SqueezeResult sq =
            squeeze(sol.corr, 0, partner >= 0 ? partner : 0);
        row.s_min_db = sq.s_min_db;
        row.s_max_db = sq.s_max_db;
        row.purity = sq.purity;
    } catch (const Error& e) {
        row.error = e.what();
    }
    return row;
}

/// Evaluate every grid point; failures are recorded per row and the sweep
/// continues. Output order follows the grid regardless of thread count.
inline std::vector<SweepPoint> sweep(const SweepConfig& cfg) {
    std::vector<SweepPoint> rows(cfg.values.size());
    const int n_threads = std::max(1, cfg.threads);
    if (n_threads == 1) {
        for (std::size_t i = 0; i < cfg.values.size(); ++i)
            rows[i] = sweep_point(cfg, cfg.values[i]);
        return rows;
    }
    std::vector<std::thread> pool;
    std::atomic<std::size_t> next{0};
    for (int t = 0; t < n_threads; ++t) {
        pool.emplace_back([&] {
            for (std::size_t i = next.fetch_add(1); i < cfg.values.size();
                 i = next.fetch_add(1))
                rows[i] = sweep_point(cfg, cfg.values[i]);
        });
    }
    for (auto& th : pool) th.join();
    return rows;
}

} // namespace twpa
