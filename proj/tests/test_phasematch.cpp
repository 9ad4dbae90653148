#include <catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "device_fixture.hpp"
#include "twpa/phasematch.hpp"

using namespace twpa;
using Catch::Approx;

TEST_CASE("kerr shift vanishes with pumps off") {
    const auto params = test_device();
    const double f = 6.7e9;
    const double k0 = wavevector(f, params, 0.0).real();
    CHECK(nonlinear_wavevector(f, WaveRole::Signal, {}, params) == Approx(k0));
    CHECK(nonlinear_wavevector(f, WaveRole::Pump1, {}, params) == Approx(k0));
}

TEST_CASE("kerr coefficients for signal and pump roles") {
    const auto params = test_device();
    const double f = 6.7e9;
    const double k0 = wavevector(f, params, 0.0).real();
    const PumpAmplitudes both{0.1, 0.1};
    CHECK(nonlinear_wavevector(f, WaveRole::Signal, both, params) ==
          Approx(1.04 * k0).epsilon(1e-12));
    const PumpAmplitudes only1{0.1, 0.0};
    CHECK(nonlinear_wavevector(f, WaveRole::Pump1, only1, params) ==
          Approx(1.01 * k0).epsilon(1e-12));
    CHECK(nonlinear_wavevector(f, WaveRole::Pump2, only1, params) ==
          Approx(1.02 * k0).epsilon(1e-12));
}

TEST_CASE("overdrive is rejected") {
    const auto params = test_device();
    CHECK_THROWS_AS(nonlinear_wavevector(6.7e9, WaveRole::Signal, {0.25, 0.0}, params),
                    OverdriveError);
    CHECK_THROWS_AS(couplings(6.7e9, {0.0, 0.3}, params), OverdriveError);
}

TEST_CASE("dispersionless toy line cancels the bare PA mismatch") {
    auto params = test_device();
    params.resonators.clear();
    params.c_junction = 0.0;
    const double fc = test_center_freq();
    const auto rep = delta_k(ProcessKind::PA, fc, {}, params);
    CHECK(rep.bare == Approx(0.0).margin(1e-15));
    CHECK(rep.delta_k == Approx(0.0).margin(1e-15));
}

TEST_CASE("bare PA mismatch is the wavevector sum rule") {
    const auto params = test_device();
    const double fs = 6.0e9;
    const double fi = params.pump_freqs[0] + params.pump_freqs[1] - fs;
    const auto rep = delta_k(ProcessKind::PA, fs, {}, params);
    const double expected = wavevector(params.pump_freqs[0], params, 0.0).real() +
                            wavevector(params.pump_freqs[1], params, 0.0).real() -
                            wavevector(fs, params, 0.0).real() -
                            wavevector(fi, params, 0.0).real();
    CHECK(rep.delta_k == Approx(expected).epsilon(1e-12));
    CHECK(rep.kerr_pump1 == 0.0);
    CHECK(rep.kerr_pump2 == 0.0);
}

TEST_CASE("components sum exactly to the total mismatch") {
    const auto params = test_device();
    const PumpAmplitudes betas{0.12, 0.17};
    for (ProcessKind kind : {ProcessKind::PA, ProcessKind::DFWM1, ProcessKind::DFWM2,
                             ProcessKind::FC1, ProcessKind::FC2}) {
        const auto rep = delta_k(kind, 6.4e9, betas, params);
        CHECK(rep.delta_k ==
              Approx(rep.bare + rep.kerr_pump1 + rep.kerr_pump2).epsilon(1e-12));
    }
}

TEST_CASE("PA beats every parasitic process across the signal band") {
    const auto params = test_device();
    // Operating-point amplitudes: fixed pump 1 with pump 2 near the top of
    // the squeezing sweep, where the dispersion engineering pays off.
    const PumpAmplitudes betas{0.12, 0.24};
    for (double fs = 5.9e9; fs <= 7.5e9; fs += 0.1e9) {
        const double pa = std::abs(delta_k(ProcessKind::PA, fs, betas, params).delta_k);
        for (ProcessKind kind : {ProcessKind::DFWM1, ProcessKind::DFWM2, ProcessKind::FC1,
                                 ProcessKind::FC2}) {
            const double other = std::abs(delta_k(kind, fs, betas, params).delta_k);
            CHECK(pa < other);
        }
    }
}

TEST_CASE("PA and DFWM mismatches are even about their process centers") {
    const auto params = test_device();
    const PumpAmplitudes betas{0.1, 0.15};
    const double fc = test_center_freq();
    for (double delta = 0.05e9; delta <= 0.8e9; delta += 0.25e9) {
        const auto plus = delta_k(ProcessKind::PA, fc + delta, betas, params);
        const auto minus = delta_k(ProcessKind::PA, fc - delta, betas, params);
        CHECK(plus.delta_k == Approx(minus.delta_k).epsilon(1e-12));
    }
    // DFWM1 is centered on pump 1: signal and idler swap under reflection.
    const double o1 = params.pump_freqs[0];
    for (double delta = 0.3e9; delta <= 0.9e9; delta += 0.3e9) {
        const auto plus = delta_k(ProcessKind::DFWM1, o1 + delta, betas, params);
        const auto minus = delta_k(ProcessKind::DFWM1, o1 - delta, betas, params);
        CHECK(plus.delta_k == Approx(minus.delta_k).epsilon(1e-12));
    }
}

TEST_CASE("FC1 and FC2 are antisymmetric mirror processes") {
    const auto params = test_device();
    const PumpAmplitudes betas{0.1, 0.15};
    const double sep = params.pump_freqs[1] - params.pump_freqs[0];
    for (double fs = 6.2e9; fs <= 7.2e9; fs += 0.2e9) {
        const auto fc1 = delta_k(ProcessKind::FC1, fs, betas, params);
        const auto fc2 = delta_k(ProcessKind::FC2, fs - sep, betas, params);
        CHECK(fc1.delta_k == Approx(-fc2.delta_k).epsilon(1e-12));
    }
}

TEST_CASE("couplings vanish with pumps off") {
    const auto params = test_device();
    const auto c = couplings(6.7e9, {}, params);
    for (int p = 0; p < 2; ++p)
        for (int q = 0; q < 2; ++q) {
            REQUIRE(c.sq[p][q].has_value());
            CHECK(std::abs(c.sq[p][q]->lambda) == 0.0);
            REQUIRE(c.fc[p][q].has_value());
            CHECK(std::abs(c.fc[p][q]->lambda) == 0.0);
        }
}

TEST_CASE("degenerate center-mode pair coupling collapses to beta1 beta2 k") {
    const auto params = test_device();
    const double fc = test_center_freq();
    const PumpAmplitudes betas{0.08, 0.11};
    const auto c = couplings(fc, betas, params);
    const double k = wavevector(fc, params, 0.0).real();
    REQUIRE(c.sq[0][1].has_value());
    CHECK(c.sq[0][1]->partner_freq == Approx(fc));
    CHECK(std::abs(c.sq[0][1]->lambda - betas.b1 * betas.b2 * k) < 1e-15);
}

TEST_CASE("two-mode pair coupling matches the closed form") {
    // Oracle: independent evaluation of beta1 beta2 sqrt(k_s k_i) for a
    // detuned signal/idler pair.
    const auto params = test_device();
    const double fc = test_center_freq();
    const double delta = 0.187e9;
    const std::complex<double> b1(0.06, 0.02), b2(0.10, -0.03);
    const PumpAmplitudes betas{b1, b2};
    const auto c = couplings(fc - delta, betas, params);
    const double ks = wavevector(fc - delta, params, 0.0).real();
    const double ki = wavevector(fc + delta, params, 0.0).real();
    REQUIRE(c.sq[0][1].has_value());
    CHECK(c.sq[0][1]->partner_freq == Approx(fc + delta));
    CHECK(std::abs(c.sq[0][1]->lambda - b1 * b2 * std::sqrt(ks * ki)) < 1e-14);
    // fc coupling uses the conjugated first pump amplitude.
    REQUIRE(c.fc[1][0].has_value());
    const double kconv = wavevector(fc - delta + params.pump_freqs[1] - params.pump_freqs[0],
                                    params, 0.0)
                             .real();
    CHECK(std::abs(c.fc[1][0]->lambda - std::conj(b2) * b1 * std::sqrt(ks * kconv)) < 1e-14);
}

TEST_CASE("coupling symmetry and scaling properties") {
    const auto params = test_device();
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> freq(6.0e9, 7.4e9);
    std::uniform_real_distribution<double> amp(0.01, 0.16); // x1.5 stays drivable
    for (int trial = 0; trial < 20; ++trial) {
        const double f = freq(rng);
        const PumpAmplitudes betas{amp(rng), amp(rng)};
        const auto c = couplings(f, betas, params);
        REQUIRE(c.sq[0][1].has_value());
        REQUIRE(c.sq[1][0].has_value());
        CHECK(std::abs(c.sq[0][1]->lambda - c.sq[1][0]->lambda) < 1e-15);
        CHECK(c.sq[0][1]->delta_k == Approx(c.sq[1][0]->delta_k).epsilon(1e-12));

        // Scaling: beta -> s beta multiplies every lambda by s^2.
        const double s = 1.5;
        const PumpAmplitudes scaled{s * betas.b1, s * betas.b2};
        const auto cs = couplings(f, scaled, params);
        CHECK(std::abs(cs.sq[0][1]->lambda - s * s * c.sq[0][1]->lambda) < 1e-13);
        CHECK(std::abs(cs.fc[0][1]->lambda - s * s * c.fc[0][1]->lambda) < 1e-13);
    }
}

TEST_CASE("stop band participants are omitted or rejected") {
    const auto params = test_device();
    // A signal whose PA idler lands just above the second resonator pole.
    const auto& r2 = params.resonators[1];
    const double pole2 = r2.f_res * std::sqrt(r2.c_res / (r2.c_res + r2.c_couple));
    const double f_idler = pole2 * (1.0 + 1e-5);
    const double fs = params.pump_freqs[0] + params.pump_freqs[1] - f_idler;
    const auto c = couplings(fs, {0.05, 0.05}, params);
    CHECK_FALSE(c.sq[0][1].has_value());
    CHECK_THROWS_AS(delta_k(ProcessKind::PA, fs, {0.05, 0.05}, params), StopbandError);
}
