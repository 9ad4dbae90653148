#include <catch_amalgamated.hpp>

#include <cmath>
#include <numbers>

#include "device_fixture.hpp"
#include "twpa/circuit.hpp"

using namespace twpa;
using Catch::Approx;

TEST_CASE("wavevector vanishes in the DC limit") {
    const auto params = test_device();
    const auto k = wavevector(1.0, params); // 1 Hz
    CHECK(std::abs(k.value) < 1e-9);
    CHECK(std::abs(wavevector(0.0, params).value) == 0.0);
}

TEST_CASE("lossless line has a purely real wavevector") {
    const auto params = test_device(0.0);
    const auto k = wavevector(6.7e9, params);
    CHECK(k.real() > 0.0);
    CHECK(std::abs(k.imag()) <= 1e-12 * std::abs(k.real()));
}

TEST_CASE("bare-line closed form with resonators decoupled") {
    // Oracle: with all coupling capacitances zero and no junction shunt,
    // the dispersion must collapse to k = 2 pi f sqrt(L_J C_g).
    auto params = test_device(0.0);
    for (auto& r : params.resonators) r.c_couple = 0.0;
    const double f = 6.7e9;
    const double expected =
        2.0 * std::numbers::pi * f *
        std::sqrt(params.junction_inductance() * params.c_ground);
    const auto k = wavevector(f, params);
    CHECK(k.real() == Approx(expected).epsilon(1e-12));
    CHECK(std::abs(k.imag()) < 1e-15);
}

TEST_CASE("insertion loss matches the fabricated-device scale") {
    const auto params = test_device(4.9e-3);
    const auto loss = insertion_loss_db(6.7e9, params);
    CHECK(loss.per_cell_db < 0.0);
    CHECK(loss.per_cell_db == Approx(-0.00163).epsilon(0.15));
    CHECK(loss.total_db == Approx(-5.1).margin(0.8));
    CHECK(loss.total_db == Approx(loss.per_cell_db * params.n_cells));
}

TEST_CASE("lossless line transmits at 0 dB") {
    const auto params = test_device(0.0);
    const auto loss = insertion_loss_db(6.7e9, params);
    CHECK(std::abs(loss.total_db) < 1e-8);
}

TEST_CASE("small-loss regime scales linearly with tan_delta") {
    const auto l1 = insertion_loss_db(6.7e9, test_device(4.9e-3));
    const auto l2 = insertion_loss_db(6.7e9, test_device(9.8e-3));
    // First-order perturbation: Im k is linear in tan_delta.
    CHECK(l2.total_db / l1.total_db == Approx(2.0).epsilon(5e-3));
}

TEST_CASE("loss derives solely from the imaginary wavevector") {
    const auto params = test_device(4.9e-3);
    const auto k = wavevector(6.7e9, params);
    const auto loss = insertion_loss_db(6.7e9, params);
    const double nepers = k.imag() * params.n_cells;
    CHECK(loss.total_db == Approx(-20.0 / std::numbers::ln10 * nepers).epsilon(1e-12));
}

TEST_CASE("stop bands open just above the loaded resonance") {
    const auto params = test_device(0.0);
    for (const auto& r : params.resonators) {
        const double f_pole = r.f_res * std::sqrt(r.c_res / (r.c_res + r.c_couple));
        const double inside = f_pole * (1.0 + 1e-5);
        CHECK_THROWS_AS(wavevector(inside, params), StopbandError);
        CHECK(in_stopband(inside, params));
        CHECK_FALSE(in_stopband(f_pole * 0.995, params));
        CHECK_FALSE(in_stopband(r.f_res * 1.005, params));
    }
    // Both pump frequencies must be transmitting.
    CHECK_FALSE(in_stopband(params.pump_freqs[0], params));
    CHECK_FALSE(in_stopband(params.pump_freqs[1], params));
}

TEST_CASE("insertion loss propagates stop band errors") {
    // At the fabricated tan_delta the resonance pole is regularized into a
    // dissipative dip; a weakly lossy line keeps the band evanescent.
    const auto params = test_device(1e-6);
    const auto& r = params.resonators[0];
    const double f_pole = r.f_res * std::sqrt(r.c_res / (r.c_res + r.c_couple));
    CHECK_THROWS_AS(insertion_loss_db(f_pole * (1.0 + 1e-5), params), StopbandError);
}

TEST_CASE("dispersion is continuous and increasing on each passband") {
    const auto params = test_device(0.0);
    auto interval_has_stopband = [&](double f0, double f1) {
        for (int i = 0; i <= 50; ++i)
            if (in_stopband(f0 + (f1 - f0) * i / 50.0, params)) return true;
        return false;
    };
    double prev = 0.0;
    double prev_f = 0.0;
    for (double f = 0.1e9; f <= 10.0e9; f += 0.005e9) {
        if (in_stopband(f, params)) {
            prev = 0.0;
            continue;
        }
        const double k = wavevector(f, params).real();
        if (prev > 0.0 && !interval_has_stopband(prev_f, f)) {
            CHECK(k > prev);
            CHECK(std::abs(k - prev) < 0.15); // bounded jump at 5 MHz spacing
        }
        prev = k;
        prev_f = f;
    }
}

TEST_CASE("parameter invariants are enforced") {
    auto params = test_device();
    params.n_cells = 0;
    CHECK_THROWS_AS(params.validate(), ConfigError);
    params = test_device();
    params.i_critical = -1e-6;
    CHECK_THROWS_AS(params.validate(), ConfigError);
    params = test_device();
    params.resonators[0].insertion_period = 0.5;
    CHECK_THROWS_AS(params.validate(), ConfigError);
    CHECK(test_device().junction_inductance() > 0.0);
}
