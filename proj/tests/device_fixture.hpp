#pragma once

#include "twpa/circuit.hpp"

// Fabricated-device constants used across the test suites: a 3141-cell
// line with two interleaved phase-matching resonator banks and pumps just
// outside the resonator stop bands.
inline twpa::CircuitParams test_device(double tan_delta = 0.0) {
    twpa::CircuitParams p;
    p.n_cells = 3141;
    p.c_ground = 28.616e-15;
    p.i_critical = 3.14e-6;
    p.c_junction = 0.0;
    p.tan_delta = tan_delta;
    p.resonators = {
        {5.2815e9, 6.653e-12, 28.616e-15, 10.0},
        {8.169e9, 2.781e-12, 28.616e-15, 10.0},
    };
    p.pump_freqs = {5.2984e9, 8.109e9};
    return p;
}

inline double test_center_freq() { return 0.5 * (5.2984e9 + 8.109e9); }
