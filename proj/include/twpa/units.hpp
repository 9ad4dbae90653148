#pragma once

#include <cmath>
#include <numbers>

namespace twpa {

inline double angular(double f_hz) { return 2.0 * std::numbers::pi * f_hz; }

inline double db_from_power_ratio(double ratio) { return 10.0 * std::log10(ratio); }
inline double power_ratio_from_db(double db) { return std::pow(10.0, db / 10.0); }

inline double watts_from_dbm(double dbm) { return 1e-3 * std::pow(10.0, dbm / 10.0); }
inline double dbm_from_watts(double w) { return 10.0 * std::log10(w / 1e-3); }

// Distributed loss rate per cell for a stated total power loss in dB.
// The equations of motion damp field amplitudes at gamma/2, so power
// decays as exp(-gamma x) and a total of L dB over n cells corresponds
// to gamma n = -L ln10 / 10.
inline double gamma_per_cell_from_db(double total_db, double n_cells) {
    return -total_db * std::numbers::ln10 / (10.0 * n_cells);
}

inline double db_from_gamma_per_cell(double gamma, double n_cells) {
    return -gamma * n_cells * 10.0 / std::numbers::ln10;
}

} // namespace twpa
