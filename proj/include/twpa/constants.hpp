#pragma once

namespace twpa {

// CODATA 2018 exact values (SI).
inline constexpr double kPlanck = 6.62607015e-34;          // J s
inline constexpr double kHbar = 1.054571817e-34;           // J s
inline constexpr double kBoltzmann = 1.380649e-23;         // J / K
inline constexpr double kElectronCharge = 1.602176634e-19; // C
inline constexpr double kFluxQuantum = 2.067833848e-15;    // Wb, h / 2e

} // namespace twpa
