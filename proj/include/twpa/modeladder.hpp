#pragma once

#include <array>
#include <cmath>
#include <cstdlib>
#include <vector>

#include "twpa/errors.hpp"

namespace twpa {

inline constexpr double kModeDedupHz = 1.0;
inline constexpr double kPumpExclusionHz = 1e6;

/// Finite ordered frequency set that truncates the coupled-mode problem.
/// Index 0 is always the signal. For mode i, sq_partner[p][q] is the index
/// of pump_p + pump_q - f_i if present (-1 otherwise) and fc_partner[p][q]
/// the index of f_i + pump_p - pump_q.
struct ModeSet {
    std::vector<double> freqs; // Hz
    int depth = 0;
    double pump1 = 0.0, pump2 = 0.0;

    struct Pairing {
        std::array<std::array<int, 2>, 2> sq{{{-1, -1}, {-1, -1}}};
        std::array<std::array<int, 2>, 2> fc{{{-1, -1}, {-1, -1}}};
    };
    std::vector<Pairing> pairings;

    int size() const { return static_cast<int>(freqs.size()); }

    int index_of(double f) const {
        for (int i = 0; i < size(); ++i)
            if (std::abs(freqs[i] - f) <= kModeDedupHz) return i;
        return -1;
    }
};

/// Build the truncated frequency ladder from the signal frequency by
/// repeatedly applying the pair-creation and conversion generators,
/// dropping nonpositive frequencies and anything within the exclusion
/// window of either pump.
inline ModeSet build_modes(double omega0, double pump1, double pump2, int depth,
                           double exclusion_hz = kPumpExclusionHz,
                           double dedup_hz = kModeDedupHz) {
    if (!(omega0 > 0.0)) throw Error("build_modes: signal frequency must be > 0");
    if (!(pump1 < pump2)) throw Error("build_modes: pump1 must be below pump2");
    if (depth < 0) throw Error("build_modes: depth must be >= 0");

    ModeSet set;
    set.depth = depth;
    set.pump1 = pump1;
    set.pump2 = pump2;

    auto excluded = [&](double f) {
        return f <= 0.0 || std::abs(f - pump1) < exclusion_hz ||
               std::abs(f - pump2) < exclusion_hz;
    };
    auto push_unique = [&](std::vector<double>& v, double f) {
        if (excluded(f)) return false;
        for (double g : set.freqs)
            if (std::abs(g - f) <= dedup_hz) return false;
        for (double g : v)
            if (std::abs(g - f) <= dedup_hz) return false;
        v.push_back(f);
        return true;
    };

    std::vector<double> level;
    push_unique(level, omega0);
    if (level.empty()) throw Error("build_modes: signal frequency is excluded");
    push_unique(level, pump1 + pump2 - omega0);

    for (int l = 0; l <= depth; ++l) {
        set.freqs.insert(set.freqs.end(), level.begin(), level.end());
        if (l == depth) break;
        std::vector<double> next;
        for (double f : level) {
            push_unique(next, 2.0 * pump1 - f);
            push_unique(next, pump1 + pump2 - f);
            push_unique(next, 2.0 * pump2 - f);
            push_unique(next, f - (pump2 - pump1));
            push_unique(next, f + (pump2 - pump1));
        }
        level = std::move(next);
        if (level.empty()) break;
    }

    set.pairings.resize(set.freqs.size());
    const double o[2] = {pump1, pump2};
    for (int i = 0; i < set.size(); ++i) {
        for (int p = 0; p < 2; ++p) {
            for (int q = 0; q < 2; ++q) {
                set.pairings[i].sq[p][q] = set.index_of(o[p] + o[q] - set.freqs[i]);
                set.pairings[i].fc[p][q] = set.index_of(set.freqs[i] + o[p] - o[q]);
            }
        }
    }
    return set;
}

} // namespace twpa
