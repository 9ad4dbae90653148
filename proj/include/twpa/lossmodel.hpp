#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Dense>

#include "twpa/constants.hpp"
#include "twpa/errors.hpp"
#include "twpa/units.hpp"

namespace twpa {

/// Thermal occupation of a mode at ordinary frequency f and temperature T.
inline double bose_einstein_occupation(double temp_k, double f) {
    if (temp_k <= 0.0) return 0.0;
    return 1.0 / std::expm1(kPlanck * f / (kBoltzmann * temp_k));
}

/// Effective temperature whose thermal occupation at frequency f equals n.
inline double photons_to_temperature(double n, double f) {
    if (n < 0.0) throw Error("photon number must be >= 0");
    if (n == 0.0) return 0.0;
    return kPlanck * f / (kBoltzmann * std::log1p(1.0 / n));
}

enum class LossKind { Constant, LumpedAtEnd, Distributed, Saturable };

inline const char* to_string(LossKind k) {
    switch (k) {
        case LossKind::Constant: return "constant";
        case LossKind::LumpedAtEnd: return "lumped_end";
        case LossKind::Distributed: return "distributed";
        case LossKind::Saturable: return "saturable";
    }
    return "?";
}

struct LossTablePoint {
    double temp_k;
    double loss_db_total;
};

/// Loss configuration for the whole device. Saturable profiles interpolate
/// a measured insertion-loss-versus-temperature table, with the effective
/// temperature set by the local photon number.
struct LossProfile {
    LossKind kind = LossKind::Constant;
    double total_db = 0.0;
    std::vector<LossTablePoint> table;
    double n_thermal_floor = 0.0;
    bool strict_range = false; // throw instead of clamping outside the table

    static LossProfile lossless() { return constant(0.0); }

    static LossProfile constant(double db) {
        LossProfile p;
        p.kind = LossKind::Constant;
        p.total_db = db;
        p.validate();
        return p;
    }

    static LossProfile distributed(double db) {
        LossProfile p = constant(db);
        p.kind = LossKind::Distributed;
        return p;
    }

    static LossProfile lumped_at_end(double db) {
        LossProfile p = constant(db);
        p.kind = LossKind::LumpedAtEnd;
        return p;
    }

    static LossProfile saturable(std::vector<LossTablePoint> tab, double floor_n) {
        LossProfile p;
        p.kind = LossKind::Saturable;
        p.table = std::move(tab);
        p.n_thermal_floor = floor_n;
        p.validate();
        return p;
    }

    // Stand-in for the measured saturation curve: -5 dB up to 50 mK,
    // -1 dB above 800 mK, log-linear in temperature between.
    static std::vector<LossTablePoint> default_saturation_table() {
        return {{0.050, -5.0}, {0.800, -1.0}};
    }

    void validate() const {
        if (total_db > 0.0) throw ConfigError("total loss in dB must be <= 0");
        if (kind == LossKind::Saturable) {
            if (table.size() < 2)
                throw ConfigError("saturable loss table needs >= 2 points");
            for (std::size_t i = 1; i < table.size(); ++i) {
                if (!(table[i].temp_k > table[i - 1].temp_k))
                    throw ConfigError("loss table temperatures must increase");
                if (std::abs(table[i].loss_db_total) >
                    std::abs(table[i - 1].loss_db_total) + 1e-12)
                    throw ConfigError("loss magnitude must not grow with temperature");
            }
            if (n_thermal_floor < 0.0)
                throw ConfigError("n_thermal_floor must be >= 0");
        }
    }
};

/// Total loss in dB at effective temperature T from the saturation table,
/// interpolated log-linearly in temperature.
inline double saturable_total_db(double temp_k, const LossProfile& profile) {
    const auto& tab = profile.table;
    if (temp_k <= tab.front().temp_k) {
        if (profile.strict_range && temp_k < tab.front().temp_k - 1e-12)
            throw TableRangeError("effective temperature below loss table");
        return tab.front().loss_db_total;
    }
    if (temp_k >= tab.back().temp_k) {
        if (profile.strict_range && temp_k > tab.back().temp_k + 1e-12)
            throw TableRangeError("effective temperature above loss table");
        return tab.back().loss_db_total;
    }
    for (std::size_t i = 1; i < tab.size(); ++i) {
        if (temp_k <= tab[i].temp_k) {
            const double t = std::log(temp_k / tab[i - 1].temp_k) /
                             std::log(tab[i].temp_k / tab[i - 1].temp_k);
            return tab[i - 1].loss_db_total +
                   t * (tab[i].loss_db_total - tab[i - 1].loss_db_total);
        }
    }
    return tab.back().loss_db_total;
}

/// Loss rate per cell at frequency f, position x (cells) and local photon
/// number. LumpedAtEnd reports zero; the loss is applied after propagation
/// through lumped_end_loss.
inline double gamma_at(double f, double x, double n_local, const LossProfile& profile,
                       double n_cells) {
    (void)x;
    switch (profile.kind) {
        case LossKind::Constant:
        case LossKind::Distributed:
            return gamma_per_cell_from_db(profile.total_db, n_cells);
        case LossKind::LumpedAtEnd:
            return 0.0;
        case LossKind::Saturable: {
            const double n = std::max(n_local, 0.0) + profile.n_thermal_floor;
            const double te = photons_to_temperature(n, f);
            return gamma_per_cell_from_db(saturable_total_db(te, profile), n_cells);
        }
    }
    return 0.0;
}

/// Beamsplitter acting on a single quadrature variance (vacuum = 1/2).
inline double lumped_end_loss_variance(double var, double total_db) {
    if (total_db > 0.0) throw Error("lumped loss must be <= 0 dB");
    const double eta = power_ratio_from_db(total_db);
    return eta * var + (1.0 - eta) * 0.5;
}

/// Beamsplitter with vacuum ancilla applied to every mode of a correlation
/// matrix in the [[<c c>, <c c+>], [<c+ c>, <c+ c+>]] block layout.
inline Eigen::MatrixXcd lumped_end_loss(const Eigen::MatrixXcd& corr, double total_db) {
    if (total_db > 0.0) throw Error("lumped loss must be <= 0 dB");
    const double eta = power_ratio_from_db(total_db);
    const auto n = corr.rows() / 2;
    Eigen::MatrixXcd out = eta * corr;
    out.block(0, n, n, n) += (1.0 - eta) * Eigen::MatrixXcd::Identity(n, n);
    return out;
}

} // namespace twpa
