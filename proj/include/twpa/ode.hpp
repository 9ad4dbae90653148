#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "twpa/errors.hpp"

namespace twpa {

struct OdeOptions {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double h_initial = 0.0; // 0 = (x1 - x0) / 100
    double h_min_factor = 1e-14;
    long max_steps = 4'000'000;
};

namespace detail {

// Dormand-Prince 5(4) tableau. The 5th-order weights equal the last row of
// A (first-same-as-last), the embedded 4th-order weights are kDpB4.
inline constexpr double kDpC[7] = {0.0, 1.0 / 5, 3.0 / 10, 4.0 / 5, 8.0 / 9, 1.0, 1.0};
inline constexpr double kDpA[7][6] = {
    {},
    {1.0 / 5},
    {3.0 / 40, 9.0 / 40},
    {44.0 / 45, -56.0 / 15, 32.0 / 9},
    {19372.0 / 6561, -25360.0 / 2187, 64448.0 / 6561, -212.0 / 729},
    {9017.0 / 3168, -355.0 / 33, 46732.0 / 5247, 49.0 / 176, -5103.0 / 18656},
    {35.0 / 384, 0.0, 500.0 / 1113, 125.0 / 192, -2187.0 / 6784, 11.0 / 84}};
inline constexpr double kDpB4[7] = {5179.0 / 57600, 0.0,           7571.0 / 16695,
                                    393.0 / 640,    -92097.0 / 339200,
                                    187.0 / 2100,   1.0 / 40};

} // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of dy/dx = rhs(x, y) from x0 to
/// x1. The optional observer is called at the initial point and after every
/// accepted step. Throws IntegrationError when step control collapses.
inline void integrate_adaptive(
    const std::function<void(double, const Eigen::VectorXcd&, Eigen::VectorXcd&)>& rhs,
    Eigen::VectorXcd& y, double x0, double x1, const OdeOptions& opt = {},
    const std::function<void(double, const Eigen::VectorXcd&)>& observer = nullptr) {
    const double span = x1 - x0;
    if (span == 0.0) {
        if (observer) observer(x0, y);
        return;
    }
    if (span < 0.0) throw IntegrationError("integrate_adaptive: x1 < x0");

    const auto n = y.size();
    std::array<Eigen::VectorXcd, 7> k;
    for (auto& ki : k) ki.resize(n);
    Eigen::VectorXcd ytmp(n), yerr(n);

    double x = x0;
    double h = opt.h_initial > 0.0 ? opt.h_initial : span / 100.0;
    const double h_min = span * opt.h_min_factor;

    if (observer) observer(x, y);
    rhs(x, y, k[0]);

    long steps = 0;
    while (x < x1) {
        if (++steps > opt.max_steps)
            throw IntegrationError("integrate_adaptive: step budget exceeded");
        h = std::min(h, x1 - x);

        for (int s = 1; s < 7; ++s) {
            ytmp = y;
            for (int j = 0; j < s; ++j)
                ytmp += (h * detail::kDpA[s][j]) * k[j];
            rhs(x + detail::kDpC[s] * h, ytmp, k[s]);
        }
        // After stage 6, ytmp holds the 5th-order solution and
        // k[6] = rhs(x + h, ytmp).
        yerr.setZero();
        for (int s = 0; s < 7; ++s) {
            const double d = (s < 6 ? detail::kDpA[6][s] : 0.0) - detail::kDpB4[s];
            yerr += (h * d) * k[s];
        }

        double err = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double scale =
                opt.abs_tol + opt.rel_tol * std::max(std::abs(y[i]), std::abs(ytmp[i]));
            err = std::max(err, std::abs(yerr[i]) / scale);
        }

        if (err <= 1.0) {
            x += h;
            y.swap(ytmp);
            k[0].swap(k[6]); // first-same-as-last
            if (observer) observer(x, y);
        }
        const double factor =
            err > 0.0 ? std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0) : 5.0;
        h *= factor;
        if (h < h_min)
            throw IntegrationError("integrate_adaptive: step size collapsed");
    }
}

} // namespace twpa
