#pragma once

#include <cmath>
#include <functional>

#include <Eigen/Dense>

#include "twpa/errors.hpp"

namespace twpa {

struct LevMarOptions {
    int max_iter = 200;
    double ftol = 1e-14;   // relative cost decrease
    double gtol = 1e-12;   // gradient infinity norm
    double lambda0 = 1e-3;
};

struct LevMarResult {
    Eigen::VectorXd params;
    double cost = 0.0; // 0.5 * sum r^2
    int iterations = 0;
    Eigen::MatrixXd covariance; // sigma^2 (J^T J)^-1
};

using ResidualFn = std::function<Eigen::VectorXd(const Eigen::VectorXd&)>;
using JacobianFn = std::function<Eigen::MatrixXd(const Eigen::VectorXd&)>;

/// Forward-difference Jacobian for models without analytic derivatives.
inline JacobianFn numeric_jacobian(const ResidualFn& residual, double step = 1e-7) {
    return [residual, step](const Eigen::VectorXd& p) {
        const Eigen::VectorXd r0 = residual(p);
        Eigen::MatrixXd jac(r0.size(), p.size());
        for (Eigen::Index j = 0; j < p.size(); ++j) {
            Eigen::VectorXd pp = p;
            const double h = step * std::max(1.0, std::abs(p[j]));
            pp[j] += h;
            jac.col(j) = (residual(pp) - r0) / h;
        }
        return jac;
    };
}

/// Damped least squares with diagonal (Marquardt) scaling. Throws
/// FitDivergence when no damping value yields a cost decrease.
inline LevMarResult levmar_fit(const ResidualFn& residual, const JacobianFn& jacobian,
                               const Eigen::VectorXd& initial,
                               const LevMarOptions& opt = {}) {
    Eigen::VectorXd p = initial;
    Eigen::VectorXd r = residual(p);
    double cost = 0.5 * r.squaredNorm();
    double lambda = opt.lambda0;

    LevMarResult result;
    int it = 0;
    for (; it < opt.max_iter; ++it) {
        const Eigen::MatrixXd jac = jacobian(p);
        const Eigen::MatrixXd jtj = jac.transpose() * jac;
        const Eigen::VectorXd g = jac.transpose() * r;
        if (g.lpNorm<Eigen::Infinity>() < opt.gtol) break;

        bool stepped = false;
        for (int trial = 0; trial < 16; ++trial) {
            Eigen::MatrixXd a = jtj;
            a.diagonal() += lambda * jtj.diagonal().cwiseMax(1e-12);
            const Eigen::VectorXd delta = a.ldlt().solve(-g);
            const Eigen::VectorXd pn = p + delta;
            const Eigen::VectorXd rn = residual(pn);
            const double cn = 0.5 * rn.squaredNorm();
            if (std::isfinite(cn) && cn < cost) {
                const double drop = (cost - cn) / std::max(cost, 1e-300);
                p = pn;
                r = rn;
                cost = cn;
                lambda = std::max(lambda * 0.3, 1e-12);
                stepped = true;
                if (drop < opt.ftol) it = opt.max_iter; // converged
                break;
            }
            lambda *= 8.0;
        }
        if (!stepped) {
            if (cost < 1e-20) break; // already at the floor
            throw FitDivergence("levmar_fit: residual failed to decrease");
        }
    }

    const Eigen::MatrixXd jac = jacobian(p);
    const Eigen::MatrixXd jtj = jac.transpose() * jac;
    const auto m = jac.rows();
    const auto n = jac.cols();
    const double dof = static_cast<double>(m > n ? m - n : 1);
    const double sigma2 = 2.0 * cost / dof;
    result.params = p;
    result.cost = cost;
    result.iterations = it;
    result.covariance =
        sigma2 * jtj.ldlt().solve(Eigen::MatrixXd::Identity(n, n));
    return result;
}

} // namespace twpa
