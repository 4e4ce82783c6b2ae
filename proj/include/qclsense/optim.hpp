// optim.hpp
// Box-bounded least-squares minimization of f(x) = r(x)^T r(x) by
// Levenberg-Marquardt with trial steps projected onto the bounds. The damping
// update follows Nielsen's gain-ratio rule.

#pragma once

#include <Eigen/Dense>

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

namespace qclsense {

struct LmOptions {
    int max_iterations = 500;
    double cost_tolerance = 1e-10;      // stop once r^T r falls below
    double gradient_tolerance = 1e-12;  // stop once the sup-norm of grad falls below
    double step_tolerance = 1e-14;      // relative step size floor
    double initial_damping = 1e-3;      // scales max diag of the normal matrix
    double max_damping = 1e32;

    void validate() const {
        if (max_iterations < 0) throw std::invalid_argument("LmOptions: max_iterations < 0");
        if (!(cost_tolerance >= 0.0)) throw std::invalid_argument("LmOptions: bad cost_tolerance");
        if (!(initial_damping > 0.0)) throw std::invalid_argument("LmOptions: bad initial_damping");
    }
};

struct LmResult {
    Eigen::VectorXd x;
    double cost = 0.0;
    std::vector<double> cost_history;  // entry 0 is the initial cost
    bool converged = false;            // a tolerance fired before the iteration cap
    bool aborted = false;              // non-finite cost encountered

    int iterations() const { return int(cost_history.size()) - 1; }
};

// residual: VectorXd(const VectorXd&); jacobian: MatrixXd(const VectorXd&).
template <typename ResidualFn, typename JacobianFn>
LmResult lm_minimize(ResidualFn&& residual, JacobianFn&& jacobian, Eigen::VectorXd x0,
                     const Eigen::VectorXd& lower, const Eigen::VectorXd& upper,
                     const LmOptions& options) {
    options.validate();
    const Eigen::Index n = x0.size();
    if (lower.size() != n || upper.size() != n)
        throw std::invalid_argument("lm_minimize: bound sizes must match x0");
    for (Eigen::Index k = 0; k < n; ++k)
        if (!(lower(k) < upper(k))) throw std::invalid_argument("lm_minimize: need lower < upper");

    LmResult result;
    result.x = x0.cwiseMax(lower).cwiseMin(upper);

    Eigen::VectorXd r = residual(result.x);
    double f = r.squaredNorm();
    result.cost = f;
    result.cost_history.push_back(f);
    if (!std::isfinite(f)) {
        result.aborted = true;
        return result;
    }

    Eigen::MatrixXd jac = jacobian(result.x);
    Eigen::VectorXd grad = 2.0 * jac.transpose() * r;
    Eigen::MatrixXd normal = 2.0 * jac.transpose() * jac;
    double mu = options.initial_damping * std::max(normal.diagonal().maxCoeff(), 1e-300);
    double nu = 2.0;

    for (int iter = 0; iter < options.max_iterations; ++iter) {
        if (f <= options.cost_tolerance || grad.cwiseAbs().maxCoeff() <= options.gradient_tolerance) {
            result.converged = true;
            break;
        }
        Eigen::MatrixXd damped = normal;
        damped.diagonal().array() += mu;
        const Eigen::VectorXd step = damped.ldlt().solve(-grad);
        const Eigen::VectorXd x_try = (result.x + step).cwiseMax(lower).cwiseMin(upper);
        const Eigen::VectorXd actual = x_try - result.x;
        if (actual.norm() <= options.step_tolerance * (result.x.norm() + options.step_tolerance)) {
            result.converged = true;
            break;
        }
        const Eigen::VectorXd r_try = residual(x_try);
        const double f_try = r_try.squaredNorm();
        if (!std::isfinite(f_try)) {
            result.aborted = true;
            break;
        }
        const double predicted =
            -(grad.dot(actual) + 0.5 * actual.dot(normal * actual));
        if (f_try < f) {
            const double rho = predicted > 0.0 ? (f - f_try) / predicted : 1.0;
            result.x = x_try;
            r = r_try;
            f = f_try;
            jac = jacobian(result.x);
            grad.noalias() = 2.0 * jac.transpose() * r;
            normal.noalias() = 2.0 * jac.transpose() * jac;
            mu *= std::max(1.0 / 3.0, 1.0 - std::pow(2.0 * rho - 1.0, 3));
            nu = 2.0;
        } else {
            mu *= nu;
            nu *= 2.0;
            if (mu > options.max_damping) {
                result.cost_history.push_back(f);
                break;
            }
        }
        result.cost_history.push_back(f);
    }
    result.cost = f;
    return result;
}

// Central-difference Jacobian of a residual vector, one column per coordinate.
template <typename ResidualFn>
Eigen::MatrixXd fd_jacobian(ResidualFn&& residual, const Eigen::VectorXd& x, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("fd_jacobian: step must be positive");
    Eigen::MatrixXd jac;
    Eigen::VectorXd probe = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        probe(k) = x(k) + step;
        const Eigen::VectorXd r_plus = residual(probe);
        probe(k) = x(k) - step;
        const Eigen::VectorXd r_minus = residual(probe);
        probe(k) = x(k);
        if (jac.size() == 0) jac.resize(r_plus.size(), x.size());
        jac.col(k) = (r_plus - r_minus) / (2.0 * step);
    }
    return jac;
}

// Central-difference gradient of a scalar function.
template <typename ScalarFn>
Eigen::VectorXd fd_gradient(ScalarFn&& fn, const Eigen::VectorXd& x, double step) {
    if (!(step > 0.0)) throw std::invalid_argument("fd_gradient: step must be positive");
    Eigen::VectorXd grad(x.size());
    Eigen::VectorXd probe = x;
    for (Eigen::Index k = 0; k < x.size(); ++k) {
        probe(k) = x(k) + step;
        const double f_plus = fn(probe);
        probe(k) = x(k) - step;
        grad(k) = (f_plus - fn(probe)) / (2.0 * step);
        probe(k) = x(k);
    }
    return grad;
}

}  // namespace qclsense
