// training.hpp
// Dataset generation against the monotonic target, the least-squares cost
// over the circuit response, and the restart-wrapped optimizer driver.

#pragma once

#include "qclsense/ansatz.hpp"
#include "qclsense/optim.hpp"
#include "qclsense/sensing.hpp"

#include <chrono>
#include <cstdint>
#include <numbers>
#include <vector>

namespace qclsense {

struct TargetSpec {
    double A = 1.0;
    double B = 1.0;

    void validate() const {
        if (A == 0.0 || B == 0.0 || !std::isfinite(A) || !std::isfinite(B))
            throw std::invalid_argument("TargetSpec: A and B must be finite and nonzero");
    }
};

// A*L*sin(sum_j h_j * I * t / (B*L)): odd, bounded by |A|*L, monotone on the
// training interval whenever the argument stays within a quarter period.
inline double target_f(const SensingModel& model, const TargetSpec& spec, double current) {
    model.validate();
    spec.validate();
    if (!std::isfinite(current)) throw std::invalid_argument("target_f: current must be finite");
    const double scale = spec.A * double(model.L);
    return scale * std::sin(model.h.sum() * current * model.t_sense / (spec.B * double(model.L)));
}

struct TrainingSet {
    Eigen::VectorXd currents;
    Eigen::VectorXd targets;

    Eigen::Index size() const { return currents.size(); }

    void validate() const {
        if (currents.size() < 1) throw std::invalid_argument("TrainingSet: need at least one sample");
        if (currents.size() != targets.size())
            throw std::invalid_argument("TrainingSet: column length mismatch");
        if (!currents.allFinite() || !targets.allFinite())
            throw std::invalid_argument("TrainingSet: entries must be finite");
        if (currents.minCoeff() < -1.0 || currents.maxCoeff() > 1.0)
            throw std::invalid_argument("TrainingSet: currents must lie in [-1, 1]");
    }
};

inline TrainingSet make_dataset(const SensingModel& model, const TargetSpec& spec, int count,
                                std::uint64_t seed) {
    if (count < 1) throw std::invalid_argument("make_dataset: need at least one sample");
    Rng rng(seed);
    TrainingSet ts;
    ts.currents.resize(count);
    ts.targets.resize(count);
    for (int i = 0; i < count; ++i) {
        ts.currents(i) = rng.uniform(-1.0, 1.0);
        ts.targets(i) = target_f(model, spec, ts.currents(i));
    }
    ts.validate();
    return ts;
}

struct TrainConfig {
    int restarts = 5;
    int max_iterations = 500;
    double cost_tolerance = 1e-10;
    double fd_step = 1e-6;
    std::uint64_t init_seed = 0;
    double angle_lo = -2.0 * std::numbers::pi;
    double angle_hi = 2.0 * std::numbers::pi;
    int workers = 1;

    void validate() const {
        if (restarts < 1) throw std::invalid_argument("TrainConfig: restarts must be >= 1");
        if (max_iterations < 1) throw std::invalid_argument("TrainConfig: max_iterations must be >= 1");
        if (!(fd_step > 0.0)) throw std::invalid_argument("TrainConfig: fd_step must be positive");
        if (!(angle_lo < angle_hi)) throw std::invalid_argument("TrainConfig: need angle_lo < angle_hi");
        if (!(cost_tolerance >= 0.0)) throw std::invalid_argument("TrainConfig: bad cost_tolerance");
    }
};

struct TrainResult {
    ParameterVector best_params;
    ParameterVector initial_params;    // starting point of the winning restart
    double final_cost = 0.0;
    std::vector<double> cost_history;  // winning restart, entry 0 = initial cost
    int restart_index = -1;
    int aborted_restarts = 0;
    double wall_time_s = 0.0;
    bool converged = false;            // final_cost <= cost_tolerance
};

// Fixes (model, config, dataset) and evaluates residuals over a cached input
// bundle, so each cost evaluation is one circuit pass over all samples.
class CostEvaluator {
public:
    CostEvaluator(const SensingModel& model, const AnsatzConfig& config, const TrainingSet& ts)
        : compiled_(model, config), targets_(ts.targets) {
        ts.validate();
        std::vector<double> currents(ts.currents.data(), ts.currents.data() + ts.currents.size());
        inputs_ = input_bundle(model, currents);
    }

    const CompiledAnsatz& compiled() const { return compiled_; }
    Eigen::Index parameter_count() const {
        return compiled_.config().parameter_count(compiled_.model().L);
    }

    ParameterVector wrap(const Eigen::VectorXd& theta) const {
        ParameterVector p{compiled_.config().sharing, compiled_.config().depth,
                          compiled_.model().L, theta};
        p.validate();
        return p;
    }

    Eigen::VectorXd residuals(const Eigen::VectorXd& theta) const {
        return compiled_.expectations(wrap(theta), inputs_) - targets_;
    }

    double cost(const Eigen::VectorXd& theta) const { return residuals(theta).squaredNorm(); }

    Eigen::MatrixXd jacobian_fd(const Eigen::VectorXd& theta, double step) const {
        return fd_jacobian([this](const Eigen::VectorXd& x) { return residuals(x); }, theta, step);
    }

    Eigen::VectorXd gradient_fd(const Eigen::VectorXd& theta, double step) const {
        return fd_gradient([this](const Eigen::VectorXd& x) { return cost(x); }, theta, step);
    }

private:
    CompiledAnsatz compiled_;
    Matrix inputs_;
    Eigen::VectorXd targets_;
};

inline double cost(const ParameterVector& params, const TrainingSet& ts, const SensingModel& model,
                   const AnsatzConfig& config) {
    return CostEvaluator(model, config, ts).cost(params.values);
}

inline Eigen::VectorXd cost_gradient_fd(const ParameterVector& params, const TrainingSet& ts,
                                        const SensingModel& model, const AnsatzConfig& config,
                                        double fd_step) {
    return CostEvaluator(model, config, ts).gradient_fd(params.values, fd_step);
}

// Runs independent restarts from uniform random angles; restart r draws from
// seed init_seed + r. Keeps the lowest final cost, earlier restart on ties.
inline TrainResult train(const SensingModel& model, const AnsatzConfig& config,
                         const TrainingSet& ts, const TrainConfig& tc) {
    tc.validate();
    const auto t0 = std::chrono::steady_clock::now();
    CostEvaluator evaluator(model, config, ts);
    const Eigen::Index n = evaluator.parameter_count();
    const Eigen::VectorXd lower = Eigen::VectorXd::Constant(n, tc.angle_lo);
    const Eigen::VectorXd upper = Eigen::VectorXd::Constant(n, tc.angle_hi);

    LmOptions options;
    options.max_iterations = tc.max_iterations;
    options.cost_tolerance = tc.cost_tolerance;

    TrainResult best;
    bool have_result = false;
    for (int r = 0; r < tc.restarts; ++r) {
        Rng rng(tc.init_seed + std::uint64_t(r));
        Eigen::VectorXd theta0(n);
        for (Eigen::Index k = 0; k < n; ++k) theta0(k) = rng.uniform(tc.angle_lo, tc.angle_hi);
        LmResult run = lm_minimize(
            [&evaluator](const Eigen::VectorXd& x) { return evaluator.residuals(x); },
            [&evaluator, &tc](const Eigen::VectorXd& x) {
                return evaluator.jacobian_fd(x, tc.fd_step);
            },
            theta0, lower, upper, options);
        if (run.aborted) {
            ++best.aborted_restarts;
            continue;
        }
        if (!have_result || run.cost < best.final_cost) {
            best.best_params = evaluator.wrap(run.x);
            best.initial_params = evaluator.wrap(theta0);
            best.final_cost = run.cost;
            best.cost_history = std::move(run.cost_history);
            best.restart_index = r;
            have_result = true;
        }
        if (have_result && best.final_cost <= tc.cost_tolerance) break;
    }
    if (!have_result) throw std::runtime_error("train: every restart aborted on non-finite cost");
    best.converged = best.final_cost <= tc.cost_tolerance;
    best.wall_time_s =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    return best;
}

}  // namespace qclsense
