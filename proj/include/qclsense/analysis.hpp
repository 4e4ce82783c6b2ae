// analysis.hpp
// Response curves over current grids, dynamic-range extraction from discrete
// slopes, and uncertainty estimation for the trained sensor against the
// non-interacting closed form.

#pragma once

#include "qclsense/ansatz.hpp"
#include "qclsense/parallel.hpp"
#include "qclsense/sensing.hpp"

#include <limits>
#include <vector>

namespace qclsense {

inline double default_slope_tie_tol(int L) { return 1e-6 * double(L); }

// Endpoint-exact inclusive grid; count derives from rounding (to-from)/step.
inline Eigen::VectorXd make_grid(double from, double to, double step) {
    if (!(from < to)) throw std::invalid_argument("make_grid: need from < to");
    if (!(step > 0.0)) throw std::invalid_argument("make_grid: step must be positive");
    const Eigen::Index n = Eigen::Index(std::llround((to - from) / step)) + 1;
    if (n < 2) throw std::invalid_argument("make_grid: step larger than the interval");
    Eigen::VectorXd grid(n);
    for (Eigen::Index i = 0; i < n; ++i)
        grid(i) = (from * double(n - 1 - i) + to * double(i)) / double(n - 1);
    return grid;
}

struct ResponseCurve {
    Eigen::VectorXd grid;
    Eigen::VectorXd values;

    void validate() const {
        if (grid.size() < 1) throw std::invalid_argument("ResponseCurve: empty grid");
        if (grid.size() != values.size())
            throw std::invalid_argument("ResponseCurve: grid/value length mismatch");
        for (Eigen::Index k = 0; k + 1 < grid.size(); ++k)
            if (!(grid(k) < grid(k + 1)))
                throw std::invalid_argument("ResponseCurve: grid must be strictly ascending");
        if (!grid.allFinite() || !values.allFinite())
            throw std::invalid_argument("ResponseCurve: entries must be finite");
    }
};

struct DynamicRangeResult {
    double I_lo = 0.0;
    double I_hi = 0.0;

    double width() const { return I_hi - I_lo; }
};

struct DeltaIResult {
    Eigen::VectorXd grid;
    Eigen::VectorXd delta_model;
    Eigen::VectorXd delta_theory;   // divergent entries hold +inf
    std::vector<bool> divergent;    // per row: either column diverged
    int shots = 1;
};

inline ResponseCurve response_curve(const CompiledAnsatz& compiled, const ParameterVector& params,
                                    const Eigen::VectorXd& grid, int workers = 1) {
    if (grid.size() < 1) throw std::invalid_argument("response_curve: empty grid");
    Matrix inputs(compiled.dim(), grid.size());
    parallel_for(std::size_t(grid.size()), workers, [&](std::size_t i) {
        inputs.col(Eigen::Index(i)) =
            input_state(compiled.model(), grid(Eigen::Index(i))).amplitudes;
    });
    ResponseCurve curve{grid, compiled.expectations(params, inputs)};
    curve.validate();
    return curve;
}

inline ResponseCurve response_curve(const ParameterVector& params, const SensingModel& model,
                                    const AnsatzConfig& config, const Eigen::VectorXd& grid,
                                    int workers = 1) {
    return response_curve(CompiledAnsatz(model, config), params, grid, workers);
}

// Sign changes between consecutive non-tie discrete slopes.
inline int monotonicity_violations(const ResponseCurve& curve, double slope_tie_tol) {
    curve.validate();
    int count = 0;
    int last = 0;
    for (Eigen::Index k = 0; k + 1 < curve.grid.size(); ++k) {
        const double slope =
            (curve.values(k + 1) - curve.values(k)) / (curve.grid(k + 1) - curve.grid(k));
        const int sign = std::abs(slope) < slope_tie_tol ? 0 : (slope > 0.0 ? 1 : -1);
        if (sign == 0) continue;
        if (last != 0 && sign != last) ++count;
        last = sign;
    }
    return count;
}

// Maximal contiguous grid interval around I=0 whose discrete slopes carry a
// single sign (ties skipped): the region of one-to-one response. Both signs
// are tried; the wider interval wins.
inline DynamicRangeResult dynamic_range(const ResponseCurve& curve, double slope_tie_tol) {
    curve.validate();
    const Eigen::Index n = curve.grid.size();
    if (n < 2) throw std::invalid_argument("dynamic_range: need at least two grid points");
    if (curve.grid(0) > 0.0 || curve.grid(n - 1) < 0.0)
        throw std::invalid_argument("dynamic_range: grid must span I=0");

    std::vector<int> sign(std::size_t(n - 1));
    bool any_nonzero = false;
    for (Eigen::Index k = 0; k + 1 < n; ++k) {
        const double slope =
            (curve.values(k + 1) - curve.values(k)) / (curve.grid(k + 1) - curve.grid(k));
        sign[std::size_t(k)] = std::abs(slope) < slope_tie_tol ? 0 : (slope > 0.0 ? 1 : -1);
        any_nonzero = any_nonzero || sign[std::size_t(k)] != 0;
    }
    if (!any_nonzero) throw std::domain_error("dynamic_range: response is flat everywhere");

    // Segments adjacent to I=0: both walks start at the segment containing 0,
    // unless 0 is exactly a grid point, which splits the start left/right.
    Eigen::Index zero_at = -1;
    Eigen::Index containing = -1;
    for (Eigen::Index k = 0; k < n; ++k)
        if (curve.grid(k) == 0.0) zero_at = k;
    if (zero_at < 0)
        for (Eigen::Index k = 0; k + 1 < n; ++k)
            if (curve.grid(k) < 0.0 && curve.grid(k + 1) > 0.0) containing = k;
    const Eigen::Index left_start = zero_at >= 0 ? zero_at - 1 : containing;
    const Eigen::Index right_start = zero_at >= 0 ? zero_at : containing;

    DynamicRangeResult best;
    double best_width = -1.0;
    for (int target : {1, -1}) {
        Eigen::Index l = left_start;
        while (l >= 0 && (sign[std::size_t(l)] == 0 || sign[std::size_t(l)] == target)) --l;
        Eigen::Index r = right_start;
        while (r <= n - 2 && (sign[std::size_t(r)] == 0 || sign[std::size_t(r)] == target)) ++r;
        const double lo = curve.grid(l + 1);
        const double hi = curve.grid(r);
        if (lo <= 0.0 && hi >= 0.0 && hi - lo > best_width) {
            best = DynamicRangeResult{lo, hi};
            best_width = hi - lo;
        }
    }
    if (best_width < 0.0) throw std::domain_error("dynamic_range: no monotone interval around I=0");
    return best;
}

namespace detail {

inline double diagonal_mean(const Vector& column, const Eigen::VectorXd& diag) {
    return column.cwiseAbs2().dot(diag);
}

inline double diagonal_variance(const Vector& column, const Eigen::VectorXd& diag) {
    const Eigen::VectorXd p = column.cwiseAbs2();
    const double mean = p.dot(diag);
    const double second = p.dot(Eigen::VectorXd(diag.cwiseProduct(diag)));
    return std::max(second - mean * mean, 0.0);
}

}  // namespace detail

// sqrt(Var M_z) / (|d<M_z>/dI| sqrt(M)) with a central-difference slope.
inline double delta_I_model(const CompiledAnsatz& compiled, const ParameterVector& params,
                            double current, double dI_deriv, int shots) {
    if (!(dI_deriv > 0.0)) throw std::invalid_argument("delta_I_model: dI_deriv must be positive");
    if (shots < 1) throw std::invalid_argument("delta_I_model: shots must be >= 1");
    Matrix bundle = input_bundle(compiled.model(),
                                 {current - dI_deriv, current, current + dI_deriv});
    compiled.apply(params, bundle);
    const double slope = (detail::diagonal_mean(bundle.col(2), compiled.mz()) -
                          detail::diagonal_mean(bundle.col(0), compiled.mz())) /
                         (2.0 * dI_deriv);
    if (std::abs(slope) < kSlopeFloor)
        throw std::domain_error("delta_I_model: response slope vanishes");
    const double variance = detail::diagonal_variance(bundle.col(1), compiled.mz());
    return std::sqrt(variance) / (std::abs(slope) * std::sqrt(double(shots)));
}

inline double delta_I_model(const ParameterVector& params, const SensingModel& model,
                            const AnsatzConfig& config, double current, double dI_deriv,
                            int shots) {
    return delta_I_model(CompiledAnsatz(model, config), params, current, dI_deriv, shots);
}

// Inclusive sweep of both the trained and the closed-form uncertainty.
// Divergences become +inf entries with the row flagged, never an abort.
inline DeltaIResult delta_I_sweep(const CompiledAnsatz& compiled, const ParameterVector& params,
                                  double from, double to, double step, int shots,
                                  double dI_deriv = 1e-4, int workers = 1) {
    if (shots < 1) throw std::invalid_argument("delta_I_sweep: shots must be >= 1");
    if (!(dI_deriv > 0.0)) throw std::invalid_argument("delta_I_sweep: dI_deriv must be positive");
    const double inf = std::numeric_limits<double>::infinity();
    DeltaIResult result;
    result.grid = make_grid(from, to, step);
    result.shots = shots;
    const Eigen::Index n = result.grid.size();
    result.delta_model.resize(n);
    result.delta_theory.resize(n);
    result.divergent.assign(std::size_t(n), false);

    // One circuit pass over all probe states: (I-h, I, I+h) per grid point.
    Matrix inputs(compiled.dim(), 3 * n);
    parallel_for(std::size_t(n), workers, [&](std::size_t i) {
        const double current = result.grid(Eigen::Index(i));
        inputs.col(3 * Eigen::Index(i) + 0) =
            input_state(compiled.model(), current - dI_deriv).amplitudes;
        inputs.col(3 * Eigen::Index(i) + 1) = input_state(compiled.model(), current).amplitudes;
        inputs.col(3 * Eigen::Index(i) + 2) =
            input_state(compiled.model(), current + dI_deriv).amplitudes;
    });
    compiled.apply(params, inputs);

    const SensingModel& model = compiled.model();
    for (Eigen::Index i = 0; i < n; ++i) {
        const double slope = (detail::diagonal_mean(inputs.col(3 * i + 2), compiled.mz()) -
                              detail::diagonal_mean(inputs.col(3 * i), compiled.mz())) /
                             (2.0 * dI_deriv);
        if (std::abs(slope) < kSlopeFloor) {
            result.delta_model(i) = inf;
            result.divergent[std::size_t(i)] = true;
        } else {
            const double variance = detail::diagonal_variance(inputs.col(3 * i + 1), compiled.mz());
            result.delta_model(i) = std::sqrt(variance) / (std::abs(slope) * std::sqrt(double(shots)));
        }
        try {
            result.delta_theory(i) =
                delta_I_theory(model.h, result.grid(i), model.t_sense, shots);
        } catch (const std::domain_error&) {
            result.delta_theory(i) = inf;
            result.divergent[std::size_t(i)] = true;
        }
    }
    return result;
}

inline DeltaIResult delta_I_sweep(const ParameterVector& params, const SensingModel& model,
                                  const AnsatzConfig& config, double from, double to, double step,
                                  int shots, double dI_deriv = 1e-4, int workers = 1) {
    return delta_I_sweep(CompiledAnsatz(model, config), params, from, to, step, shots, dI_deriv,
                         workers);
}

}  // namespace qclsense
