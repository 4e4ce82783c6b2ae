#include "qclsense/analysis.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>

namespace qclsense {
namespace {

ResponseCurve curve_of(const Eigen::VectorXd& grid, double (*fn)(double)) {
    ResponseCurve c;
    c.grid = grid;
    c.values.resize(grid.size());
    for (Eigen::Index k = 0; k < grid.size(); ++k) c.values(k) = fn(grid(k));
    return c;
}

SensingModel single_qubit(double h1) {
    SensingModel m;
    m.L = 1;
    m.h = Eigen::VectorXd::Constant(1, h1);
    m.J = Eigen::MatrixXd::Zero(1, 1);
    return m;
}

TEST(MakeGrid, EndpointExactWithInteriorZero) {
    const Eigen::VectorXd g = make_grid(-1.0, 1.0, 0.01);
    ASSERT_EQ(g.size(), 201);
    EXPECT_EQ(g(0), -1.0);
    EXPECT_EQ(g(200), 1.0);
    EXPECT_EQ(g(100), 0.0);
    for (Eigen::Index k = 0; k + 1 < g.size(); ++k) EXPECT_LT(g(k), g(k + 1));

    const Eigen::VectorXd s = make_grid(-0.8, 0.8, 0.05);
    ASSERT_EQ(s.size(), 33);
    EXPECT_EQ(s(16), 0.0);
    EXPECT_EQ(s(32), 0.8);
}

TEST(MakeGrid, RejectsDegenerateSpecs) {
    EXPECT_THROW(make_grid(1.0, -1.0, 0.1), std::invalid_argument);
    EXPECT_THROW(make_grid(0.0, 0.0, 0.1), std::invalid_argument);
    EXPECT_THROW(make_grid(-1.0, 1.0, 0.0), std::invalid_argument);
    EXPECT_THROW(make_grid(-1.0, 1.0, -0.5), std::invalid_argument);
    EXPECT_THROW(make_grid(0.0, 1.0, 3.0), std::invalid_argument);
}

TEST(ResponseCurve, ValidationCatchesMalformedCurves) {
    ResponseCurve c;
    c.grid = make_grid(0.0, 1.0, 0.5);
    c.values = Eigen::VectorXd::Zero(2);
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.values = Eigen::VectorXd::Zero(3);
    EXPECT_NO_THROW(c.validate());
    std::swap(c.grid(0), c.grid(2));
    EXPECT_THROW(c.validate(), std::invalid_argument);
    c.grid = make_grid(0.0, 1.0, 0.5);
    c.values(1) = std::nan("");
    EXPECT_THROW(c.validate(), std::invalid_argument);
}

TEST(MonotonicityViolations, CountsChordSignChanges) {
    const Eigen::VectorXd g = make_grid(-1.0, 1.0, 0.01);
    const auto sin1 = [](double x) { return std::sin(x); };
    const auto sin3 = [](double x) { return std::sin(3.0 * x); };
    EXPECT_EQ(monotonicity_violations(curve_of(g, sin1), default_slope_tie_tol(2)), 0);
    EXPECT_EQ(monotonicity_violations(curve_of(g, sin3), default_slope_tie_tol(2)), 2);
}

TEST(MonotonicityViolations, TieTolAbsorbsShallowSlopes) {
    // a huge tie tolerance declares everything flat
    const Eigen::VectorXd g = make_grid(-1.0, 1.0, 0.1);
    const auto sin3 = [](double x) { return std::sin(3.0 * x); };
    EXPECT_EQ(monotonicity_violations(curve_of(g, sin3), 100.0), 0);
}

TEST(DynamicRange, MonotoneCurveSpansWholeGrid) {
    const Eigen::VectorXd g = make_grid(-1.0, 1.0, 0.01);
    const auto sin1 = [](double x) { return std::sin(x); };
    const DynamicRangeResult r = dynamic_range(curve_of(g, sin1), default_slope_tie_tol(2));
    EXPECT_EQ(r.I_lo, -1.0);
    EXPECT_EQ(r.I_hi, 1.0);
    EXPECT_NEAR(r.width(), 2.0, 1e-15);
}

TEST(DynamicRange, StopsAtFirstTurningPoints) {
    // sin(3I) turns at +-pi/6; the walk stops on the grid point just inside
    const Eigen::VectorXd g = make_grid(-1.0, 1.0, 0.01);
    const auto sin3 = [](double x) { return std::sin(3.0 * x); };
    const DynamicRangeResult r = dynamic_range(curve_of(g, sin3), default_slope_tie_tol(2));
    EXPECT_NEAR(r.I_lo, -0.52, 1e-12);
    EXPECT_NEAR(r.I_hi, 0.52, 1e-12);
}

TEST(DynamicRange, DecreasingResponseAlsoCounts) {
    const Eigen::VectorXd g = make_grid(-1.0, 1.0, 0.05);
    const auto neg = [](double x) { return -x; };
    const DynamicRangeResult r = dynamic_range(curve_of(g, neg), 1e-9);
    EXPECT_EQ(r.I_lo, -1.0);
    EXPECT_EQ(r.I_hi, 1.0);
}

TEST(DynamicRange, PlateausAreAbsorbedIntoTheWalk) {
    const Eigen::VectorXd g = make_grid(-1.0, 1.0, 0.05);
    const auto clamp = [](double x) { return std::clamp(x, -0.5, 0.5); };
    const DynamicRangeResult r = dynamic_range(curve_of(g, clamp), 1e-9);
    EXPECT_EQ(r.I_lo, -1.0);
    EXPECT_EQ(r.I_hi, 1.0);
}

TEST(DynamicRange, FlatResponseIsADomainError) {
    const Eigen::VectorXd g = make_grid(-1.0, 1.0, 0.25);
    const auto one = [](double) { return 1.0; };
    EXPECT_THROW(dynamic_range(curve_of(g, one), 1e-9), std::domain_error);
}

TEST(DynamicRange, RequiresGridSpanningZero) {
    const Eigen::VectorXd g = make_grid(0.5, 1.0, 0.25);
    const auto sin1 = [](double x) { return std::sin(x); };
    EXPECT_THROW(dynamic_range(curve_of(g, sin1), 1e-9), std::invalid_argument);
}

TEST(ResponseCurveEval, MatchesScalarExpectationPointwise) {
    const SensingModel m = sample_model(2, 3);
    AnsatzConfig config;
    config.depth = 2;
    Rng rng(13);
    const ParameterVector p = ParameterVector::random(config, 2, rng, -3.0, 3.0);
    const Eigen::VectorXd grid = make_grid(-0.5, 0.5, 0.25);
    const ResponseCurve curve = response_curve(p, m, config, grid);
    ASSERT_EQ(curve.values.size(), grid.size());
    for (Eigen::Index k = 0; k < grid.size(); ++k)
        EXPECT_NEAR(curve.values(k), model_expectation(p, m, config, grid(k)), 1e-12);
}

TEST(ResponseCurveEval, WorkerCountDoesNotChangeValues) {
    const SensingModel m = sample_model(3, 5);
    AnsatzConfig config;
    config.depth = 3;
    Rng rng(21);
    const ParameterVector p = ParameterVector::random(config, 3, rng, -3.0, 3.0);
    const Eigen::VectorXd grid = make_grid(-0.8, 0.8, 0.1);
    const ResponseCurve serial = response_curve(p, m, config, grid, 1);
    const ResponseCurve threaded = response_curve(p, m, config, grid, 4);
    EXPECT_EQ((serial.values - threaded.values).cwiseAbs().maxCoeff(), 0.0);
}

TEST(DeltaIModel, IdentityCircuitReproducesClosedForm) {
    // with no coupling, no gradient field, and zero angles the readout is
    // -cos(h1 I t), whose uncertainty is 1/(h1 t sqrt(M)) at every current
    const SensingModel m = single_qubit(1.3);
    AnsatzConfig config;
    config.depth = 3;
    config.grad.B0 = 0.0;
    const ParameterVector p = ParameterVector::zeros(config, 1);
    for (double current : {0.15, 0.4, -0.6}) {
        const double model_value = delta_I_model(p, m, config, current, 1e-4, 1);
        EXPECT_NEAR(model_value, 1.0 / 1.3, 1e-6);
        EXPECT_NEAR(model_value, delta_I_theory(m.h, current, m.t_sense, 1), 1e-6);
    }
    const double four_shots = delta_I_model(p, m, config, 0.4, 1e-4, 4);
    EXPECT_NEAR(four_shots, 0.5 / 1.3, 1e-6);
}

TEST(DeltaIModel, VanishingSlopeIsADomainError) {
    const SensingModel m = single_qubit(1.3);
    AnsatzConfig config;
    config.depth = 1;
    config.grad.B0 = 0.0;
    const ParameterVector p = ParameterVector::zeros(config, 1);
    EXPECT_THROW(delta_I_model(p, m, config, 0.0, 1e-4, 1), std::domain_error);
    EXPECT_THROW(delta_I_model(p, m, config, 0.4, 0.0, 1), std::invalid_argument);
    EXPECT_THROW(delta_I_model(p, m, config, 0.4, 1e-4, 0), std::invalid_argument);
}

TEST(DeltaISweep, FlagsDivergentRowsInsteadOfThrowing) {
    const SensingModel m = single_qubit(1.3);
    AnsatzConfig config;
    config.depth = 1;
    config.grad.B0 = 0.0;
    const ParameterVector p = ParameterVector::zeros(config, 1);
    const DeltaIResult r = delta_I_sweep(p, m, config, -0.3, 0.3, 0.3, 1);
    ASSERT_EQ(r.grid.size(), 3);
    EXPECT_EQ(r.grid(1), 0.0);

    // the model slope dies at I=0 while the closed form stays finite
    EXPECT_TRUE(r.divergent[1]);
    EXPECT_TRUE(std::isinf(r.delta_model(1)));
    EXPECT_NEAR(r.delta_theory(1), 1.0 / 1.3, 1e-12);
    for (Eigen::Index k : {Eigen::Index(0), Eigen::Index(2)}) {
        EXPECT_FALSE(r.divergent[std::size_t(k)]);
        EXPECT_TRUE(std::isfinite(r.delta_model(k)));
        EXPECT_TRUE(std::isfinite(r.delta_theory(k)));
    }
    EXPECT_EQ(r.shots, 1);
}

TEST(DeltaISweep, ShotCountScalesBothColumns) {
    const SensingModel m = single_qubit(1.1);
    AnsatzConfig config;
    config.depth = 1;
    config.grad.B0 = 0.0;
    const ParameterVector p = ParameterVector::zeros(config, 1);
    const DeltaIResult one = delta_I_sweep(p, m, config, 0.2, 0.6, 0.2, 1);
    const DeltaIResult four = delta_I_sweep(p, m, config, 0.2, 0.6, 0.2, 4);
    ASSERT_EQ(one.grid.size(), four.grid.size());
    for (Eigen::Index k = 0; k < one.grid.size(); ++k) {
        EXPECT_NEAR(four.delta_model(k), 0.5 * one.delta_model(k), 1e-12);
        EXPECT_NEAR(four.delta_theory(k), 0.5 * one.delta_theory(k), 1e-12);
    }
    EXPECT_THROW(delta_I_sweep(p, m, config, 0.2, 0.6, 0.2, 0), std::invalid_argument);
}

TEST(DeltaISweep, WorkerCountDoesNotChangeValues) {
    const SensingModel m = sample_model(2, 3);
    AnsatzConfig config;
    config.depth = 2;
    Rng rng(31);
    const ParameterVector p = ParameterVector::random(config, 2, rng, -3.0, 3.0);
    const DeltaIResult serial = delta_I_sweep(p, m, config, -0.4, 0.4, 0.1, 1, 1e-4, 1);
    const DeltaIResult threaded = delta_I_sweep(p, m, config, -0.4, 0.4, 0.1, 1, 1e-4, 3);
    for (Eigen::Index k = 0; k < serial.grid.size(); ++k) {
        EXPECT_EQ(serial.delta_model(k), threaded.delta_model(k));
        EXPECT_EQ(serial.delta_theory(k), threaded.delta_theory(k));
    }
}

}  // namespace
}  // namespace qclsense
