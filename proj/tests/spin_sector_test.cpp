#include "qclsense/spin_sector.hpp"

#include <gtest/gtest.h>

namespace qclsense {
namespace {

AxisFieldHamiltonian three_qubit_fixture(Axis axis) {
    Eigen::MatrixXd J(3, 3);
    J << 0.0, 0.4, -0.2,
         0.4, 0.0, 0.7,
        -0.2, 0.7, 0.0;
    Eigen::VectorXd c(3);
    c << 0.9, -1.1, 0.35;
    return AxisFieldHamiltonian{axis, J, c};
}

TEST(AxisFrame, ConjugatesZOntoAxis) {
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
        const Eigen::Matrix2cd v = axis_frame(a);
        EXPECT_LT(unitarity_defect(Matrix(v)), 1e-15);
        const Matrix rotated = v * pauli_matrix(Axis::Z) * v.adjoint();
        EXPECT_LT(max_abs(Matrix(rotated - pauli_matrix(a))), 1e-15) << axis_name(a);
    }
}

TEST(AxisFieldHamiltonian, ValidationRejectsBadCouplings) {
    AxisFieldHamiltonian h = three_qubit_fixture(Axis::Z);
    EXPECT_NO_THROW(h.validate());

    AxisFieldHamiltonian asym = h;
    asym.couplings(0, 1) = 0.5;
    EXPECT_THROW(asym.validate(), std::invalid_argument);

    AxisFieldHamiltonian diag = h;
    diag.couplings(1, 1) = 0.1;
    EXPECT_THROW(diag.validate(), std::invalid_argument);

    AxisFieldHamiltonian shape = h;
    shape.couplings = Eigen::MatrixXd::Zero(2, 2);
    EXPECT_THROW(shape.validate(), std::invalid_argument);

    AxisFieldHamiltonian empty;
    empty.coeffs = Eigen::VectorXd();
    empty.couplings = Eigen::MatrixXd();
    EXPECT_THROW(empty.validate(), std::invalid_argument);
}

TEST(AxisFieldHamiltonian, DenseFormIsHermitianAndAxisAligned) {
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
        const AxisFieldHamiltonian h = three_qubit_fixture(a);
        const HermitianOperator dense = h.to_dense();
        ASSERT_EQ(dense.dim(), 8);
        // the coupling part is isotropic and the field lies along a, so the
        // whole H commutes with the total magnetization along a
        const Matrix m = total_magnetization(a, 3).entries;
        EXPECT_LT(max_abs(Matrix(dense.entries * m - m * dense.entries)), 1e-12);
    }
}

TEST(SectorEvolution, MatchesDenseEigensolver) {
    for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
        const AxisFieldHamiltonian h = three_qubit_fixture(a);
        const SectorEvolution evo(h);
        const double t = 1.37;
        const Matrix via_sectors = evo.propagator_dense(t);
        const Matrix via_dense = propagator(eigendecompose(h.to_dense()), t);
        EXPECT_LT(max_abs(Matrix(via_sectors - via_dense)), 1e-12) << axis_name(a);
        EXPECT_LT(unitarity_defect(via_sectors), 1e-12);
    }
}

TEST(SectorEvolution, FrozenOracleAmplitudes) {
    // exp(-i H 0.8)|101> for the y-axis fixture, amplitudes frozen from an
    // independent dense matrix exponential
    const SectorEvolution evo(three_qubit_fixture(Axis::Y));
    const QuantumState out = evo.evolve(QuantumState::basis(3, 5), 0.8);
    EXPECT_NEAR(out.amplitudes(0).real(), -0.0475889851340663, 1e-12);
    EXPECT_NEAR(out.amplitudes(0).imag(), 0.23988877715603193, 1e-12);
    EXPECT_NEAR(out.amplitudes(3).real(), 0.44507603584838945, 1e-12);
    EXPECT_NEAR(out.amplitudes(3).imag(), -0.16706404473671288, 1e-12);
    EXPECT_NEAR(out.amplitudes(5).real(), -0.042616949002968196, 1e-12);
    EXPECT_NEAR(out.amplitudes(5).imag(), 0.029760805646553423, 1e-12);
}

TEST(SectorEvolution, ZeroTimeIsIdentity) {
    const SectorEvolution evo(three_qubit_fixture(Axis::X));
    const Matrix u = evo.propagator_dense(0.0);
    EXPECT_LT(max_abs(Matrix(u - Matrix::Identity(8, 8))), 1e-13);
}

TEST(SectorEvolution, PreservesNormOnBundles) {
    const SectorEvolution evo(three_qubit_fixture(Axis::Z));
    Matrix bundle(8, 3);
    for (Eigen::Index r = 0; r < 8; ++r)
        for (Eigen::Index c = 0; c < 3; ++c)
            bundle(r, c) = Complex(std::sin(double(r + 7 * c + 1)), std::cos(double(2 * r - c)));
    const Eigen::VectorXd norms_before = bundle.colwise().norm().real();
    evo.apply_propagator(2.41, bundle);
    const Eigen::VectorXd norms_after = bundle.colwise().norm().real();
    EXPECT_LT((norms_before - norms_after).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(SectorEvolution, RejectsBadInputs) {
    const SectorEvolution evo(three_qubit_fixture(Axis::Z));
    Matrix wrong(4, 1);
    EXPECT_THROW(evo.apply_propagator(1.0, wrong), std::invalid_argument);
    Matrix ok(8, 1);
    ok.setZero();
    ok(0, 0) = 1.0;
    EXPECT_THROW(evo.apply_propagator(std::nan(""), ok), std::invalid_argument);
    EXPECT_THROW(evo.evolve(QuantumState::all_zero(2), 1.0), std::invalid_argument);
}

TEST(SectorEvolution, LargerSystemStaysUnitary) {
    Eigen::MatrixXd J = Eigen::MatrixXd::Zero(5, 5);
    Eigen::VectorXd c(5);
    for (int i = 0; i < 5; ++i) {
        c(i) = 0.3 * double(i + 1);
        for (int j = i + 1; j < 5; ++j) J(i, j) = J(j, i) = 0.1 * double(i - j);
    }
    const SectorEvolution evo(AxisFieldHamiltonian{Axis::Y, J, c});
    EXPECT_LT(unitarity_defect(evo.propagator_dense(0.9)), 1e-11);
}

}  // namespace
}  // namespace qclsense
