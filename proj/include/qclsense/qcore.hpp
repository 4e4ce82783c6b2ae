// qcore.hpp
// Dense complex linear algebra for multi-qubit state vectors: Pauli
// embeddings, Hermitian operators, exact unitary evolution through the
// eigensystem, expectation values and variances.
//
// Conventions used throughout:
//  - basis order: qubit 1 is the most significant bit of the basis index,
//    so for L=2 the amplitudes are ordered |00>, |01>, |10>, |11>.
//  - sigma_z = |1><1| - |0><0| = diag(-1, +1); sigma_x and sigma_y complete
//    the right-handed triple (sigma_x sigma_y = i sigma_z) in this frame:
//    sigma_x = [[0,1],[1,0]], sigma_y = [[0,i],[-i,0]].

#pragma once

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <cmath>
#include <complex>
#include <stdexcept>
#include <string>

namespace qclsense {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

enum class Axis { X, Y, Z };

inline char axis_name(Axis a) {
    switch (a) {
        case Axis::X: return 'x';
        case Axis::Y: return 'y';
        default: return 'z';
    }
}

inline Axis parse_axis(char c) {
    switch (c) {
        case 'x': case 'X': return Axis::X;
        case 'y': case 'Y': return Axis::Y;
        case 'z': case 'Z': return Axis::Z;
        default: throw std::invalid_argument(std::string("unknown axis '") + c + "'");
    }
}

// Tolerances are artifact-wide constants; callers rely on them in tests.
inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kNormTol = 1e-10;
inline constexpr double kImagTol = 1e-10;

inline double max_abs(const Matrix& m) { return m.cwiseAbs().maxCoeff(); }

inline double unitarity_defect(const Matrix& u) {
    return max_abs(Matrix(u.adjoint() * u - Matrix::Identity(u.rows(), u.cols())));
}

// Normalized pure state of L qubits, dimension 2^L.
struct QuantumState {
    int num_qubits = 0;
    Vector amplitudes;

    QuantumState() = default;
    QuantumState(int L, Vector amps) : num_qubits(L), amplitudes(std::move(amps)) {
        if (L < 1) throw std::invalid_argument("QuantumState: need at least one qubit");
        if (amplitudes.size() != dim())
            throw std::invalid_argument("QuantumState: amplitude count must be 2^L");
        check_norm();
    }

    Eigen::Index dim() const { return Eigen::Index(1) << num_qubits; }

    void check_norm() const {
        if (std::abs(amplitudes.squaredNorm() - 1.0) > kNormTol)
            throw std::runtime_error("QuantumState: norm drifted beyond tolerance");
    }

    // |b> for a computational basis index (qubit 1 = most significant bit).
    static QuantumState basis(int L, Eigen::Index index) {
        Eigen::Index d = Eigen::Index(1) << L;
        if (index < 0 || index >= d) throw std::invalid_argument("basis index out of range");
        Vector amps = Vector::Zero(d);
        amps(index) = 1.0;
        return QuantumState(L, std::move(amps));
    }

    static QuantumState all_zero(int L) { return basis(L, 0); }

    // |+>^{tensor L}
    static QuantumState plus(int L) {
        Eigen::Index d = Eigen::Index(1) << L;
        Vector amps = Vector::Constant(d, Complex(1.0 / std::sqrt(double(d)), 0.0));
        return QuantumState(L, std::move(amps));
    }
};

// Dense Hermitian matrix; the constructor enforces H = H^dagger within 1e-12.
struct HermitianOperator {
    Matrix entries;

    HermitianOperator() = default;
    explicit HermitianOperator(Matrix m) : entries(std::move(m)) {
        if (entries.rows() != entries.cols())
            throw std::invalid_argument("HermitianOperator: matrix must be square");
        if (max_abs(Matrix(entries - entries.adjoint())) > kHermitianTol)
            throw std::invalid_argument("HermitianOperator: matrix is not Hermitian");
    }

    Eigen::Index dim() const { return entries.rows(); }
};

// Eigensystem of a Hermitian operator: ascending eigenvalues, orthonormal columns.
struct SpectralDecomposition {
    Eigen::VectorXd eigenvalues;
    Matrix eigenvectors;

    Eigen::Index dim() const { return eigenvalues.size(); }
};

inline Matrix pauli_matrix(Axis axis) {
    Matrix m(2, 2);
    const Complex i(0.0, 1.0);
    switch (axis) {
        case Axis::X: m << 0, 1, 1, 0; break;
        case Axis::Y: m << 0, i, -i, 0; break;
        case Axis::Z: m << -1, 0, 0, 1; break;
    }
    return m;
}

inline Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i)
        for (Eigen::Index j = 0; j < a.cols(); ++j)
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
    return out;
}

// Applies a 2x2 operator u to qubit `qubit_index` (1-based, MSB first) of every
// column of `bundle` in place. Equivalent to left-multiplying by
// I (x) ... (x) u (x) ... (x) I without materializing the big matrix.
inline void apply_single_qubit(const Eigen::Matrix2cd& u, int qubit_index, int L,
                               Eigen::Ref<Matrix> bundle) {
    if (qubit_index < 1 || qubit_index > L)
        throw std::invalid_argument("apply_single_qubit: qubit index out of range");
    const Eigen::Index d = Eigen::Index(1) << L;
    if (bundle.rows() != d)
        throw std::invalid_argument("apply_single_qubit: bundle row count must be 2^L");
    const Eigen::Index mask = Eigen::Index(1) << (L - qubit_index);
    Eigen::RowVectorXcd tmp(bundle.cols());
    for (Eigen::Index p = 0; p < d; ++p) {
        if (p & mask) continue;  // visit each (bit=0, bit=1) pair once
        const Eigen::Index q = p | mask;
        tmp = u(0, 0) * bundle.row(p) + u(0, 1) * bundle.row(q);
        bundle.row(q) = u(1, 0) * bundle.row(p) + u(1, 1) * bundle.row(q);
        bundle.row(p) = tmp;
    }
}

// I (x) ... (x) sigma_axis (x) ... (x) I with the Pauli at `qubit_index`.
inline HermitianOperator pauli_embed(Axis axis, int qubit_index, int L) {
    if (L < 1) throw std::invalid_argument("pauli_embed: need at least one qubit");
    if (qubit_index < 1 || qubit_index > L)
        throw std::invalid_argument("pauli_embed: qubit index out of range");
    const Eigen::Index d = Eigen::Index(1) << L;
    Matrix m = Matrix::Zero(d, d);
    const Eigen::Matrix2cd sigma = pauli_matrix(axis);
    const Eigen::Index mask = Eigen::Index(1) << (L - qubit_index);
    for (Eigen::Index p = 0; p < d; ++p) {
        if (p & mask) continue;
        const Eigen::Index q = p | mask;
        m(p, p) = sigma(0, 0);
        m(p, q) = sigma(0, 1);
        m(q, p) = sigma(1, 0);
        m(q, q) = sigma(1, 1);
    }
    return HermitianOperator(std::move(m));
}

// Total magnetization M_axis = sum_j sigma_axis^{(j)}.
inline HermitianOperator total_magnetization(Axis axis, int L) {
    if (L < 1) throw std::invalid_argument("total_magnetization: need at least one qubit");
    const Eigen::Index d = Eigen::Index(1) << L;
    Matrix m = Matrix::Zero(d, d);
    for (int j = 1; j <= L; ++j) m += pauli_embed(axis, j, L).entries;
    return HermitianOperator(std::move(m));
}

// Diagonal of M_z by basis index: popcount counts |1> qubits, each worth +1.
inline Eigen::VectorXd mz_diagonal(int L) {
    const Eigen::Index d = Eigen::Index(1) << L;
    Eigen::VectorXd diag(d);
    for (Eigen::Index b = 0; b < d; ++b)
        diag(b) = 2.0 * double(__builtin_popcountll((unsigned long long)b)) - double(L);
    return diag;
}

inline SpectralDecomposition eigendecompose(const HermitianOperator& h) {
    Eigen::SelfAdjointEigenSolver<Matrix> solver(h.entries);
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("eigendecompose: solver failed to converge");
    return SpectralDecomposition{solver.eigenvalues(), solver.eigenvectors()};
}

// exp(-i H t) assembled from an eigensystem.
inline Matrix propagator(const SpectralDecomposition& spec, double t) {
    const Complex i(0.0, 1.0);
    Vector phases(spec.dim());
    for (Eigen::Index k = 0; k < spec.dim(); ++k)
        phases(k) = std::exp(-i * spec.eigenvalues(k) * t);
    return spec.eigenvectors * phases.asDiagonal() * spec.eigenvectors.adjoint();
}

inline QuantumState evolve(const QuantumState& state, const SpectralDecomposition& spec,
                           double t) {
    if (spec.dim() != state.dim())
        throw std::invalid_argument("evolve: dimension mismatch");
    if (!std::isfinite(t)) throw std::invalid_argument("evolve: time must be finite");
    const Complex i(0.0, 1.0);
    Vector coeffs = spec.eigenvectors.adjoint() * state.amplitudes;
    for (Eigen::Index k = 0; k < spec.dim(); ++k)
        coeffs(k) *= std::exp(-i * spec.eigenvalues(k) * t);
    return QuantumState(state.num_qubits, spec.eigenvectors * coeffs);
}

inline QuantumState evolve(const QuantumState& state, const HermitianOperator& h, double t) {
    if (h.dim() != state.dim()) throw std::invalid_argument("evolve: dimension mismatch");
    return evolve(state, eigendecompose(h), t);
}

// <state|O|state>; the imaginary residue must be numerical noise only.
inline double expectation(const QuantumState& state, const HermitianOperator& o) {
    if (o.dim() != state.dim()) throw std::invalid_argument("expectation: dimension mismatch");
    const Complex value = state.amplitudes.dot(o.entries * state.amplitudes);
    if (std::abs(value.imag()) > kImagTol)
        throw std::runtime_error("expectation: imaginary residue above tolerance");
    return value.real();
}

// <O^2> - <O>^2, computed as ||O psi||^2 - <O>^2 and clamped at zero.
inline double variance(const QuantumState& state, const HermitianOperator& o) {
    if (o.dim() != state.dim()) throw std::invalid_argument("variance: dimension mismatch");
    const Vector opsi = o.entries * state.amplitudes;
    const Complex mean = state.amplitudes.dot(opsi);
    if (std::abs(mean.imag()) > kImagTol)
        throw std::runtime_error("variance: imaginary residue above tolerance");
    const double raw = opsi.squaredNorm() - mean.real() * mean.real();
    if (raw < -kImagTol) throw std::runtime_error("variance: negative beyond tolerance");
    return raw < 0.0 ? 0.0 : raw;
}

}  // namespace qclsense
