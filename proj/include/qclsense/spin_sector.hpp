// spin_sector.hpp
// Exact evolution for Hamiltonians of the shape
//     H = sum_{i<j} J_ij (XX + YY + ZZ) + sum_j c_j sigma_axis^{(j)}.
// A global single-qubit frame rotation maps the field onto sigma_z while
// leaving the isotropic coupling untouched; the rotated Hamiltonian commutes
// with total sigma_z, so it splits into popcount sectors whose largest block
// is C(L, L/2), far smaller than 2^L. Each block is real symmetric.

#pragma once

#include "qclsense/qcore.hpp"

#include <utility>
#include <vector>

namespace qclsense {

// v with v sigma_z v^dagger = sigma_axis.
inline Eigen::Matrix2cd axis_frame(Axis axis) {
    const double s = 1.0 / std::sqrt(2.0);
    const Complex i(0.0, 1.0);
    Eigen::Matrix2cd v;
    switch (axis) {
        case Axis::X: v << s, s, -s, s; break;
        case Axis::Y: v << s, i * s, i * s, s; break;
        case Axis::Z: v.setIdentity(); break;
    }
    return v;
}

// Isotropic pairwise coupling plus a per-qubit field along a single axis.
struct AxisFieldHamiltonian {
    Axis axis = Axis::Z;
    Eigen::MatrixXd couplings;  // J, symmetric with zero diagonal
    Eigen::VectorXd coeffs;     // c_j, one entry per qubit

    int num_qubits() const { return int(coeffs.size()); }

    void validate() const {
        const Eigen::Index L = coeffs.size();
        if (L < 1) throw std::invalid_argument("AxisFieldHamiltonian: need at least one qubit");
        if (couplings.rows() != L || couplings.cols() != L)
            throw std::invalid_argument("AxisFieldHamiltonian: coupling matrix must be L x L");
        if ((couplings - couplings.transpose()).cwiseAbs().maxCoeff() > kHermitianTol)
            throw std::invalid_argument("AxisFieldHamiltonian: couplings must be symmetric");
        if (couplings.diagonal().cwiseAbs().maxCoeff() > kHermitianTol)
            throw std::invalid_argument("AxisFieldHamiltonian: coupling diagonal must vanish");
        if (!coeffs.allFinite() || !couplings.allFinite())
            throw std::invalid_argument("AxisFieldHamiltonian: entries must be finite");
    }

    HermitianOperator to_dense() const {
        validate();
        const int L = num_qubits();
        const Eigen::Index d = Eigen::Index(1) << L;
        Matrix h = Matrix::Zero(d, d);
        for (int i = 1; i <= L; ++i)
            for (int j = i + 1; j <= L; ++j) {
                const double jij = couplings(i - 1, j - 1);
                if (jij == 0.0) continue;
                for (Axis a : {Axis::X, Axis::Y, Axis::Z})
                    h += jij * (pauli_embed(a, i, L).entries * pauli_embed(a, j, L).entries);
            }
        for (int j = 1; j <= L; ++j) h += coeffs(j - 1) * pauli_embed(axis, j, L).entries;
        return HermitianOperator(std::move(h));
    }
};

// Precomputed sector eigensystems for one AxisFieldHamiltonian.
class SectorEvolution {
public:
    explicit SectorEvolution(const AxisFieldHamiltonian& h)
        : L_(h.num_qubits()), frame_(axis_frame(h.axis)) {
        h.validate();
        build(h);
    }

    int num_qubits() const { return L_; }
    Eigen::Index dim() const { return Eigen::Index(1) << L_; }

    // In-place exp(-i H t) on every column of the bundle.
    void apply_propagator(double t, Eigen::Ref<Matrix> bundle) const {
        if (bundle.rows() != dim())
            throw std::invalid_argument("SectorEvolution: bundle row count must be 2^L");
        if (!std::isfinite(t)) throw std::invalid_argument("SectorEvolution: time must be finite");
        const Eigen::Matrix2cd vdag = frame_.adjoint();
        for (int j = 1; j <= L_; ++j) apply_single_qubit(vdag, j, L_, bundle);
        const Complex mi(0.0, -1.0);
        Matrix sub, coords;
        for (std::size_t s = 0; s < sector_states_.size(); ++s) {
            const auto& idx = sector_states_[s];
            const Eigen::Index n = Eigen::Index(idx.size());
            sub.resize(n, bundle.cols());
            for (Eigen::Index a = 0; a < n; ++a) sub.row(a) = bundle.row(idx[a]);
            coords.noalias() = sector_vectors_[s].adjoint() * sub;
            for (Eigen::Index k = 0; k < n; ++k)
                coords.row(k) *= std::exp(mi * sector_values_[s](k) * t);
            sub.noalias() = sector_vectors_[s] * coords;
            for (Eigen::Index a = 0; a < n; ++a) bundle.row(idx[a]) = sub.row(a);
        }
        for (int j = 1; j <= L_; ++j) apply_single_qubit(frame_, j, L_, bundle);
    }

    QuantumState evolve(const QuantumState& state, double t) const {
        if (state.num_qubits != L_)
            throw std::invalid_argument("SectorEvolution: qubit count mismatch");
        Matrix bundle = state.amplitudes;
        apply_propagator(t, bundle);
        return QuantumState(L_, bundle.col(0));
    }

    // Dense exp(-i H t), assembled without touching the full 2^L eigenproblem.
    Matrix propagator_dense(double t) const {
        Matrix p = Matrix::Identity(dim(), dim());
        apply_propagator(t, p);
        return p;
    }

private:
    void build(const AxisFieldHamiltonian& h) {
        const Eigen::Index d = dim();
        sector_states_.assign(std::size_t(L_) + 1, {});
        for (Eigen::Index b = 0; b < d; ++b)
            sector_states_[std::size_t(__builtin_popcountll((unsigned long long)b))].push_back(b);
        std::vector<Eigen::Index> pos(static_cast<std::size_t>(d));
        sector_values_.resize(sector_states_.size());
        sector_vectors_.resize(sector_states_.size());
        for (std::size_t s = 0; s < sector_states_.size(); ++s) {
            const auto& idx = sector_states_[s];
            const Eigen::Index n = Eigen::Index(idx.size());
            for (Eigen::Index a = 0; a < n; ++a) pos[std::size_t(idx[a])] = a;
            Eigen::MatrixXd block = Eigen::MatrixXd::Zero(n, n);
            for (Eigen::Index a = 0; a < n; ++a) {
                const Eigen::Index b = idx[std::size_t(a)];
                double diag = 0.0;
                for (int j = 1; j <= L_; ++j) diag += h.coeffs(j - 1) * zval(b, j);
                for (int i = 1; i <= L_; ++i)
                    for (int j = i + 1; j <= L_; ++j) {
                        const double jij = h.couplings(i - 1, j - 1);
                        if (jij == 0.0) continue;
                        diag += jij * zval(b, i) * zval(b, j);
                        if (zval(b, i) != zval(b, j)) {
                            const Eigen::Index partner = b ^ qubit_mask(i) ^ qubit_mask(j);
                            block(a, pos[std::size_t(partner)]) = 2.0 * jij;
                        }
                    }
                block(a, a) = diag;
            }
            Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(block);
            if (solver.info() != Eigen::Success)
                throw std::runtime_error("SectorEvolution: sector eigensolver failed");
            sector_values_[s] = solver.eigenvalues();
            sector_vectors_[s] = solver.eigenvectors().cast<Complex>();
        }
    }

    Eigen::Index qubit_mask(int j) const { return Eigen::Index(1) << (L_ - j); }
    double zval(Eigen::Index b, int j) const { return (b & qubit_mask(j)) ? 1.0 : -1.0; }

    int L_;
    Eigen::Matrix2cd frame_;
    std::vector<std::vector<Eigen::Index>> sector_states_;
    std::vector<Eigen::VectorXd> sector_values_;
    std::vector<Matrix> sector_vectors_;
};

}  // namespace qclsense
