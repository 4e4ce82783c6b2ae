// sensing.hpp
// The sensor model: randomly sampled couplings, the current-dependent data
// Hamiltonian, input-state preparation, and the closed-form single-qubit and
// ensemble estimation formulas used as baselines.

#pragma once

#include "qclsense/qcore.hpp"
#include "qclsense/random.hpp"
#include "qclsense/spin_sector.hpp"

#include <cstdint>
#include <vector>

namespace qclsense {

inline constexpr double kSlopeFloor = 1e-12;  // below this, a response is locally flat

// Per-qubit gradient field strengths B_j = B0 * j, identical for all axes.
struct GradientFieldSpec {
    double B0 = 1.0;

    void validate() const {
        if (!std::isfinite(B0)) throw std::invalid_argument("GradientFieldSpec: B0 must be finite");
    }
};

// L qubits with pairwise couplings J and per-qubit field couplings h,
// sensed over a fixed interaction time.
struct SensingModel {
    int L = 0;
    double t_sense = 1.0;
    std::uint64_t seed = 0;
    Eigen::VectorXd h;   // relative coupling to the current, length L
    Eigen::MatrixXd J;   // pair coupling strengths, symmetric, zero diagonal

    void validate() const {
        if (L < 1) throw std::invalid_argument("SensingModel: need at least one qubit");
        if (!std::isfinite(t_sense)) throw std::invalid_argument("SensingModel: t_sense must be finite");
        if (h.size() != L) throw std::invalid_argument("SensingModel: h must have L entries");
        if (J.rows() != L || J.cols() != L)
            throw std::invalid_argument("SensingModel: J must be L x L");
        if ((J - J.transpose()).cwiseAbs().maxCoeff() > kHermitianTol)
            throw std::invalid_argument("SensingModel: J must be symmetric");
        if (J.diagonal().cwiseAbs().maxCoeff() > kHermitianTol)
            throw std::invalid_argument("SensingModel: J diagonal must vanish");
        if (!h.allFinite() || !J.allFinite())
            throw std::invalid_argument("SensingModel: entries must be finite");
    }
};

// h_j = 0.5 + 2*r_j, J_ij = -1 + 2*s_ij. Draw order is h_1..h_L then the
// upper triangle of J row by row; this order is part of the file contract.
inline SensingModel sample_model(int L, std::uint64_t seed, double t_sense = 1.0) {
    if (L < 1) throw std::invalid_argument("sample_model: need at least one qubit");
    Rng rng(seed);
    SensingModel m;
    m.L = L;
    m.t_sense = t_sense;
    m.seed = seed;
    m.h.resize(L);
    for (int j = 0; j < L; ++j) m.h(j) = 0.5 + 2.0 * rng.uniform01();
    m.J = Eigen::MatrixXd::Zero(L, L);
    for (int i = 0; i < L; ++i)
        for (int j = i + 1; j < L; ++j) {
            const double v = -1.0 + 2.0 * rng.uniform01();
            m.J(i, j) = v;
            m.J(j, i) = v;
        }
    m.validate();
    return m;
}

// H_I alone; the axis is irrelevant with a zero field.
inline AxisFieldHamiltonian interaction_hamiltonian(const SensingModel& m) {
    m.validate();
    return AxisFieldHamiltonian{Axis::Z, m.J, Eigen::VectorXd::Zero(m.L)};
}

// H_I + sum_j (h_j I / 2) sigma_y^{(j)}
inline AxisFieldHamiltonian data_hamiltonian(const SensingModel& m, double current) {
    m.validate();
    if (!std::isfinite(current)) throw std::invalid_argument("data_hamiltonian: current must be finite");
    return AxisFieldHamiltonian{Axis::Y, m.J, (0.5 * current) * m.h};
}

// sum_j B0*j*sigma_axis^{(j)} + H_I
inline AxisFieldHamiltonian gradient_hamiltonian(const SensingModel& m, const GradientFieldSpec& g,
                                                 Axis axis) {
    m.validate();
    g.validate();
    Eigen::VectorXd b(m.L);
    for (int j = 1; j <= m.L; ++j) b(j - 1) = g.B0 * double(j);
    return AxisFieldHamiltonian{axis, m.J, b};
}

// exp(-i H_data t_sense)|0...0>
inline QuantumState input_state(const SensingModel& m, double current) {
    SectorEvolution evo(data_hamiltonian(m, current));
    return evo.evolve(QuantumState::all_zero(m.L), m.t_sense);
}

// One input state per current value, as columns of a 2^L x K matrix.
inline Matrix input_bundle(const SensingModel& m, const std::vector<double>& currents) {
    m.validate();
    const Eigen::Index d = Eigen::Index(1) << m.L;
    Matrix bundle = Matrix::Zero(d, Eigen::Index(currents.size()));
    for (std::size_t k = 0; k < currents.size(); ++k)
        bundle.col(Eigen::Index(k)) = input_state(m, currents[k]).amplitudes;
    return bundle;
}

// Single-qubit protocol: prepare |+>, precess, read out the orthogonal axis.
inline double ramsey_expectation(double omega, double t) {
    if (!std::isfinite(omega) || !std::isfinite(t))
        throw std::invalid_argument("ramsey_expectation: arguments must be finite");
    return std::sin(omega * t);
}

inline double ramsey_estimate(double expval, double t) {
    if (!(t > 0.0)) throw std::invalid_argument("ramsey_estimate: t must be positive");
    if (std::abs(expval) > 1.0)
        throw std::domain_error("ramsey_estimate: expectation outside [-1, 1]");
    return std::asin(expval) / t;
}

inline double ramsey_uncertainty(double t, int shots) {
    if (!(t > 0.0)) throw std::invalid_argument("ramsey_uncertainty: t must be positive");
    if (shots < 1) throw std::invalid_argument("ramsey_uncertainty: shots must be >= 1");
    return 1.0 / (t * std::sqrt(double(shots)));
}

// Non-interacting ensemble readout: sum_j sin(h_j I t).
inline double ensemble_expectation(const Eigen::VectorXd& h, double current, double t) {
    double sum = 0.0;
    for (Eigen::Index j = 0; j < h.size(); ++j) sum += std::sin(h(j) * current * t);
    return sum;
}

inline double ensemble_estimate_linear(double expval, const Eigen::VectorXd& h, double t) {
    const double denom = t * h.sum();
    if (denom == 0.0)
        throw std::invalid_argument("ensemble_estimate_linear: t * sum(h) must be nonzero");
    return expval / denom;
}

// Shot-noise uncertainty of the non-interacting ensemble estimate:
// sqrt(sum_j (1 - sin^2(h_j I t))) / (|sum_j h_j t cos(h_j I t)| sqrt(M)).
inline double delta_I_theory(const Eigen::VectorXd& h, double current, double t, int shots) {
    if (shots < 1) throw std::invalid_argument("delta_I_theory: shots must be >= 1");
    double variance_sum = 0.0;
    double slope = 0.0;
    for (Eigen::Index j = 0; j < h.size(); ++j) {
        const double phase = h(j) * current * t;
        variance_sum += 1.0 - std::sin(phase) * std::sin(phase);
        slope += h(j) * t * std::cos(phase);
    }
    if (std::abs(slope) < kSlopeFloor)
        throw std::domain_error("delta_I_theory: response slope vanishes");
    return std::sqrt(variance_sum) / (std::abs(slope) * std::sqrt(double(shots)));
}

}  // namespace qclsense
