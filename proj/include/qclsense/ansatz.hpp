// ansatz.hpp
// The trainable circuit: global rotation layers interleaved with fixed
// interaction and gradient-field evolutions,
//     U = prod_d  E_z R_z(t3) C  E_y R_y(t2) C  E_x R_x(t1) C,
// where C = exp(-i H_I t), E_a = exp(-i H_gra_a t), and the layer d = 1
// factor acts on the state first. The I-independent unitaries are cached once
// per model; rotations are applied as structured per-qubit 2x2 updates.

#pragma once

#include "qclsense/qcore.hpp"
#include "qclsense/random.hpp"
#include "qclsense/sensing.hpp"
#include "qclsense/spin_sector.hpp"

#include <string>

namespace qclsense {

enum class Sharing { shared, per_qubit };

inline std::string sharing_name(Sharing s) {
    return s == Sharing::shared ? "shared" : "per_qubit";
}

inline Sharing parse_sharing(const std::string& name) {
    if (name == "shared") return Sharing::shared;
    if (name == "per_qubit") return Sharing::per_qubit;
    throw std::invalid_argument("unknown sharing mode '" + name + "'");
}

struct AnsatzConfig {
    int depth = 20;
    double t_gate = 1.0;
    GradientFieldSpec grad{};
    Sharing sharing = Sharing::shared;

    void validate() const {
        if (depth < 1) throw std::invalid_argument("AnsatzConfig: depth must be >= 1");
        if (!std::isfinite(t_gate)) throw std::invalid_argument("AnsatzConfig: t_gate must be finite");
        grad.validate();
    }

    int angles_per_layer(int L) const { return sharing == Sharing::shared ? 3 : 3 * L; }
    int parameter_count(int L) const { return depth * angles_per_layer(L); }
};

// Rotation angles in layer-major order: layer d holds (t1, t2, t3) in shared
// mode, or (t1, t2, t3) per qubit in qubit order in per_qubit mode.
struct ParameterVector {
    Sharing sharing = Sharing::shared;
    int depth = 0;
    int num_qubits = 0;
    Eigen::VectorXd values;

    void validate() const {
        if (depth < 1) throw std::invalid_argument("ParameterVector: depth must be >= 1");
        if (num_qubits < 1) throw std::invalid_argument("ParameterVector: need at least one qubit");
        const Eigen::Index expected =
            Eigen::Index(depth) * (sharing == Sharing::shared ? 3 : 3 * num_qubits);
        if (values.size() != expected)
            throw std::invalid_argument("ParameterVector: angle count does not match layout");
        if (!values.allFinite())
            throw std::invalid_argument("ParameterVector: angles must be finite");
    }

    // layer and qubit are 1-based; axis_index is 0 (x), 1 (y), 2 (z).
    double angle(int layer, int axis_index, int qubit) const {
        if (sharing == Sharing::shared)
            return values(Eigen::Index(3) * (layer - 1) + axis_index);
        return values(Eigen::Index(3) * num_qubits * (layer - 1) + 3 * (qubit - 1) + axis_index);
    }

    static ParameterVector zeros(const AnsatzConfig& config, int L) {
        config.validate();
        ParameterVector p{config.sharing, config.depth, L,
                          Eigen::VectorXd::Zero(config.parameter_count(L))};
        p.validate();
        return p;
    }

    static ParameterVector random(const AnsatzConfig& config, int L, Rng& rng, double lo,
                                  double hi) {
        config.validate();
        if (!(lo < hi)) throw std::invalid_argument("ParameterVector: need lo < hi");
        ParameterVector p{config.sharing, config.depth, L,
                          Eigen::VectorXd(config.parameter_count(L))};
        for (Eigen::Index k = 0; k < p.values.size(); ++k) p.values(k) = rng.uniform(lo, hi);
        p.validate();
        return p;
    }
};

inline Eigen::Matrix2cd rotation_gate(Axis axis, double theta) {
    if (!std::isfinite(theta)) throw std::invalid_argument("rotation_gate: angle must be finite");
    const double c = std::cos(0.5 * theta);
    const double s = std::sin(0.5 * theta);
    const Complex i(0.0, 1.0);
    Eigen::Matrix2cd r;
    switch (axis) {
        case Axis::X: r << c, -i * s, -i * s, c; break;
        case Axis::Y: r << c, -s, s, c; break;
        case Axis::Z: r << std::exp(-i * (0.5 * theta)), 0.0, 0.0, std::exp(i * (0.5 * theta)); break;
    }
    return r;
}

// Tensor product of per-qubit rotations; thetas holds one shared angle or one
// angle per qubit.
inline Matrix global_rotation(Axis axis, const Eigen::VectorXd& thetas, int L) {
    if (L < 1) throw std::invalid_argument("global_rotation: need at least one qubit");
    if (thetas.size() != 1 && thetas.size() != L)
        throw std::invalid_argument("global_rotation: need one angle or one per qubit");
    Matrix u = Matrix::Identity(Eigen::Index(1) << L, Eigen::Index(1) << L);
    for (int q = 1; q <= L; ++q) {
        const double theta = thetas.size() == 1 ? thetas(0) : thetas(q - 1);
        apply_single_qubit(rotation_gate(axis, theta), q, L, u);
    }
    return u;
}

class CompiledAnsatz {
public:
    CompiledAnsatz(const SensingModel& model, const AnsatzConfig& config)
        : model_(model), config_(config) {
        model_.validate();
        config_.validate();
        const double t = config_.t_gate;
        interaction_ = SectorEvolution(interaction_hamiltonian(model_)).propagator_dense(t);
        for (Axis a : {Axis::X, Axis::Y, Axis::Z}) {
            Matrix& e = gradient_mut(a);
            e = SectorEvolution(gradient_hamiltonian(model_, config_.grad, a)).propagator_dense(t);
            if (unitarity_defect(e) > kNormTol)
                throw std::runtime_error("CompiledAnsatz: cached propagator lost unitarity");
            fused_mut(a).noalias() = interaction_ * e;
        }
        if (unitarity_defect(interaction_) > kNormTol)
            throw std::runtime_error("CompiledAnsatz: cached propagator lost unitarity");
        mz_ = mz_diagonal(model_.L);
    }

    const SensingModel& model() const { return model_; }
    const AnsatzConfig& config() const { return config_; }
    Eigen::Index dim() const { return Eigen::Index(1) << model_.L; }
    const Matrix& interaction() const { return interaction_; }
    const Matrix& gradient(Axis a) const {
        return a == Axis::X ? gradient_x_ : a == Axis::Y ? gradient_y_ : gradient_z_;
    }
    const Eigen::VectorXd& mz() const { return mz_; }

    // Applies the full circuit to every column in place.
    void apply(const ParameterVector& params, Eigen::Ref<Matrix> bundle) const {
        check(params);
        Matrix scratch(bundle.rows(), bundle.cols());
        multiply(interaction_, bundle, scratch);
        for (int d = 1; d <= config_.depth; ++d) {
            rotate(Axis::X, params, d, bundle);
            multiply(fused_x_, bundle, scratch);
            rotate(Axis::Y, params, d, bundle);
            multiply(fused_y_, bundle, scratch);
            rotate(Axis::Z, params, d, bundle);
            multiply(d < config_.depth ? fused_z_ : gradient_z_, bundle, scratch);
        }
    }

    // Response values <M_z> for each input column, in one circuit pass.
    Eigen::VectorXd expectations(const ParameterVector& params, const Matrix& inputs) const {
        Matrix bundle = inputs;
        apply(params, bundle);
        Eigen::VectorXd out(bundle.cols());
        for (Eigen::Index k = 0; k < bundle.cols(); ++k)
            out(k) = bundle.col(k).cwiseAbs2().dot(mz_);
        return out;
    }

    double expectation(const ParameterVector& params, double current) const {
        Matrix bundle = input_state(model_, current).amplitudes;
        apply(params, bundle);
        return bundle.col(0).cwiseAbs2().dot(mz_);
    }

    QuantumState apply_to_state(const ParameterVector& params, const QuantumState& state) const {
        if (state.num_qubits != model_.L)
            throw std::invalid_argument("CompiledAnsatz: qubit count mismatch");
        Matrix bundle = state.amplitudes;
        apply(params, bundle);
        return QuantumState(model_.L, bundle.col(0));
    }

    // One depth-d factor as a dense matrix; used to cross-check apply().
    Matrix layer_unitary(const ParameterVector& params, int layer) const {
        check(params);
        if (layer < 1 || layer > config_.depth)
            throw std::invalid_argument("CompiledAnsatz: layer index out of range");
        Matrix u = interaction_;
        Matrix scratch(u.rows(), u.cols());
        rotate(Axis::X, params, layer, u);
        multiply(gradient_x_, u, scratch);
        multiply(interaction_, u, scratch);
        rotate(Axis::Y, params, layer, u);
        multiply(gradient_y_, u, scratch);
        multiply(interaction_, u, scratch);
        rotate(Axis::Z, params, layer, u);
        multiply(gradient_z_, u, scratch);
        return u;
    }

    Matrix circuit_unitary(const ParameterVector& params) const {
        Matrix u = Matrix::Identity(dim(), dim());
        Matrix scratch(u.rows(), u.cols());
        for (int d = 1; d <= config_.depth; ++d) multiply(layer_unitary(params, d), u, scratch);
        return u;
    }

private:
    void check(const ParameterVector& params) const {
        params.validate();
        if (params.sharing != config_.sharing || params.depth != config_.depth ||
            params.num_qubits != model_.L)
            throw std::invalid_argument("CompiledAnsatz: parameter layout mismatch");
    }

    static void multiply(const Matrix& op, Eigen::Ref<Matrix> bundle, Matrix& scratch) {
        scratch.noalias() = op * bundle;
        bundle = scratch;
    }

    void rotate(Axis axis, const ParameterVector& params, int layer,
                Eigen::Ref<Matrix> bundle) const {
        const int a = axis == Axis::X ? 0 : axis == Axis::Y ? 1 : 2;
        if (config_.sharing == Sharing::shared) {
            const Eigen::Matrix2cd r = rotation_gate(axis, params.angle(layer, a, 1));
            for (int q = 1; q <= model_.L; ++q) apply_single_qubit(r, q, model_.L, bundle);
        } else {
            for (int q = 1; q <= model_.L; ++q)
                apply_single_qubit(rotation_gate(axis, params.angle(layer, a, q)), q, model_.L,
                                   bundle);
        }
    }

    Matrix& gradient_mut(Axis a) {
        return a == Axis::X ? gradient_x_ : a == Axis::Y ? gradient_y_ : gradient_z_;
    }
    Matrix& fused_mut(Axis a) { return a == Axis::X ? fused_x_ : a == Axis::Y ? fused_y_ : fused_z_; }

    SensingModel model_;
    AnsatzConfig config_;
    Matrix interaction_;
    Matrix gradient_x_, gradient_y_, gradient_z_;
    Matrix fused_x_, fused_y_, fused_z_;
    Eigen::VectorXd mz_;
};

inline double model_expectation(const ParameterVector& params, const SensingModel& model,
                                const AnsatzConfig& config, double current) {
    return CompiledAnsatz(model, config).expectation(params, current);
}

}  // namespace qclsense
