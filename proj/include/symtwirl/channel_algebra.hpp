#pragma once

#include "symtwirl/group_symmetry.hpp"
#include "symtwirl/operator_core.hpp"

#include <memory>
#include <optional>
#include <vector>

namespace symtwirl {

inline constexpr double kTracePreservingTol = 1e-8;
inline constexpr double kInvertibilityTol = 1e-8;

// ============================================================================
// QuantumChannel
// ============================================================================

/// Completely positive trace-preserving map stored as a Kraus list together
/// with its real transfer matrix A_E (entries tr[H_i E(H_j)] in the
/// orthonormal Hermitian basis of the dimension). Immutable after
/// construction; copies share state.
class QuantumChannel {
  public:
    static QuantumChannel from_kraus(std::vector<Matrix> kraus,
                                     double tp_tol = kTracePreservingTol);
    static QuantumChannel identity(Eigen::Index dim);

    Eigen::Index dim() const;
    const std::vector<Matrix>& kraus() const;

    /// A_E; the dual map's matrix is its transpose.
    const Eigen::MatrixXd& transfer() const;

    /// sigma_max / sigma_min of A_E (inf when singular). Computed lazily.
    double transfer_condition() const;
    bool invertible(double tol = kInvertibilityTol) const;

    /// E(h) = sum_i K_i h K_i^dag.
    HermitianOperator apply(const HermitianOperator& h) const;
    DensityMatrix apply(const DensityMatrix& rho) const;
    Matrix apply_raw(const Matrix& h) const;

    /// E*(h) = sum_i K_i^dag h K_i.
    HermitianOperator dual_apply(const HermitianOperator& h) const;
    Matrix dual_apply_raw(const Matrix& h) const;

    /// Solves A_{E*} x = coords(h); throws std::domain_error when the channel
    /// is not invertible. No inverse-channel Kraus form is ever built (the
    /// inverse is generally not completely positive).
    HermitianOperator inverse_dual_apply(const HermitianOperator& h) const;
    Matrix inverse_dual_apply_raw(const Matrix& h) const;

    /// Cached E(H_j) for the orthonormal basis (available for dim <= 32).
    const std::vector<Matrix>* basis_images() const;

  private:
    struct Impl;
    explicit QuantumChannel(std::shared_ptr<const Impl> impl) : impl_(std::move(impl)) {}
    std::shared_ptr<const Impl> impl_;
};

// ============================================================================
// Named noise models and composition
// ============================================================================

/// Single-qubit dephasing (1 - p/2) rho + (p/2) sigma_z rho sigma_z, 0 <= p < 1
/// (not invertible at p = 1).
QuantumChannel dephasing(double p);

/// Depolarizing (1 - lambda) rho + lambda tr(rho) 1/d, 0 <= lambda < 1.
QuantumChannel depolarizing(double lambda, Eigen::Index d = 2);

/// Kraus list of all tensor products of the factors' Kraus operators.
QuantumChannel tensor(const std::vector<QuantumChannel>& factors);

/// n-fold tensor power.
QuantumChannel tensor_power(const QuantumChannel& factor, int n);

/// Transfer matrix of the dephasing *map* for arbitrary p, including the
/// non-CP parameter range p < 0 reached by the inverse dual p -> p/(p-1).
Eigen::MatrixXd dephasing_transfer_matrix(double p);

// ============================================================================
// Predicates
// ============================================================================

/// True iff E(U_g h U_g^dag) = U_g E(h) U_g^dag on a Hermitian basis for all
/// test elements (the generators when G was built from them, else every
/// element), within Frobenius tolerance `tol`.
bool is_covariant(const QuantumChannel& e, const GroupRepresentation& g, double tol = 1e-9);

bool is_invertible(const QuantumChannel& e, double tol = kInvertibilityTol);

// ============================================================================
// NoiseModelSpec
// ============================================================================

struct NoiseModelSpec {
    enum class Kind { Dephasing, Depolarizing, Kraus, Tensor };

    Kind kind = Kind::Dephasing;
    double strength = 0.0;                 // p or lambda
    int qubits = 1;                        // tensor power for dephasing/depolarizing
    Eigen::Index dim = 2;                  // single-factor dimension (depolarizing)
    std::vector<Matrix> kraus;             // Kind::Kraus
    std::vector<NoiseModelSpec> factors;   // Kind::Tensor
};

QuantumChannel make_channel(const NoiseModelSpec& spec);

}  // namespace symtwirl
