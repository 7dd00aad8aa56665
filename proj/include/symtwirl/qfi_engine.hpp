#pragma once

#include "symtwirl/channel_algebra.hpp"
#include "symtwirl/group_symmetry.hpp"
#include "symtwirl/operator_core.hpp"

#include <optional>
#include <vector>

namespace symtwirl {

inline constexpr double kSupportCutoff = 1e-10;  // relative to lambda_max(omega)
inline constexpr double kSldLeakTol = 1e-8;

/// Raised when a derivative direction has weight outside the support of
/// E(rho): the corresponding parameter cannot be estimated from the corrupted
/// state and silently pseudo-inverting would misreport the QFI.
class UnidentifiableDirectionError : public std::runtime_error {
  public:
    UnidentifiableDirectionError(int parameter_index, double leak);
    int parameter_index() const { return parameter_index_; }
    double leak() const { return leak_; }

  private:
    int parameter_index_;
    double leak_;
};

// ============================================================================
// EstimationContext
// ============================================================================

/// Bundle of (symmetric family, invertible channel, observable X) with the
/// derived quantities every downstream computation needs: omega = E(rho), the
/// tangent images E(B_i), the target X-bar = tr(rho X), its gradient
/// dX-bar_i = tr(B_i X), and the eigenstructure/support of omega.
struct EstimationContext {
    SymmetricStateFamily family;
    QuantumChannel channel;
    HermitianOperator x;

    DensityMatrix omega;
    std::vector<Matrix> domega;  // E(B_i)
    double xbar = 0.0;
    Eigen::VectorXd dxbar;

    Eigen::VectorXd omega_eigenvalues;  // ascending
    Matrix omega_eigenvectors;
    Eigen::Index support_rank = 0;
    Matrix support_projector;

    int parameter_count() const { return family.parameter_count(); }
    Eigen::Index dim() const { return omega.dim(); }
};

EstimationContext build_context(const SymmetricStateFamily& family, const QuantumChannel& channel,
                                const HermitianOperator& x,
                                double invert_tol = kInvertibilityTol);

// ============================================================================
// SLDs and the QFI
// ============================================================================

struct SldSet {
    std::vector<Matrix> operators;
    std::vector<double> residuals;  // ||d_i omega - (omega S_i + S_i omega)/2||_F
};

/// Symmetric logarithmic derivative: in the eigenbasis of omega,
/// S_jk = 2 (domega)_jk / (l_j + l_k) when l_j + l_k is above the cutoff,
/// else 0. Throws UnidentifiableDirectionError (index -1; callers fill it in)
/// when domega leaks off the support of omega by more than leak_tol.
Matrix sld_from_derivative(const DensityMatrix& omega, const Matrix& domega,
                           double support_cutoff = kSupportCutoff,
                           double leak_tol = kSldLeakTol, double* residual = nullptr);

SldSet slds(const EstimationContext& ctx, double support_cutoff = kSupportCutoff,
            double leak_tol = kSldLeakTol);

/// QFI matrix H_ij = tr[omega (S_i S_j + S_j S_i)/2].
Eigen::MatrixXd qfi_matrix(const EstimationContext& ctx);

/// Scalar QFI J = 1 / (dXbar^T H^+ dXbar); throws std::domain_error when the
/// gradient vanishes (parameter-independent target).
double qfi_scalar(const EstimationContext& ctx);

// ============================================================================
// Influence operator
// ============================================================================

struct InfluenceOperator {
    HermitianOperator delta;
    double zero_mean_residual = 0.0;        // |tr(omega delta)|
    std::vector<double> pairing_residuals;  // |<S_i, delta>_omega - dXbar_i|, NaN if S_i failed
};

/// delta = E*^{-1}(X) - Xbar 1, validated against its two defining
/// conditions (zero mean always; SLD pairing where the SLDs exist).
InfluenceOperator influence_operator(const EstimationContext& ctx);

// ============================================================================
// Variational oracle
// ============================================================================

struct OracleResult {
    double value = 0.0;
    HermitianOperator minimizer;  // h* in the complement of the commutant
};

/// Independent route to 1/J: minimizes ||delta - E*^{-1}(Q(h))||^2_omega over
/// the complement of the commutant by solving the weighted normal equations
/// (eigenvalue pseudo-inverse, cutoff 1e-10 relative). Never touches the SDP.
OracleResult inverse_qfi_oracle(const EstimationContext& ctx);

// ============================================================================
// Diagnostics
// ============================================================================

struct DiagnosticReport {
    std::optional<double> j;           // absent when SLDs are unavailable
    std::optional<double> one_over_j;
    double oracle_value = 0.0;
    std::vector<double> sld_residuals;
    double delta_zero_mean = 0.0;
    std::vector<double> delta_pairing;
    Eigen::Index support_rank = 0;
    std::string sld_failure;  // message when the SLD route failed
};

DiagnosticReport diagnostics(const EstimationContext& ctx);

}  // namespace symtwirl
