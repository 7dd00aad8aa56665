#pragma once

#include "symtwirl/qfi_engine.hpp"
#include "symtwirl/sdp_solver.hpp"

#include <string>
#include <vector>

namespace symtwirl {

// ============================================================================
// SdpInstance
// ============================================================================

/// Concrete data of the variance-minimization SDP for one estimation context:
/// minimize tr(omega Lambda) over the block constraint
/// [[Lambda, Y_h - Xbar 1], [Y_h - Xbar 1, 1]] >= 0 with
/// Y_h = E*^{-1}(X - Q(h)) and h restricted to the HS-orthogonal complement
/// of the commutant (Q annihilates the rest exactly).
struct SdpInstance {
    Eigen::Index dim = 0;
    DensityMatrix omega;
    double xbar = 0.0;
    Matrix delta;                 // E*^{-1}(X) - Xbar 1
    std::vector<Matrix> h_basis;  // D_j, complement of the commutant
    std::vector<Matrix> c_dirs;   // E*^{-1}(Q(D_j))

    sdp::Problem problem() const { return sdp::Problem{omega.mat(), delta, c_dirs}; }
};

SdpInstance build_sdp(const EstimationContext& ctx);

struct SdpOutcome {
    double value = 0.0;       // min_h tr[omega (Y_h - Xbar)^2] up to gap_bound
    HermitianOperator h0;     // minimizer in the complement of the commutant
    HermitianOperator lambda0;
    double gap_bound = 0.0;
    int newton_steps = 0;
};

/// Runs the interior-point backend; throws std::runtime_error with solver
/// diagnostics on failure.
SdpOutcome solve_sdp(const SdpInstance& instance, const sdp::Options& options = {});

// ============================================================================
// Optimal / customary observables
// ============================================================================

/// E*^{-1}(P(X)), the optimal observable for G-covariant channels; verified
/// equal to P(E*^{-1}(X)) within `order_tol`.
HermitianOperator covariant_optimal_observable(const QuantumChannel& e,
                                               const GroupRepresentation& g,
                                               const HermitianOperator& x,
                                               double covariance_tol = 1e-9,
                                               double order_tol = 1e-8);

/// E*^{-1}(X): unbiased on the corrupted state but generally suboptimal.
HermitianOperator customary_observable(const QuantumChannel& e, const HermitianOperator& x);

/// Quantum uncertainty tr(omega Y^2) - tr(omega Y)^2.
double variance(const DensityMatrix& omega, const HermitianOperator& y);

/// Spectral decomposition of Y with outcomes sorted ascending and
/// near-degenerate eigenvalues merged per `group_tol`.
SpectralDecomposition projective_measurement(const HermitianOperator& y,
                                             double group_tol = kEigGroupTol);

struct OptimalMeasurement {
    HermitianOperator y0;
    SpectralDecomposition measurement;
    double predicted_variance = 0.0;       // (Delta Y0)^2 in omega
    double achieved_value = 0.0;           // SDP value, or the variance itself
                                           // on the covariant path
    std::string path;                      // "sdp" | "covariant"
    double unbiasedness_residual = 0.0;    // |tr(omega Y0) - Xbar|
};

/// Theorem-1 entry point: takes the covariant closed form when the channel is
/// covariant under the family's group (tol 1e-9), otherwise builds and solves
/// the SDP. `force_sdp` runs the SDP path regardless, for cross-validation.
OptimalMeasurement optimal_observable(const EstimationContext& ctx, bool force_sdp = false,
                                      const sdp::Options& options = {});

}  // namespace symtwirl
