#include "symtwirl/optimal_measurement.hpp"

#include <cmath>
#include <sstream>

namespace symtwirl {

// ============================================================================
// SDP construction and solving
// ============================================================================

SdpInstance build_sdp(const EstimationContext& ctx) {
    const Eigen::Index d = ctx.dim();
    const TwirlProjector& proj = ctx.family.projector();

    SdpInstance inst{d,
                     ctx.omega,
                     ctx.xbar,
                     Matrix(),
                     proj.complement(),
                     {}};
    Matrix delta = ctx.channel.inverse_dual_apply_raw(ctx.x.mat()) -
                   ctx.xbar * Matrix::Identity(d, d);
    inst.delta = 0.5 * (delta + Matrix(delta.adjoint()));
    inst.c_dirs.reserve(inst.h_basis.size());
    for (const Matrix& dj : inst.h_basis) {
        Matrix c = ctx.channel.inverse_dual_apply_raw(proj.q_project(dj));
        inst.c_dirs.push_back(0.5 * (c + Matrix(c.adjoint())));
    }
    return inst;
}

SdpOutcome solve_sdp(const SdpInstance& instance, const sdp::Options& options) {
    sdp::Result r = sdp::solve(instance.problem(), options);
    if (!r.converged) {
        std::ostringstream os;
        os << "solve_sdp: interior-point solve failed after " << r.newton_steps
           << " Newton steps (gap bound " << r.gap_bound << "): " << r.message;
        throw std::runtime_error(os.str());
    }
    Matrix h0 = Matrix::Zero(instance.dim, instance.dim);
    for (std::size_t j = 0; j < instance.h_basis.size(); ++j) {
        h0 += r.h_coeffs(static_cast<Eigen::Index>(j)) * instance.h_basis[j];
    }
    return SdpOutcome{r.value, HermitianOperator(h0), HermitianOperator(r.lambda),
                      r.gap_bound, r.newton_steps};
}

// ============================================================================
// Observables
// ============================================================================

HermitianOperator covariant_optimal_observable(const QuantumChannel& e,
                                               const GroupRepresentation& g,
                                               const HermitianOperator& x, double covariance_tol,
                                               double order_tol) {
    if (!is_covariant(e, g, covariance_tol)) {
        throw std::domain_error("covariant_optimal_observable: channel is not covariant under G");
    }
    if (!e.invertible()) {
        throw std::domain_error("covariant_optimal_observable: channel is not invertible");
    }
    const Matrix px = twirl_raw(g, x.mat());
    const Matrix y = e.inverse_dual_apply_raw(px);
    // The two orderings agree for covariant channels; a disagreement means a
    // broken transfer cache rather than physics.
    const Matrix alt = twirl_raw(g, e.inverse_dual_apply_raw(x.mat()));
    const double mismatch = (y - alt).norm();
    if (mismatch > order_tol * std::max(1.0, y.norm())) {
        std::ostringstream os;
        os << "covariant_optimal_observable: E*^-1(P(X)) and P(E*^-1(X)) differ by " << mismatch;
        throw std::runtime_error(os.str());
    }
    return HermitianOperator(y);
}

HermitianOperator customary_observable(const QuantumChannel& e, const HermitianOperator& x) {
    if (!e.invertible()) {
        throw std::domain_error("customary_observable: channel is not invertible");
    }
    return e.inverse_dual_apply(x);
}

double variance(const DensityMatrix& omega, const HermitianOperator& y) {
    if (omega.dim() != y.dim()) throw std::invalid_argument("variance: dimension mismatch");
    const Matrix wy = omega.mat() * y.mat();
    const double second = trace_product_real(wy, y.mat());
    const double mean = wy.trace().real();
    const double v = second - mean * mean;
    if (v < -1e-8 * std::max(1.0, second)) {
        throw std::runtime_error("variance: negative value beyond rounding");
    }
    return std::max(v, 0.0);
}

SpectralDecomposition projective_measurement(const HermitianOperator& y, double group_tol) {
    return eig_hermitian(y, group_tol);
}

OptimalMeasurement optimal_observable(const EstimationContext& ctx, bool force_sdp,
                                      const sdp::Options& options) {
    OptimalMeasurement out{HermitianOperator::identity(ctx.dim()), {}, 0.0, 0.0, "", 0.0};

    const bool covariant_path =
        !force_sdp && is_covariant(ctx.channel, ctx.family.group(), 1e-9);
    if (covariant_path) {
        out.y0 = covariant_optimal_observable(ctx.channel, ctx.family.group(), ctx.x);
        out.path = "covariant";
        out.predicted_variance = variance(ctx.omega, out.y0);
        out.achieved_value = out.predicted_variance;
    } else {
        const SdpInstance inst = build_sdp(ctx);
        const SdpOutcome sol = solve_sdp(inst, options);
        const TwirlProjector& proj = ctx.family.projector();
        const Matrix y = ctx.channel.inverse_dual_apply_raw(
            ctx.x.mat() - proj.q_project(sol.h0.mat()));
        out.y0 = HermitianOperator(y);
        out.path = "sdp";
        out.predicted_variance = variance(ctx.omega, out.y0);
        out.achieved_value = sol.value;
    }

    out.measurement = projective_measurement(out.y0);
    const double mean = trace_product_real(ctx.omega.mat(), out.y0.mat());
    out.unbiasedness_residual = std::abs(mean - ctx.xbar);
    const double scale = std::max({1.0, std::abs(ctx.xbar), out.y0.frobenius_norm()});
    if (out.unbiasedness_residual > 1e-8 * scale) {
        std::ostringstream os;
        os << "optimal_observable: tr(omega Y0) = " << mean << " deviates from Xbar = "
           << ctx.xbar;
        throw std::runtime_error(os.str());
    }
    return out;
}

}  // namespace symtwirl
