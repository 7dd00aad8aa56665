#include "symtwirl/qfi_engine.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <limits>
#include <sstream>

namespace symtwirl {

UnidentifiableDirectionError::UnidentifiableDirectionError(int parameter_index, double leak)
    : std::runtime_error([&] {
          std::ostringstream os;
          os << "unidentifiable derivative direction (parameter index " << parameter_index
             << "): support leak " << leak << " of E(rho)";
          return os.str();
      }()),
      parameter_index_(parameter_index),
      leak_(leak) {}

// ============================================================================
// Context
// ============================================================================

EstimationContext build_context(const SymmetricStateFamily& family, const QuantumChannel& channel,
                                const HermitianOperator& x, double invert_tol) {
    if (family.rho().dim() != channel.dim() || x.dim() != channel.dim()) {
        throw std::invalid_argument("build_context: dimension mismatch");
    }
    if (!channel.invertible(invert_tol)) {
        throw std::domain_error("build_context: channel transfer matrix is not invertible");
    }

    EstimationContext ctx{family, channel, x, channel.apply(family.rho()), {}, 0.0, {}, {}, {}, 0,
                          {}};
    ctx.domega.reserve(family.tangent().size());
    for (const Matrix& b : family.tangent()) ctx.domega.push_back(channel.apply_raw(b));

    ctx.xbar = trace_product_real(family.rho().mat(), x.mat());
    ctx.dxbar.resize(family.parameter_count());
    for (int i = 0; i < family.parameter_count(); ++i) {
        ctx.dxbar(i) = trace_product_real(family.tangent()[i], x.mat());
    }

    Eigen::SelfAdjointEigenSolver<Matrix> es(ctx.omega.mat());
    ctx.omega_eigenvalues = es.eigenvalues();
    ctx.omega_eigenvectors = es.eigenvectors();
    const double lmax = ctx.omega_eigenvalues.maxCoeff();
    const double cutoff = kSupportCutoff * std::max(lmax, 1e-300);
    const Eigen::Index d = ctx.omega.dim();
    ctx.support_projector = Matrix::Zero(d, d);
    for (Eigen::Index k = 0; k < d; ++k) {
        if (ctx.omega_eigenvalues(k) > cutoff) {
            ++ctx.support_rank;
            ctx.support_projector.noalias() +=
                es.eigenvectors().col(k) * es.eigenvectors().col(k).adjoint();
        }
    }
    return ctx;
}

// ============================================================================
// SLDs
// ============================================================================

namespace {

Matrix sld_in_eigenbasis(const Eigen::VectorXd& evals, const Matrix& evecs, const Matrix& domega,
                         double support_cutoff, double leak_tol, double* residual) {
    const Eigen::Index d = evals.size();
    const double lmax = std::max(evals.maxCoeff(), 1e-300);
    const double cutoff = support_cutoff * lmax;

    const Matrix dhat = evecs.adjoint() * domega * evecs;
    Matrix shat = Matrix::Zero(d, d);
    double leak_sq = 0.0;
    for (Eigen::Index j = 0; j < d; ++j) {
        const bool j_on = evals(j) > cutoff;
        for (Eigen::Index k = 0; k < d; ++k) {
            const bool k_on = evals(k) > cutoff;
            if (j_on && k_on) {
                shat(j, k) = 2.0 * dhat(j, k) / (evals(j) + evals(k));
            } else {
                leak_sq += std::norm(dhat(j, k));
            }
        }
    }
    const double leak = std::sqrt(leak_sq);
    if (leak > leak_tol * std::max(1.0, domega.norm())) {
        throw UnidentifiableDirectionError(-1, leak);
    }
    Matrix s = evecs * shat * evecs.adjoint();
    s = 0.5 * (s + Matrix(s.adjoint()));
    if (residual != nullptr) {
        const Matrix omega = evecs * evals.asDiagonal().toDenseMatrix().cast<Complex>() *
                             evecs.adjoint();
        *residual = (domega - 0.5 * (omega * s + s * omega)).norm();
    }
    return s;
}

}  // namespace

Matrix sld_from_derivative(const DensityMatrix& omega, const Matrix& domega,
                           double support_cutoff, double leak_tol, double* residual) {
    if (omega.dim() != domega.rows()) {
        throw std::invalid_argument("sld_from_derivative: dimension mismatch");
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(omega.mat());
    return sld_in_eigenbasis(es.eigenvalues(), es.eigenvectors(), domega, support_cutoff,
                             leak_tol, residual);
}

SldSet slds(const EstimationContext& ctx, double support_cutoff, double leak_tol) {
    SldSet out;
    out.operators.reserve(ctx.domega.size());
    out.residuals.reserve(ctx.domega.size());
    for (std::size_t i = 0; i < ctx.domega.size(); ++i) {
        double res = 0.0;
        try {
            out.operators.push_back(sld_in_eigenbasis(ctx.omega_eigenvalues,
                                                      ctx.omega_eigenvectors, ctx.domega[i],
                                                      support_cutoff, leak_tol, &res));
        } catch (const UnidentifiableDirectionError& e) {
            throw UnidentifiableDirectionError(static_cast<int>(i), e.leak());
        }
        out.residuals.push_back(res);
    }
    return out;
}

// ============================================================================
// QFI
// ============================================================================

Eigen::MatrixXd qfi_matrix(const EstimationContext& ctx) {
    const SldSet set = slds(ctx);
    const int q = static_cast<int>(set.operators.size());
    Eigen::MatrixXd h(q, q);
    std::vector<Matrix> ws;
    ws.reserve(set.operators.size());
    for (const Matrix& s : set.operators) ws.push_back(ctx.omega.mat() * s);
    for (int i = 0; i < q; ++i) {
        for (int j = i; j < q; ++j) {
            // tr[w (Si Sj + Sj Si)/2] = Re tr[(w Si) Sj]
            const double v = trace_product_real(ws[static_cast<std::size_t>(i)],
                                                set.operators[static_cast<std::size_t>(j)]);
            h(i, j) = v;
            h(j, i) = v;
        }
    }
    return h;
}

double qfi_scalar(const EstimationContext& ctx) {
    const double grad_norm = ctx.dxbar.norm();
    if (grad_norm <= 1e-12) {
        throw std::domain_error("qfi_scalar: dXbar vanishes (target does not depend on theta)");
    }
    const Eigen::MatrixXd h = qfi_matrix(ctx);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(h);
    const Eigen::VectorXd evs = es.eigenvalues();
    const double cutoff = 1e-12 * std::max(evs.maxCoeff(), 1e-300);
    const Eigen::VectorXd proj = es.eigenvectors().transpose() * ctx.dxbar;
    double quad = 0.0;
    for (Eigen::Index k = 0; k < evs.size(); ++k) {
        if (evs(k) > cutoff) quad += proj(k) * proj(k) / evs(k);
    }
    if (quad <= 0.0) {
        throw std::domain_error("qfi_scalar: dXbar lies outside the range of the QFI matrix");
    }
    return 1.0 / quad;
}

// ============================================================================
// Influence operator
// ============================================================================

InfluenceOperator influence_operator(const EstimationContext& ctx) {
    const Eigen::Index d = ctx.dim();
    Matrix delta = ctx.channel.inverse_dual_apply_raw(ctx.x.mat()) -
                   ctx.xbar * Matrix::Identity(d, d);
    delta = 0.5 * (delta + Matrix(delta.adjoint()));

    InfluenceOperator out{HermitianOperator(delta), 0.0, {}};
    out.zero_mean_residual = std::abs(trace_product_real(ctx.omega.mat(), delta));
    const double scale = std::max(1.0, out.delta.frobenius_norm());
    if (out.zero_mean_residual > 1e-9 * scale) {
        std::ostringstream os;
        os << "influence_operator: tr(omega delta) = " << out.zero_mean_residual
           << " violates the zero-mean condition";
        throw std::runtime_error(os.str());
    }

    try {
        const SldSet set = slds(ctx);
        const HermitianOperator delta_op = out.delta;
        for (int i = 0; i < ctx.parameter_count(); ++i) {
            const double pairing = weighted_inner(
                ctx.omega, HermitianOperator(set.operators[static_cast<std::size_t>(i)]),
                delta_op);
            out.pairing_residuals.push_back(std::abs(pairing - ctx.dxbar(i)));
        }
    } catch (const UnidentifiableDirectionError&) {
        // Rank-deficient omega: the pairing condition is only defined on the
        // identifiable directions; report NaN for the whole set.
        out.pairing_residuals.assign(static_cast<std::size_t>(ctx.parameter_count()),
                                     std::numeric_limits<double>::quiet_NaN());
    }
    return out;
}

// ============================================================================
// Oracle
// ============================================================================

OracleResult inverse_qfi_oracle(const EstimationContext& ctx) {
    const Eigen::Index d = ctx.dim();
    const Matrix delta = ctx.channel.inverse_dual_apply_raw(ctx.x.mat()) -
                         ctx.xbar * Matrix::Identity(d, d);

    // Search space: E*^{-1}(Q(D_j)) over the HS-orthogonal complement of the
    // commutant (Q annihilates the commutant component exactly).
    const TwirlProjector& proj = ctx.family.projector();
    const std::vector<Matrix>& dirs = proj.complement();
    const std::size_t m = dirs.size();

    std::vector<Matrix> c;
    c.reserve(m);
    for (const Matrix& dj : dirs) {
        c.push_back(ctx.channel.inverse_dual_apply_raw(proj.q_project(dj)));
    }

    // Normal equations of the omega-weighted inner product.
    Eigen::MatrixXd gram(m, m);
    Eigen::VectorXd rhs(m);
    std::vector<Matrix> wc;
    wc.reserve(m);
    for (const Matrix& cj : c) wc.push_back(ctx.omega.mat() * cj);
    const Matrix wdelta = ctx.omega.mat() * delta;
    for (std::size_t i = 0; i < m; ++i) {
        for (std::size_t j = i; j < m; ++j) {
            const double v = trace_product_real(wc[i], c[j]);
            gram(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = v;
            gram(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = v;
        }
        rhs(static_cast<Eigen::Index>(i)) = trace_product_real(wdelta, c[i]);
    }

    Eigen::VectorXd y = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
    if (m > 0) {
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(gram);
        const Eigen::VectorXd evs = es.eigenvalues();
        const double cutoff = 1e-10 * std::max(evs.maxCoeff(), 1e-300);
        const Eigen::VectorXd b = es.eigenvectors().transpose() * rhs;
        Eigen::VectorXd z = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(m));
        for (Eigen::Index k = 0; k < evs.size(); ++k) {
            if (evs(k) > cutoff) z(k) = b(k) / evs(k);
        }
        y = es.eigenvectors() * z;
    }

    Matrix residual = delta;
    Matrix hstar = Matrix::Zero(d, d);
    for (std::size_t j = 0; j < m; ++j) {
        residual -= y(static_cast<Eigen::Index>(j)) * c[j];
        hstar += y(static_cast<Eigen::Index>(j)) * dirs[j];
    }
    const HermitianOperator res_op(residual);
    OracleResult out{weighted_inner(ctx.omega, res_op, res_op), HermitianOperator(hstar)};
    return out;
}

// ============================================================================
// Diagnostics
// ============================================================================

DiagnosticReport diagnostics(const EstimationContext& ctx) {
    DiagnosticReport rep;
    rep.support_rank = ctx.support_rank;
    rep.oracle_value = inverse_qfi_oracle(ctx).value;

    const InfluenceOperator infl = influence_operator(ctx);
    rep.delta_zero_mean = infl.zero_mean_residual;
    rep.delta_pairing = infl.pairing_residuals;

    try {
        const SldSet set = slds(ctx);
        rep.sld_residuals = set.residuals;
        const double j = qfi_scalar(ctx);
        rep.j = j;
        rep.one_over_j = 1.0 / j;
    } catch (const std::exception& e) {
        rep.sld_failure = e.what();
    }
    return rep;
}

}  // namespace symtwirl
