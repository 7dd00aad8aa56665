#include "symtwirl/sdp_solver.hpp"

#include <Eigen/Cholesky>

#include <cmath>
#include <cstdio>
#include <limits>
#include <optional>
#include <sstream>

namespace symtwirl::sdp {

namespace {

struct Workspace {
    Eigen::Index d = 0;
    Eigen::Index na = 0;  // Lambda coordinates (= d^2)
    Eigen::Index nb = 0;  // h coordinates

    Matrix weight;                // omega (exact, unnormalized)
    Matrix delta;                 // normalized
    std::vector<Matrix> cdirs;    // C_j
    Matrix cstack;                // d^2 x nb, column j = vec(C_j)
    Eigen::VectorXd cost_a;       // coords(omega)
    Eigen::VectorXd trace_a;      // tr(A_i)
    double tau = 0.0;

    const HermitianBasis* basis = nullptr;

    Matrix lambda_of(const Eigen::VectorXd& a) const { return basis->reconstruct(a); }

    Matrix b_of(const Eigen::VectorXd& b) const {
        Matrix out = delta;
        for (Eigen::Index j = 0; j < nb; ++j) out -= b(j) * cdirs[static_cast<std::size_t>(j)];
        return out;
    }

    Matrix constraint(const Eigen::VectorXd& u) const {
        const Eigen::VectorXd a = u.head(na);
        const Eigen::VectorXd b = u.tail(nb);
        Matrix f(2 * d, 2 * d);
        f.topLeftCorner(d, d) = lambda_of(a);
        const Matrix bm = b_of(b);
        f.topRightCorner(d, d) = bm;
        f.bottomLeftCorner(d, d) = bm;
        f.bottomRightCorner(d, d) = Matrix::Identity(d, d);
        return 0.5 * (f + Matrix(f.adjoint()));
    }

    double cap_slack(const Eigen::VectorXd& u) const { return tau - trace_a.dot(u.head(na)); }
};

/// phi_t = t * c^T a - logdet F - log(cap slack); returns nullopt off the cone.
std::optional<double> barrier_value(const Workspace& w, double t, const Eigen::VectorXd& u,
                                    Eigen::LLT<Matrix>* llt_out = nullptr) {
    const double slack = w.cap_slack(u);
    if (slack <= 0.0) return std::nullopt;
    Eigen::LLT<Matrix> llt(w.constraint(u));
    if (llt.info() != Eigen::Success) return std::nullopt;
    double logdet = 0.0;
    const auto& l = llt.matrixLLT();
    for (Eigen::Index i = 0; i < 2 * w.d; ++i) {
        const double piv = std::real(l(i, i));
        if (!(piv > 0.0)) return std::nullopt;
        logdet += 2.0 * std::log(piv);
    }
    if (llt_out != nullptr) *llt_out = std::move(llt);
    return t * w.cost_a.dot(u.head(w.na)) - logdet - std::log(slack);
}

void gradient_and_hessian(const Workspace& w, double t, const Eigen::VectorXd& u,
                          const Eigen::LLT<Matrix>& llt, Eigen::VectorXd& grad,
                          Eigen::MatrixXd& hess) {
    const Eigen::Index d = w.d;
    const Eigen::Index na = w.na;
    const Eigen::Index nb = w.nb;

    const Matrix s = llt.solve(Matrix::Identity(2 * d, 2 * d));
    const auto s11 = s.topLeftCorner(d, d);
    const auto s12 = s.topRightCorner(d, d);
    const auto s21 = s.bottomLeftCorner(d, d);
    const auto s22 = s.bottomRightCorner(d, d);

    const Matrix& ustack = w.basis->stack();

    // Gradient.
    grad.resize(na + nb);
    grad.head(na) = t * w.cost_a - w.basis->coords(s11);
    if (nb > 0) {
        const Matrix s21c = s21;
        const Eigen::Map<const Eigen::VectorXcd> s21vec(s21c.data(), d * d);
        grad.tail(nb) = 2.0 * (w.cstack.adjoint() * s21vec).real();
    }
    const double slack = w.cap_slack(u);
    grad.head(na) += w.trace_a / slack;

    // Hessian blocks via d x d products; see the derivation in the tests.
    //   (a,a):  tr(S11 A_i S11 A_j)
    //   (a,b): -2 Re tr(A_i S11 C_j S21)
    //   (b,b):  tr(N_i C_j),  N_i = S12 C S12 + S11 C S22 + S22 C S11 + S21 C S21
    hess.setZero(na + nb, na + nb);

    Matrix kmat(d * d, na);
    Matrix tmp(d, d);
    for (Eigen::Index i = 0; i < na; ++i) {
        tmp.noalias() = s11 * w.basis->elements()[static_cast<std::size_t>(i)] * s11;
        kmat.col(i) = Eigen::Map<const Eigen::VectorXcd>(tmp.data(), d * d);
    }
    hess.topLeftCorner(na, na) = (ustack.adjoint() * kmat).real();

    if (nb > 0) {
        Matrix mmat(d * d, nb);
        Matrix nmat(d * d, nb);
        Matrix t1(d, d), t2(d, d);
        for (Eigen::Index j = 0; j < nb; ++j) {
            const Matrix& c = w.cdirs[static_cast<std::size_t>(j)];
            t1.noalias() = s11 * c;
            t2.noalias() = t1 * s21;
            mmat.col(j) = Eigen::Map<const Eigen::VectorXcd>(t2.data(), d * d);

            Matrix n = t1 * s22;           // S11 C S22
            t1.noalias() = s12 * c;
            n.noalias() += t1 * s12;       // S12 C S12
            t1.noalias() = s22 * c;
            n.noalias() += t1 * s11;       // S22 C S11
            t1.noalias() = s21 * c;
            n.noalias() += t1 * s21;       // S21 C S21
            nmat.col(j) = Eigen::Map<const Eigen::VectorXcd>(n.data(), d * d);
        }
        hess.topRightCorner(na, nb) = -2.0 * (ustack.adjoint() * mmat).real();
        hess.bottomLeftCorner(nb, na) = hess.topRightCorner(na, nb).transpose();
        hess.bottomRightCorner(nb, nb) = 0.5 * ((w.cstack.adjoint() * nmat).real() +
                                                (w.cstack.adjoint() * nmat).real().transpose());
    }

    hess.topLeftCorner(na, na) += (w.trace_a * w.trace_a.transpose()) / (slack * slack);
}

Result run_barrier(const Workspace& w, const Options& opt, Eigen::VectorXd u, double scale) {
    const double nu = 2.0 * static_cast<double>(w.d) + 1.0;
    Result res;

    double t = 1.0;
    int steps = 0;
    double decrement = std::numeric_limits<double>::infinity();

    Eigen::VectorXd grad;
    Eigen::MatrixXd hess;
    while (true) {
        // Center at the current t.
        bool centered = false;
        while (!centered) {
            if (steps >= opt.max_newton) {
                res.message = "newton step budget exhausted";
                break;
            }
            Eigen::LLT<Matrix> llt;
            const auto phi = barrier_value(w, t, u, &llt);
            if (!phi) {
                res.message = "iterate left the feasible cone";
                break;
            }
            gradient_and_hessian(w, t, u, llt, grad, hess);

            Eigen::LDLT<Eigen::MatrixXd> ldlt(hess);
            Eigen::VectorXd step = -ldlt.solve(grad);
            double descent = grad.dot(step);
            if (ldlt.info() != Eigen::Success || !(descent < 0.0)) {
                // Rounding made the Hessian indefinite; regularize and retry.
                hess.diagonal().array() += 1e-10 * std::max(1.0, hess.diagonal().maxCoeff());
                ldlt.compute(hess);
                step = -ldlt.solve(grad);
                descent = grad.dot(step);
                if (!(descent < 0.0)) {
                    res.message = "no descent direction";
                    break;
                }
            }
            decrement = std::sqrt(-descent);

            if (decrement <= 0.03) {
                centered = true;
                break;
            }

            // Damped Newton: backtrack into the cone with an Armijo check.
            double alpha = 1.0;
            bool moved = false;
            for (int ls = 0; ls < 60; ++ls) {
                const Eigen::VectorXd trial = u + alpha * step;
                const auto phi_trial = barrier_value(w, t, trial);
                if (phi_trial && *phi_trial <= *phi + 0.01 * alpha * grad.dot(step)) {
                    u = trial;
                    moved = true;
                    break;
                }
                alpha *= 0.5;
            }
            ++steps;
            if (!moved) {
                res.message = "line search stalled";
                break;
            }
        }

        const double obj = w.cost_a.dot(u.head(w.na));
        const double gap = (nu + std::sqrt(nu) * std::min(decrement, 1.0)) / t;
        const double target = std::max(opt.gap_abs, opt.gap_rel * std::abs(obj));
        if (opt.verbose) {
            std::fprintf(stderr, "sdp: t=%.3e obj=%.12e gap=%.3e steps=%d\n", t, obj, gap,
                         steps);
        }
        if (!centered) {
            // Leave the loop with whatever certificate we have.
            res.converged = gap <= 100.0 * target;
            res.gap_bound = gap;
            break;
        }
        if (gap <= target) {
            res.converged = true;
            res.gap_bound = gap;
            res.message.clear();
            break;
        }
        t *= opt.mu;
    }

    res.newton_steps = steps;
    const Matrix bm = w.b_of(u.tail(w.nb));
    const Matrix wb = w.weight * bm;
    res.value = scale * scale * trace_product_real(wb, bm);
    res.objective = scale * scale * w.cost_a.dot(u.head(w.na));
    res.gap_bound *= scale * scale;
    res.h_coeffs = scale * u.tail(w.nb);
    res.lambda = scale * scale * w.lambda_of(u.head(w.na));
    res.b_matrix = scale * bm;
    return res;
}

}  // namespace

Result solve(const Problem& problem, const Options& options) {
    const Eigen::Index d = problem.weight.rows();
    if (problem.delta.rows() != d) throw std::invalid_argument("sdp::solve: dimension mismatch");

    Workspace w;
    w.d = d;
    w.basis = &HermitianBasis::of_dim(d);
    w.na = w.basis->size();
    w.nb = static_cast<Eigen::Index>(problem.h_dirs.size());
    w.weight = problem.weight;

    const double scale = std::max(1.0, problem.delta.norm());
    w.delta = problem.delta / scale;
    w.cdirs = problem.h_dirs;
    w.cstack.resize(d * d, w.nb);
    for (Eigen::Index j = 0; j < w.nb; ++j) {
        if (w.cdirs[static_cast<std::size_t>(j)].rows() != d) {
            throw std::invalid_argument("sdp::solve: h direction dimension mismatch");
        }
        w.cstack.col(j) = Eigen::Map<const Eigen::VectorXcd>(
            w.cdirs[static_cast<std::size_t>(j)].data(), d * d);
    }
    w.cost_a = w.basis->coords(problem.weight);
    w.trace_a.resize(w.na);
    for (Eigen::Index i = 0; i < w.na; ++i) {
        w.trace_a(i) = w.basis->elements()[static_cast<std::size_t>(i)].trace().real();
    }

    // Feasible start: Lambda = B(h0)^2 + 1.
    Eigen::VectorXd b0 = Eigen::VectorXd::Zero(w.nb);
    if (options.warm_h.size() == w.nb && w.nb > 0) b0 = options.warm_h / scale;
    const Matrix bm0 = w.b_of(b0);
    const Matrix lambda0 = bm0 * bm0 + Matrix::Identity(d, d);
    Eigen::VectorXd u0(w.na + w.nb);
    u0.head(w.na) = w.basis->coords(lambda0);
    u0.tail(w.nb) = b0;

    double cap = options.cap_factor * (lambda0.trace().real() + static_cast<double>(d));
    Result res;
    for (int attempt = 0; attempt < 3; ++attempt) {
        w.tau = cap;
        res = run_barrier(w, options, u0, scale);
        const double trace_lambda = res.lambda.trace().real() / (scale * scale);
        if (trace_lambda < 0.8 * w.tau) return res;
        cap *= 100.0;  // cap was nearly active; it must not bind at the optimum
    }
    res.converged = false;
    res.message += " (trace cap kept binding after retries)";
    return res;
}

}  // namespace symtwirl::sdp
