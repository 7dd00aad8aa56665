#include "symtwirl/channel_algebra.hpp"

#include <Eigen/LU>
#include <Eigen/SVD>

#include <cmath>
#include <mutex>
#include <sstream>

namespace symtwirl {

namespace {

constexpr Eigen::Index kBasisImageCap = 32;  // cache E(H_j) up to this dim

}  // namespace

// ============================================================================
// QuantumChannel::Impl
// ============================================================================

struct QuantumChannel::Impl {
    std::vector<Matrix> kraus;
    Eigen::Index dim = 0;
    Eigen::MatrixXd transfer;
    std::vector<Matrix> images;  // E(H_j), empty above kBasisImageCap

    mutable std::once_flag svd_once;
    mutable double sigma_max = 0.0;
    mutable double sigma_min = 0.0;

    mutable std::once_flag lu_once;
    mutable std::optional<Eigen::PartialPivLU<Eigen::MatrixXd>> dual_lu;

    Matrix apply_raw(const Matrix& h) const {
        Matrix out = Matrix::Zero(dim, dim);
        for (const Matrix& k : kraus) out.noalias() += k * h * k.adjoint();
        return out;
    }

    Matrix dual_apply_raw(const Matrix& h) const {
        Matrix out = Matrix::Zero(dim, dim);
        for (const Matrix& k : kraus) out.noalias() += k.adjoint() * h * k;
        return out;
    }

    void ensure_svd() const {
        std::call_once(svd_once, [this] {
            const Eigen::VectorXd sv =
                Eigen::BDCSVD<Eigen::MatrixXd>(transfer).singularValues();
            sigma_max = sv(0);
            sigma_min = sv(sv.size() - 1);
        });
    }

    const Eigen::PartialPivLU<Eigen::MatrixXd>& ensure_lu() const {
        std::call_once(lu_once, [this] {
            dual_lu.emplace(transfer.transpose());  // A_{E*} = A_E^T
        });
        return *dual_lu;
    }
};

// ============================================================================
// Construction
// ============================================================================

QuantumChannel QuantumChannel::from_kraus(std::vector<Matrix> kraus, double tp_tol) {
    if (kraus.empty()) throw std::invalid_argument("from_kraus: empty Kraus list");
    const Eigen::Index d = kraus[0].rows();
    for (const Matrix& k : kraus) {
        if (k.rows() != d || k.cols() != d) {
            throw std::invalid_argument("from_kraus: Kraus operators must be square, equal dims");
        }
    }
    Matrix completeness = Matrix::Zero(d, d);
    for (const Matrix& k : kraus) completeness.noalias() += k.adjoint() * k;
    const double tp_err = (completeness - Matrix::Identity(d, d)).norm();
    if (tp_err > tp_tol) {
        std::ostringstream os;
        os << "from_kraus: trace preservation violated (|sum K'K - 1| = " << tp_err << ")";
        throw std::invalid_argument(os.str());
    }

    auto impl = std::make_shared<Impl>();
    impl->kraus = std::move(kraus);
    impl->dim = d;

    const HermitianBasis& basis = HermitianBasis::of_dim(d);
    const Eigen::Index m = basis.size();
    impl->transfer.resize(m, m);
    const bool keep_images = d <= kBasisImageCap;
    if (keep_images) impl->images.reserve(m);
    for (Eigen::Index j = 0; j < m; ++j) {
        Matrix img = impl->apply_raw(basis.elements()[j]);
        impl->transfer.col(j) = basis.coords(img);
        if (keep_images) impl->images.push_back(std::move(img));
    }
    return QuantumChannel(std::move(impl));
}

QuantumChannel QuantumChannel::identity(Eigen::Index dim) {
    return from_kraus({Matrix::Identity(dim, dim)});
}

Eigen::Index QuantumChannel::dim() const { return impl_->dim; }
const std::vector<Matrix>& QuantumChannel::kraus() const { return impl_->kraus; }
const Eigen::MatrixXd& QuantumChannel::transfer() const { return impl_->transfer; }

double QuantumChannel::transfer_condition() const {
    impl_->ensure_svd();
    if (impl_->sigma_min <= 0.0) return std::numeric_limits<double>::infinity();
    return impl_->sigma_max / impl_->sigma_min;
}

bool QuantumChannel::invertible(double tol) const {
    impl_->ensure_svd();
    return impl_->sigma_min > tol * impl_->sigma_max;
}

const std::vector<Matrix>* QuantumChannel::basis_images() const {
    return impl_->images.empty() ? nullptr : &impl_->images;
}

// ============================================================================
// Application
// ============================================================================

Matrix QuantumChannel::apply_raw(const Matrix& h) const {
    if (h.rows() != dim()) throw std::invalid_argument("QuantumChannel::apply: dim mismatch");
    return impl_->apply_raw(h);
}

HermitianOperator QuantumChannel::apply(const HermitianOperator& h) const {
    return HermitianOperator(apply_raw(h.mat()));
}

DensityMatrix QuantumChannel::apply(const DensityMatrix& rho) const {
    return DensityMatrix(apply_raw(rho.mat()));
}

Matrix QuantumChannel::dual_apply_raw(const Matrix& h) const {
    if (h.rows() != dim()) throw std::invalid_argument("QuantumChannel::dual_apply: dim mismatch");
    return impl_->dual_apply_raw(h);
}

HermitianOperator QuantumChannel::dual_apply(const HermitianOperator& h) const {
    return HermitianOperator(dual_apply_raw(h.mat()));
}

Matrix QuantumChannel::inverse_dual_apply_raw(const Matrix& h) const {
    if (h.rows() != dim()) {
        throw std::invalid_argument("QuantumChannel::inverse_dual_apply: dim mismatch");
    }
    if (!invertible()) {
        throw std::domain_error(
            "QuantumChannel::inverse_dual_apply: transfer matrix is not invertible");
    }
    const HermitianBasis& basis = HermitianBasis::of_dim(dim());
    Eigen::VectorXd x = impl_->ensure_lu().solve(basis.coords(h));
    return basis.reconstruct(x);
}

HermitianOperator QuantumChannel::inverse_dual_apply(const HermitianOperator& h) const {
    return HermitianOperator(inverse_dual_apply_raw(h.mat()));
}

// ============================================================================
// Named models
// ============================================================================

QuantumChannel dephasing(double p) {
    if (p < 0.0 || p >= 1.0) {
        throw std::invalid_argument("dephasing: p must be in [0, 1) (not invertible at p = 1)");
    }
    std::vector<Matrix> kraus;
    kraus.push_back(std::sqrt(1.0 - p / 2.0) * Matrix::Identity(2, 2));
    if (p > 0.0) kraus.push_back(std::sqrt(p / 2.0) * pauli_matrix(Pauli::Z));
    return QuantumChannel::from_kraus(std::move(kraus));
}

QuantumChannel depolarizing(double lambda, Eigen::Index d) {
    if (lambda < 0.0 || lambda >= 1.0) {
        throw std::invalid_argument("depolarizing: lambda must be in [0, 1)");
    }
    if (d < 2) throw std::invalid_argument("depolarizing: d must be >= 2");
    // Weyl (clock/shift) Kraus set: (1/d^2) sum_ab W_ab rho W_ab^dag = tr(rho) 1/d.
    std::vector<Matrix> kraus;
    const double dd = static_cast<double>(d * d);
    kraus.push_back(std::sqrt(1.0 - lambda + lambda / dd) * Matrix::Identity(d, d));
    if (lambda > 0.0) {
        Matrix shift = Matrix::Zero(d, d);
        for (Eigen::Index j = 0; j < d; ++j) shift((j + 1) % d, j) = 1.0;
        Matrix clock = Matrix::Zero(d, d);
        for (Eigen::Index j = 0; j < d; ++j) {
            clock(j, j) = std::polar(1.0, 2.0 * M_PI * static_cast<double>(j) / d);
        }
        const double w = std::sqrt(lambda / dd);
        Matrix xa = Matrix::Identity(d, d);
        for (Eigen::Index a = 0; a < d; ++a) {
            Matrix wab = xa;
            for (Eigen::Index b = 0; b < d; ++b) {
                if (a != 0 || b != 0) kraus.push_back(w * wab);
                wab = wab * clock;
            }
            xa = shift * xa;
        }
    }
    return QuantumChannel::from_kraus(std::move(kraus));
}

QuantumChannel tensor(const std::vector<QuantumChannel>& factors) {
    if (factors.empty()) throw std::invalid_argument("tensor: empty factor list");
    std::vector<Matrix> kraus = factors[0].kraus();
    for (std::size_t f = 1; f < factors.size(); ++f) {
        std::vector<Matrix> next;
        next.reserve(kraus.size() * factors[f].kraus().size());
        for (const Matrix& a : kraus) {
            for (const Matrix& b : factors[f].kraus()) next.push_back(kron(a, b));
        }
        kraus = std::move(next);
    }
    return QuantumChannel::from_kraus(std::move(kraus));
}

QuantumChannel tensor_power(const QuantumChannel& factor, int n) {
    if (n < 1) throw std::invalid_argument("tensor_power: n must be >= 1");
    return tensor(std::vector<QuantumChannel>(static_cast<std::size_t>(n), factor));
}

Eigen::MatrixXd dephasing_transfer_matrix(double p) {
    Eigen::MatrixXd t = Eigen::MatrixXd::Identity(4, 4);
    t(1, 1) = 1.0 - p;  // basis order I, x, y, z
    t(2, 2) = 1.0 - p;
    return t;
}

// ============================================================================
// Predicates
// ============================================================================

bool is_covariant(const QuantumChannel& e, const GroupRepresentation& g, double tol) {
    if (e.dim() != g.dim()) throw std::invalid_argument("is_covariant: dimension mismatch");
    const Eigen::Index d = e.dim();
    const HermitianBasis& basis = HermitianBasis::of_dim(d);

    std::vector<const Matrix*> test;
    if (g.built_from_generators()) {
        for (std::size_t i : g.generator_indices()) test.push_back(&g.elements()[i]);
    } else {
        for (const Matrix& u : g.elements()) test.push_back(&u);
    }

    const std::vector<Matrix>* images = e.basis_images();
    for (const Matrix* u : test) {
        for (Eigen::Index j = 0; j < basis.size(); ++j) {
            const Matrix conj = (*u) * basis.elements()[j] * u->adjoint();
            const Matrix lhs = e.apply_raw(conj);
            const Matrix img = images ? (*images)[j] : e.apply_raw(basis.elements()[j]);
            const Matrix rhs = (*u) * img * u->adjoint();
            if ((lhs - rhs).norm() > tol) return false;
        }
    }
    return true;
}

bool is_invertible(const QuantumChannel& e, double tol) { return e.invertible(tol); }

// ============================================================================
// NoiseModelSpec
// ============================================================================

QuantumChannel make_channel(const NoiseModelSpec& spec) {
    switch (spec.kind) {
        case NoiseModelSpec::Kind::Dephasing: {
            QuantumChannel one = dephasing(spec.strength);
            return spec.qubits > 1 ? tensor_power(one, spec.qubits) : one;
        }
        case NoiseModelSpec::Kind::Depolarizing: {
            QuantumChannel one = depolarizing(spec.strength, spec.dim);
            return spec.qubits > 1 ? tensor_power(one, spec.qubits) : one;
        }
        case NoiseModelSpec::Kind::Kraus:
            return QuantumChannel::from_kraus(spec.kraus);
        case NoiseModelSpec::Kind::Tensor: {
            std::vector<QuantumChannel> factors;
            factors.reserve(spec.factors.size());
            for (const NoiseModelSpec& f : spec.factors) factors.push_back(make_channel(f));
            return tensor(factors);
        }
    }
    throw std::logic_error("make_channel: unknown kind");
}

}  // namespace symtwirl
