#include "symtwirl/operator_core.hpp"

#include "symtwirl/rng.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

namespace symtwirl {

namespace {

void require_same_dim(Eigen::Index a, Eigen::Index b, const char* what) {
    if (a != b) {
        std::ostringstream os;
        os << what << ": dimension mismatch (" << a << " vs " << b << ")";
        throw std::invalid_argument(os.str());
    }
}

}  // namespace

// ============================================================================
// HermitianOperator / DensityMatrix
// ============================================================================

HermitianOperator::HermitianOperator(const Matrix& entries, double tol) {
    if (entries.rows() != entries.cols() || entries.rows() == 0) {
        throw std::invalid_argument("HermitianOperator: matrix must be square and nonempty");
    }
    const double asym = (entries - entries.adjoint()).norm();
    const double scale = std::max(1.0, entries.norm());
    if (asym > tol * scale) {
        std::ostringstream os;
        os << "HermitianOperator: asymmetry " << asym << " exceeds tolerance " << tol * scale;
        throw std::invalid_argument(os.str());
    }
    entries_ = 0.5 * (entries + entries.adjoint());
}

HermitianOperator HermitianOperator::zero(Eigen::Index dim) {
    return HermitianOperator(Matrix::Zero(dim, dim));
}

HermitianOperator HermitianOperator::identity(Eigen::Index dim) {
    return HermitianOperator(Matrix::Identity(dim, dim));
}

HermitianOperator HermitianOperator::operator+(const HermitianOperator& o) const {
    require_same_dim(dim(), o.dim(), "HermitianOperator::operator+");
    return HermitianOperator(entries_ + o.entries_);
}

HermitianOperator HermitianOperator::operator-(const HermitianOperator& o) const {
    require_same_dim(dim(), o.dim(), "HermitianOperator::operator-");
    return HermitianOperator(entries_ - o.entries_);
}

HermitianOperator HermitianOperator::operator*(double s) const {
    return HermitianOperator(entries_ * s);
}

DensityMatrix::DensityMatrix(const Matrix& entries, double herm_tol, double trace_tol,
                             double eig_floor) {
    HermitianOperator h(entries, herm_tol);
    const double tr = h.trace();
    if (std::abs(tr - 1.0) > std::max(trace_tol, 1e-12)) {
        std::ostringstream os;
        os << "DensityMatrix: trace " << tr << " is not 1";
        throw std::invalid_argument(os.str());
    }
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.mat(), Eigen::EigenvaluesOnly);
    const double min_eig = es.eigenvalues().minCoeff();
    if (min_eig < eig_floor) {
        std::ostringstream os;
        os << "DensityMatrix: eigenvalue " << min_eig << " below floor " << eig_floor;
        throw std::invalid_argument(os.str());
    }
    entries_ = h.mat();
}

DensityMatrix DensityMatrix::maximally_mixed(Eigen::Index dim) {
    return DensityMatrix(Matrix::Identity(dim, dim) / static_cast<double>(dim));
}

DensityMatrix DensityMatrix::pure(const Eigen::VectorXcd& state) {
    const double n = state.norm();
    if (n < 1e-12) throw std::invalid_argument("DensityMatrix::pure: zero state vector");
    Eigen::VectorXcd psi = state / n;
    return DensityMatrix(psi * psi.adjoint());
}

// ============================================================================
// Inner products
// ============================================================================

double hs_inner(const HermitianOperator& h1, const HermitianOperator& h2) {
    require_same_dim(h1.dim(), h2.dim(), "hs_inner");
    return trace_product_real(h1.mat(), h2.mat());
}

double weighted_inner(const DensityMatrix& omega, const HermitianOperator& h1,
                      const HermitianOperator& h2) {
    require_same_dim(omega.dim(), h1.dim(), "weighted_inner");
    require_same_dim(omega.dim(), h2.dim(), "weighted_inner");
    // tr[w (h1 h2 + h2 h1)/2] = Re tr[(w h1) h2] for Hermitian arguments.
    const Matrix wh1 = omega.mat() * h1.mat();
    return trace_product_real(wh1, h2.mat());
}

// ============================================================================
// Gell-Mann basis
// ============================================================================

OperatorBasis gell_mann_basis(Eigen::Index d) {
    if (d < 1) throw std::invalid_argument("gell_mann_basis: d must be >= 1");
    OperatorBasis basis;
    basis.dim = d;
    basis.elements.reserve(static_cast<std::size_t>(d * d));
    basis.elements.push_back(HermitianOperator::identity(d));
    // Standard enumeration: for each k, the off-diagonal pairs (j,k) for j < k
    // followed by the diagonal generator of rank k.
    for (Eigen::Index k = 1; k < d; ++k) {
        for (Eigen::Index j = 0; j < k; ++j) {
            Matrix x = Matrix::Zero(d, d);
            x(j, k) = 1.0;
            x(k, j) = 1.0;
            basis.elements.push_back(HermitianOperator(x));
            Matrix y = Matrix::Zero(d, d);
            y(j, k) = Complex(0, -1);
            y(k, j) = Complex(0, 1);
            basis.elements.push_back(HermitianOperator(y));
        }
        Matrix z = Matrix::Zero(d, d);
        const double scale = std::sqrt(2.0 / static_cast<double>(k * (k + 1)));
        for (Eigen::Index j = 0; j < k; ++j) z(j, j) = scale;
        z(k, k) = -scale * static_cast<double>(k);
        basis.elements.push_back(HermitianOperator(z));
    }
    return basis;
}

// ============================================================================
// Spectral decomposition with degeneracy grouping
// ============================================================================

SpectralDecomposition eig_hermitian(const HermitianOperator& h, double group_tol) {
    Eigen::SelfAdjointEigenSolver<Matrix> es(h.mat());
    const Eigen::VectorXd evs = es.eigenvalues();
    const Matrix& vecs = es.eigenvectors();
    const Eigen::Index d = h.dim();

    const double scale = std::max({std::abs(evs(0)), std::abs(evs(d - 1)), 1.0});
    const double merge = group_tol * scale;

    SpectralDecomposition out;
    out.group_tol = group_tol;
    Eigen::Index start = 0;
    while (start < d) {
        Eigen::Index stop = start + 1;
        while (stop < d && evs(stop) - evs(stop - 1) <= merge) ++stop;
        const Eigen::Index count = stop - start;
        const auto block = vecs.middleCols(start, count);
        out.projectors.push_back(block * block.adjoint());
        out.eigenvalues.push_back(evs.segment(start, count).mean());
        start = stop;
    }
    return out;
}

// ============================================================================
// States
// ============================================================================

DensityMatrix dicke_state(int n, int l) {
    if (n < 1) throw std::invalid_argument("dicke_state: n must be >= 1");
    if (l < 0 || l > n) throw std::invalid_argument("dicke_state: need 0 <= l <= n");
    const Eigen::Index d = Eigen::Index(1) << n;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    for (Eigen::Index x = 0; x < d; ++x) {
        if (std::popcount(static_cast<std::uint64_t>(x)) == l) v(x) = 1.0;
    }
    return DensityMatrix::pure(v);
}

DensityMatrix ghz_state(int n) {
    if (n < 1) throw std::invalid_argument("ghz_state: n must be >= 1");
    const Eigen::Index d = Eigen::Index(1) << n;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(d);
    v(0) = 1.0;
    v(d - 1) = 1.0;
    return DensityMatrix::pure(v);
}

// ============================================================================
// Pauli observables
// ============================================================================

const Matrix& pauli_matrix(Pauli p) {
    static const Matrix mats[4] = {
        (Matrix(2, 2) << 1, 0, 0, 1).finished(),
        (Matrix(2, 2) << 0, 1, 1, 0).finished(),
        (Matrix(2, 2) << 0, Complex(0, -1), Complex(0, 1), 0).finished(),
        (Matrix(2, 2) << 1, 0, 0, -1).finished(),
    };
    return mats[static_cast<int>(p)];
}

HermitianOperator pauli_observable(const std::vector<Pauli>& indices) {
    if (indices.empty()) throw std::invalid_argument("pauli_observable: empty index list");
    Matrix out = pauli_matrix(indices[0]);
    for (std::size_t i = 1; i < indices.size(); ++i) {
        out = kron(out, pauli_matrix(indices[i]));
    }
    return HermitianOperator(out);
}

std::vector<Pauli> parse_pauli_string(const std::string& letters) {
    std::vector<Pauli> out;
    out.reserve(letters.size());
    for (char c : letters) {
        switch (c) {
            case 'i': case 'I': out.push_back(Pauli::I); break;
            case 'x': case 'X': out.push_back(Pauli::X); break;
            case 'y': case 'Y': out.push_back(Pauli::Y); break;
            case 'z': case 'Z': out.push_back(Pauli::Z); break;
            default:
                throw std::invalid_argument(std::string("parse_pauli_string: invalid index '") +
                                            c + "'");
        }
    }
    if (out.empty()) throw std::invalid_argument("parse_pauli_string: empty string");
    return out;
}

std::string pauli_to_string(const std::vector<Pauli>& indices) {
    static const char letter[4] = {'I', 'x', 'y', 'z'};
    std::string s;
    for (Pauli p : indices) s += letter[static_cast<int>(p)];
    return s;
}

HermitianOperator pauli_observable(const std::string& letters) {
    return pauli_observable(parse_pauli_string(letters));
}

HermitianOperator random_observable(Eigen::Index d, std::uint64_t seed) {
    if (d < 1) throw std::invalid_argument("random_observable: d must be >= 1");
    Rng rng(seed);
    Matrix c(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) c(i, j) = rng.complex_normal();
    }
    return HermitianOperator(0.5 * (c + Matrix(c.adjoint())));
}

// ============================================================================
// HermitianBasis
// ============================================================================

HermitianBasis::HermitianBasis(Eigen::Index d) : dim_(d), tensor_pauli_(is_power_of_two(d)) {
    const double root_d = std::sqrt(static_cast<double>(d));
    if (tensor_pauli_ && d > 1) {
        int n = 0;
        while ((Eigen::Index(1) << n) < d) ++n;
        const Eigen::Index count = d * d;
        elements_.reserve(count);
        // Index order: base-4 digits of the element index, leftmost qubit in
        // the most significant digit, digit order I,x,y,z. This matches the
        // Kronecker ordering so A_{E1 (x) E2} = A_{E1} (x) A_{E2}.
        for (Eigen::Index idx = 0; idx < count; ++idx) {
            Matrix m(1, 1);
            m(0, 0) = 1.0;
            for (int q = n - 1; q >= 0; --q) {
                const int digit = static_cast<int>((idx >> (2 * q)) & 3);
                m = kron(m, pauli_matrix(static_cast<Pauli>(digit)));
            }
            elements_.push_back(m / root_d);
        }
    } else {
        OperatorBasis gm = gell_mann_basis(d);
        elements_.reserve(gm.elements.size());
        elements_.push_back(gm.elements[0].mat() / root_d);
        for (std::size_t i = 1; i < gm.elements.size(); ++i) {
            elements_.push_back(gm.elements[i].mat() / std::sqrt(2.0));
        }
    }
    stack_.resize(d * d, d * d);
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(elements_.size()); ++i) {
        stack_.col(i) = Eigen::Map<const Eigen::VectorXcd>(elements_[i].data(), d * d);
    }
}

const HermitianBasis& HermitianBasis::of_dim(Eigen::Index d) {
    static std::mutex mtx;
    static std::map<Eigen::Index, std::unique_ptr<HermitianBasis>> cache;
    std::lock_guard<std::mutex> lock(mtx);
    auto it = cache.find(d);
    if (it == cache.end()) {
        it = cache.emplace(d, std::unique_ptr<HermitianBasis>(new HermitianBasis(d))).first;
    }
    return *it->second;
}

Eigen::VectorXd HermitianBasis::coords(const Matrix& h) const {
    const Eigen::Map<const Eigen::VectorXcd> v(h.data(), dim_ * dim_);
    return (stack_.adjoint() * v).real();
}

Matrix HermitianBasis::reconstruct(const Eigen::VectorXd& c) const {
    Eigen::VectorXcd v = stack_ * c.cast<Complex>();
    return Eigen::Map<const Matrix>(v.data(), dim_, dim_);
}

// ============================================================================
// Helpers
// ============================================================================

Matrix kron(const Matrix& a, const Matrix& b) {
    Matrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

bool is_power_of_two(Eigen::Index d) { return d >= 1 && (d & (d - 1)) == 0; }

double trace_product_real(const Matrix& a, const Matrix& b) {
    // tr(a b) = sum_ij a_ij b_ji; avoids forming the product.
    return a.cwiseProduct(b.transpose()).sum().real();
}

}  // namespace symtwirl
