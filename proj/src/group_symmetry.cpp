#include "symtwirl/group_symmetry.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <sstream>

namespace symtwirl {

namespace {

bool matrices_close(const Matrix& a, const Matrix& b, double tol) {
    return (a - b).cwiseAbs().maxCoeff() <= tol;
}

bool contains(const std::vector<Matrix>& set, const Matrix& m, double tol) {
    return std::any_of(set.begin(), set.end(),
                       [&](const Matrix& e) { return matrices_close(e, m, tol); });
}

void require_unitary(const Matrix& u, double tol, const char* what) {
    if (u.rows() != u.cols() || u.rows() == 0) {
        throw std::invalid_argument(std::string(what) + ": elements must be square");
    }
    const Matrix gram = u.adjoint() * u;
    if ((gram - Matrix::Identity(u.rows(), u.cols())).norm() > tol * std::sqrt((double)u.rows())) {
        throw std::invalid_argument(std::string(what) + ": element is not unitary");
    }
}

}  // namespace

// ============================================================================
// GroupRepresentation
// ============================================================================

GroupRepresentation GroupRepresentation::generate(const std::vector<Matrix>& generators,
                                                  int max_order) {
    if (generators.empty()) {
        throw std::invalid_argument("GroupRepresentation::generate: no generators");
    }
    const Eigen::Index d = generators[0].rows();
    for (const Matrix& g : generators) {
        require_unitary(g, kUnitaryTol, "GroupRepresentation::generate");
        if (g.rows() != d) {
            throw std::invalid_argument("GroupRepresentation::generate: dimension mismatch");
        }
    }

    std::vector<Matrix> elements;
    elements.push_back(Matrix::Identity(d, d));
    std::vector<std::size_t> gen_idx;
    std::deque<std::size_t> frontier{0};
    for (const Matrix& g : generators) {
        if (!contains(elements, g, kGroupDedupTol)) {
            elements.push_back(g);
            gen_idx.push_back(elements.size() - 1);
            frontier.push_back(elements.size() - 1);
        }
    }
    while (!frontier.empty()) {
        const std::size_t idx = frontier.front();
        frontier.pop_front();
        for (const Matrix& g : generators) {
            Matrix prod = elements[idx] * g;
            if (!contains(elements, prod, kGroupDedupTol)) {
                if (static_cast<int>(elements.size()) >= max_order) {
                    std::ostringstream os;
                    os << "GroupRepresentation::generate: closure exceeds max_order "
                       << max_order;
                    throw std::runtime_error(os.str());
                }
                elements.push_back(std::move(prod));
                frontier.push_back(elements.size() - 1);
            }
        }
    }
    return GroupRepresentation(
        std::make_shared<const std::vector<Matrix>>(std::move(elements)), std::move(gen_idx), d);
}

GroupRepresentation GroupRepresentation::symmetric_qubits(int n, int cap) {
    if (n < 1) throw std::invalid_argument("symmetric_qubits: n must be >= 1");
    if (n > cap) {
        std::ostringstream os;
        os << "symmetric_qubits: n = " << n << " exceeds cap " << cap;
        throw std::invalid_argument(os.str());
    }
    const Eigen::Index d = Eigen::Index(1) << n;
    // sigma[i] = source qubit for output position i; qubit 0 is the most
    // significant bit of the basis index.
    std::vector<int> sigma(n);
    std::iota(sigma.begin(), sigma.end(), 0);
    std::vector<Matrix> elements;
    std::vector<std::vector<int>> perms;
    do {
        Matrix p = Matrix::Zero(d, d);
        for (Eigen::Index x = 0; x < d; ++x) {
            Eigen::Index y = 0;
            for (int i = 0; i < n; ++i) {
                const int bit = static_cast<int>((x >> (n - 1 - sigma[i])) & 1);
                y |= static_cast<Eigen::Index>(bit) << (n - 1 - i);
            }
            p(y, x) = 1.0;
        }
        elements.push_back(std::move(p));
        perms.push_back(sigma);
    } while (std::next_permutation(sigma.begin(), sigma.end()));

    std::vector<std::size_t> gen_idx;
    for (std::size_t e = 0; e < perms.size(); ++e) {
        // Adjacent transpositions (i, i+1) generate S_n.
        int moved = 0, span = 0;
        for (int i = 0; i < n; ++i) {
            if (perms[e][i] != i) {
                ++moved;
                span = std::abs(perms[e][i] - i);
            }
        }
        if (moved == 2 && span == 1) gen_idx.push_back(e);
    }
    return GroupRepresentation(
        std::make_shared<const std::vector<Matrix>>(std::move(elements)), std::move(gen_idx), d);
}

GroupRepresentation GroupRepresentation::from_elements(std::vector<Matrix> elements, double tol) {
    if (elements.empty()) {
        throw std::invalid_argument("GroupRepresentation::from_elements: empty list");
    }
    const Eigen::Index d = elements[0].rows();
    bool has_identity = false;
    for (const Matrix& e : elements) {
        require_unitary(e, tol, "GroupRepresentation::from_elements");
        if (e.rows() != d) {
            throw std::invalid_argument("GroupRepresentation::from_elements: dimension mismatch");
        }
        if (matrices_close(e, Matrix::Identity(d, d), kGroupDedupTol)) has_identity = true;
    }
    if (!has_identity) {
        throw std::invalid_argument("GroupRepresentation::from_elements: identity missing");
    }
    for (const Matrix& a : elements) {
        for (const Matrix& b : elements) {
            if (!contains(elements, a * b, 10 * kGroupDedupTol)) {
                throw std::invalid_argument(
                    "GroupRepresentation::from_elements: not closed under multiplication");
            }
        }
    }
    return GroupRepresentation(std::make_shared<const std::vector<Matrix>>(std::move(elements)),
                               {}, d);
}

// ============================================================================
// Twirling
// ============================================================================

Matrix twirl_raw(const GroupRepresentation& g, const Matrix& h) {
    if (g.dim() != h.rows()) throw std::invalid_argument("twirl: dimension mismatch");
    Matrix sum = Matrix::Zero(h.rows(), h.cols());
    for (const Matrix& u : g.elements()) {
        sum.noalias() += u * h * u.adjoint();
    }
    sum /= static_cast<double>(g.order());
    return 0.5 * (sum + Matrix(sum.adjoint()));
}

HermitianOperator twirl(const GroupRepresentation& g, const HermitianOperator& h) {
    return HermitianOperator(twirl_raw(g, h.mat()));
}

HermitianOperator q_map(const GroupRepresentation& g, const HermitianOperator& h) {
    return HermitianOperator(h.mat() - twirl_raw(g, h.mat()));
}

bool is_symmetric(const GroupRepresentation& g, const DensityMatrix& rho, double tol) {
    if (g.dim() != rho.dim()) throw std::invalid_argument("is_symmetric: dimension mismatch");
    for (const Matrix& u : g.elements()) {
        if ((u * rho.mat() * u.adjoint() - rho.mat()).norm() > tol) return false;
    }
    return true;
}

// ============================================================================
// TwirlProjector
// ============================================================================

TwirlProjector::TwirlProjector(const GroupRepresentation& g) : group_(g) {
    const Eigen::Index d = g.dim();
    const HermitianBasis& basis = HermitianBasis::of_dim(d);
    const Eigen::Index m = basis.size();

    Eigen::MatrixXd a(m, m);
    for (Eigen::Index j = 0; j < m; ++j) {
        a.col(j) = basis.coords(twirl_raw(g, basis.elements()[j]));
    }
    transfer_ = 0.5 * (a + a.transpose());

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(transfer_);
    const Eigen::VectorXd evs = es.eigenvalues();
    const Eigen::MatrixXd vecs = es.eigenvectors();

    std::vector<Eigen::Index> fixed, rest;
    for (Eigen::Index i = 0; i < m; ++i) {
        if (std::abs(evs(i) - 1.0) <= kFixedPointEigTol) {
            fixed.push_back(i);
        } else {
            rest.push_back(i);
        }
    }
    if (fixed.empty()) {
        throw std::runtime_error("TwirlProjector: no fixed-point space found");
    }

    // Rotate the fixed-point basis so its first element is 1/sqrt(d), then
    // re-orthonormalize the remainder against it (Gram-Schmidt). The identity
    // is always in the commutant, so its coordinates lie in the span.
    const Eigen::VectorXd id_coords =
        basis.coords(Matrix::Identity(d, d) / std::sqrt(static_cast<double>(d)));
    std::vector<Eigen::VectorXd> comm_coords;
    comm_coords.push_back(id_coords);
    for (Eigen::Index i : fixed) {
        Eigen::VectorXd v = vecs.col(i);
        for (const Eigen::VectorXd& u : comm_coords) v -= u.dot(v) * u;
        const double nrm = v.norm();
        if (nrm > 1e-8) comm_coords.push_back(v / nrm);
    }
    if (comm_coords.size() != fixed.size()) {
        throw std::runtime_error("TwirlProjector: identity not inside the fixed-point space");
    }
    for (const Eigen::VectorXd& c : comm_coords) {
        commutant_.push_back(basis.reconstruct(c));
    }
    for (Eigen::Index i : rest) {
        complement_.push_back(basis.reconstruct(vecs.col(i)));
    }
}

Matrix TwirlProjector::project(const Matrix& h) const {
    const HermitianBasis& basis = HermitianBasis::of_dim(dim());
    return basis.reconstruct(transfer_ * basis.coords(h));
}

Matrix TwirlProjector::q_project(const Matrix& h) const { return h - project(h); }

std::vector<HermitianOperator> commutant_basis(const GroupRepresentation& g) {
    TwirlProjector proj(g);
    std::vector<HermitianOperator> out;
    out.reserve(proj.commutant().size());
    for (const Matrix& m : proj.commutant()) out.push_back(HermitianOperator(m));
    return out;
}

// ============================================================================
// SymmetricStateFamily
// ============================================================================

SymmetricStateFamily::SymmetricStateFamily(const GroupRepresentation& g, const DensityMatrix& rho,
                                           double sym_tol)
    : projector_(std::make_shared<const TwirlProjector>(g)), rho_(rho) {
    init(sym_tol);
}

SymmetricStateFamily::SymmetricStateFamily(std::shared_ptr<const TwirlProjector> projector,
                                           const DensityMatrix& rho, double sym_tol)
    : projector_(std::move(projector)), rho_(rho) {
    init(sym_tol);
}

void SymmetricStateFamily::init(double sym_tol) {
    if (!is_symmetric(projector_->group(), rho_, sym_tol)) {
        throw std::invalid_argument("SymmetricStateFamily: rho is not symmetric under G");
    }
    const Eigen::Index d = rho_.dim();
    const auto& comm = projector_->commutant();
    // commutant()[0] is 1/sqrt(d); the rest are traceless and orthonormal.
    tangent_.reserve(comm.size() - 1);
    theta_.resize(static_cast<Eigen::Index>(comm.size()) - 1);
    const double root2 = std::sqrt(2.0);
    for (std::size_t i = 1; i < comm.size(); ++i) {
        tangent_.push_back(root2 * comm[i]);
        theta_(static_cast<Eigen::Index>(i) - 1) =
            0.5 * trace_product_real(tangent_.back(), rho_.mat());
    }

    Matrix recon = Matrix::Identity(d, d) / static_cast<double>(d);
    for (std::size_t i = 0; i < tangent_.size(); ++i) {
        recon += theta_(static_cast<Eigen::Index>(i)) * tangent_[i];
    }
    if ((recon - rho_.mat()).norm() > 1e-10) {
        throw std::runtime_error("SymmetricStateFamily: coordinate round-trip failed");
    }
}

SymmetricStateFamily state_family(const GroupRepresentation& g, const DensityMatrix& rho,
                                  double sym_tol) {
    return SymmetricStateFamily(g, rho, sym_tol);
}

}  // namespace symtwirl
