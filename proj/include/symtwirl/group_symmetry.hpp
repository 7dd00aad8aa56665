#pragma once

#include "symtwirl/operator_core.hpp"

#include <memory>
#include <vector>

namespace symtwirl {

inline constexpr double kGroupDedupTol = 1e-9;
inline constexpr double kUnitaryTol = 1e-10;
inline constexpr double kFixedPointEigTol = 1e-8;
inline constexpr int kPermutationCap = 6;

// ============================================================================
// GroupRepresentation
// ============================================================================

/// Finite list of unitary d x d matrices closed under multiplication and
/// containing the identity. Immutable; copies share the element storage.
class GroupRepresentation {
  public:
    /// Closure of `generators` under products, deduplicated by max-entry
    /// distance <= kGroupDedupTol. Throws if the closure exceeds `max_order`
    /// or a generator is not unitary.
    static GroupRepresentation generate(const std::vector<Matrix>& generators, int max_order);

    /// All n! qubit-permutation unitaries on (C^2)^(x n). Built directly from
    /// the permutations (exact 0/1 matrices); the adjacent transpositions are
    /// recorded as generators. Throws if n exceeds `cap`.
    static GroupRepresentation symmetric_qubits(int n, int cap = kPermutationCap);

    /// Wraps an explicit element list, validating unitarity, closure and the
    /// presence of the identity.
    static GroupRepresentation from_elements(std::vector<Matrix> elements,
                                             double tol = kUnitaryTol);

    Eigen::Index dim() const { return dim_; }
    std::size_t order() const { return elements_->size(); }
    const std::vector<Matrix>& elements() const { return *elements_; }

    bool built_from_generators() const { return !generator_indices_.empty(); }
    /// Indices into elements() of the generating set (empty for explicit
    /// groups); covariance tests may restrict to these.
    const std::vector<std::size_t>& generator_indices() const { return generator_indices_; }

  private:
    GroupRepresentation(std::shared_ptr<const std::vector<Matrix>> elements,
                        std::vector<std::size_t> generator_indices, Eigen::Index dim)
        : elements_(std::move(elements)),
          generator_indices_(std::move(generator_indices)),
          dim_(dim) {}

    std::shared_ptr<const std::vector<Matrix>> elements_;
    std::vector<std::size_t> generator_indices_;
    Eigen::Index dim_ = 0;
};

// ============================================================================
// Twirling
// ============================================================================

/// G-twirl P(h) = sum_g U_g h U_g^dag / |G|.
HermitianOperator twirl(const GroupRepresentation& g, const HermitianOperator& h);
Matrix twirl_raw(const GroupRepresentation& g, const Matrix& h);

/// Q(h) = h - P(h).
HermitianOperator q_map(const GroupRepresentation& g, const HermitianOperator& h);

/// True iff max_g ||U_g rho U_g^dag - rho||_F <= tol.
bool is_symmetric(const GroupRepresentation& g, const DensityMatrix& rho, double tol = 1e-9);

/// Twirl superoperator in the orthonormal Hermitian basis, with the commutant
/// (fixed-point space) extracted as the eigenvalue-1 eigenspace of A_P.
/// Expensive to build (d^2 twirls); construct once per group and share.
class TwirlProjector {
  public:
    explicit TwirlProjector(const GroupRepresentation& g);

    const GroupRepresentation& group() const { return group_; }
    Eigen::Index dim() const { return group_.dim(); }

    /// A_P, real symmetric d^2 x d^2, an orthogonal projector up to rounding.
    const Eigen::MatrixXd& transfer() const { return transfer_; }

    /// HS-orthonormal Hermitian basis of the fixed-point space; the first
    /// element is 1/sqrt(d).
    const std::vector<Matrix>& commutant() const { return commutant_; }

    /// HS-orthonormal basis of the orthogonal complement of the commutant
    /// (the image of Q).
    const std::vector<Matrix>& complement() const { return complement_; }

    Matrix project(const Matrix& h) const;    // P(h) via A_P
    Matrix q_project(const Matrix& h) const;  // Q(h) = h - P(h)

  private:
    GroupRepresentation group_;
    Eigen::MatrixXd transfer_;
    std::vector<Matrix> commutant_;
    std::vector<Matrix> complement_;
};

/// HS-orthonormal Hermitian basis of {h : [h, U_g] = 0 for all g}, first
/// element proportional to the identity.
std::vector<HermitianOperator> commutant_basis(const GroupRepresentation& g);

// ============================================================================
// SymmetricStateFamily
// ============================================================================

/// Symmetric state rho = 1/d + sum_i theta_i B_i with tangent directions B_i
/// spanning the traceless commutant, normalized to tr(B_i B_j) = 2 delta_ij
/// (the su(n) generator convention, so theta_i = tr(B_i rho)/2).
class SymmetricStateFamily {
  public:
    SymmetricStateFamily(const GroupRepresentation& g, const DensityMatrix& rho,
                         double sym_tol = 1e-9);
    SymmetricStateFamily(std::shared_ptr<const TwirlProjector> projector,
                         const DensityMatrix& rho, double sym_tol = 1e-9);

    const GroupRepresentation& group() const { return projector_->group(); }
    const TwirlProjector& projector() const { return *projector_; }
    std::shared_ptr<const TwirlProjector> projector_ptr() const { return projector_; }
    const DensityMatrix& rho() const { return rho_; }

    int parameter_count() const { return static_cast<int>(tangent_.size()); }
    const std::vector<Matrix>& tangent() const { return tangent_; }
    const Eigen::VectorXd& theta() const { return theta_; }

  private:
    void init(double sym_tol);

    std::shared_ptr<const TwirlProjector> projector_;
    DensityMatrix rho_;
    std::vector<Matrix> tangent_;
    Eigen::VectorXd theta_;
};

SymmetricStateFamily state_family(const GroupRepresentation& g, const DensityMatrix& rho,
                                  double sym_tol = 1e-9);

}  // namespace symtwirl
