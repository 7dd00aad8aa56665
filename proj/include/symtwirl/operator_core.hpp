#pragma once

#include <Eigen/Dense>

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace symtwirl {

using Complex = std::complex<double>;
using Matrix = Eigen::MatrixXcd;

inline constexpr double kHermitianTol = 1e-12;
inline constexpr double kEigenvalueFloor = -1e-10;
inline constexpr double kEigGroupTol = 1e-9;

// ============================================================================
// Domain types
// ============================================================================

/// Dense complex Hermitian matrix. Construction symmetrizes (h + h†)/2 when
/// the asymmetry is below `tol` and throws otherwise, so benign rounding is
/// absorbed while genuinely non-Hermitian input surfaces as an error.
class HermitianOperator {
  public:
    explicit HermitianOperator(const Matrix& entries, double tol = kHermitianTol);

    static HermitianOperator zero(Eigen::Index dim);
    static HermitianOperator identity(Eigen::Index dim);

    const Matrix& mat() const { return entries_; }
    Eigen::Index dim() const { return entries_.rows(); }
    double trace() const { return entries_.trace().real(); }
    double frobenius_norm() const { return entries_.norm(); }

    HermitianOperator operator+(const HermitianOperator& o) const;
    HermitianOperator operator-(const HermitianOperator& o) const;
    HermitianOperator operator*(double s) const;

  private:
    Matrix entries_;
};

inline HermitianOperator operator*(double s, const HermitianOperator& h) { return h * s; }

/// Unit-trace positive semidefinite Hermitian matrix (eigenvalues are allowed
/// to dip to -1e-10 to absorb rounding).
class DensityMatrix {
  public:
    explicit DensityMatrix(const Matrix& entries, double herm_tol = kHermitianTol,
                           double trace_tol = 1e-12, double eig_floor = kEigenvalueFloor);

    static DensityMatrix maximally_mixed(Eigen::Index dim);
    static DensityMatrix pure(const Eigen::VectorXcd& state);

    const Matrix& mat() const { return entries_; }
    Eigen::Index dim() const { return entries_.rows(); }
    HermitianOperator as_operator() const { return HermitianOperator(entries_); }

  private:
    Matrix entries_;
};

/// Ordered Hilbert-Schmidt-orthogonal Hermitian basis of d x d space: one
/// element proportional to the identity followed by d^2 - 1 traceless
/// generators normalized to tr(lambda_i lambda_j) = 2 delta_ij.
struct OperatorBasis {
    Eigen::Index dim = 0;
    std::vector<HermitianOperator> elements;
};

/// Eigendecomposition with near-degenerate eigenvalues merged into a single
/// outcome/projector pair. Outcomes are sorted ascending.
struct SpectralDecomposition {
    std::vector<double> eigenvalues;
    std::vector<Matrix> projectors;
    double group_tol = kEigGroupTol;
};

// ============================================================================
// Inner products
// ============================================================================

/// Hilbert-Schmidt inner product tr(h1 h2).
double hs_inner(const HermitianOperator& h1, const HermitianOperator& h2);

/// Weighted (pre-)inner product tr[omega (h1 h2 + h2 h1)/2]. Positive
/// semidefinite as a quadratic form; degenerate when omega is singular.
double weighted_inner(const DensityMatrix& omega, const HermitianOperator& h1,
                      const HermitianOperator& h2);

// ============================================================================
// Bases and spectra
// ============================================================================

/// Generalized Gell-Mann basis of dimension d: identity plus the standard
/// symmetric/antisymmetric/diagonal su(d) generators with tr(l_i l_j) = 2d_ij.
/// For d = 2 this is {1, sigma_x, sigma_y, sigma_z}.
OperatorBasis gell_mann_basis(Eigen::Index d);

/// Eigendecomposition of `h`, merging eigenvalues closer than
/// group_tol * max(1, spectral norm) into one projector.
SpectralDecomposition eig_hermitian(const HermitianOperator& h, double group_tol = kEigGroupTol);

// ============================================================================
// States and observables
// ============================================================================

/// Dicke state |D_n^(l)>: uniform superposition of all weight-l bitstrings.
DensityMatrix dicke_state(int n, int l);

/// GHZ state (|0...0> + |1...1>)/sqrt(2) on n qubits.
DensityMatrix ghz_state(int n);

enum class Pauli : std::uint8_t { I = 0, X = 1, Y = 2, Z = 3 };

const Matrix& pauli_matrix(Pauli p);

/// Tensor product sigma_{k1} x ... x sigma_{kn}.
HermitianOperator pauli_observable(const std::vector<Pauli>& indices);

/// Parses strings like "zzII" or "XyzI" (case-insensitive x/y/z, 'I' or 'i'
/// for the identity factor).
HermitianOperator pauli_observable(const std::string& letters);
std::vector<Pauli> parse_pauli_string(const std::string& letters);
std::string pauli_to_string(const std::vector<Pauli>& indices);

/// X = (C + C†)/2 with C drawn entrywise from the standard complex Gaussian;
/// deterministic per seed (see kRngVersion).
HermitianOperator random_observable(Eigen::Index d, std::uint64_t seed);

// ============================================================================
// Internal orthonormal basis used for superoperator matrices
// ============================================================================

/// HS-orthonormal Hermitian basis (tr(H_i H_j) = delta_ij) used to represent
/// linear maps on Hermitian space as real d^2 x d^2 matrices. Tensor-Pauli
/// (scaled by 1/sqrt(d)) for power-of-two dimensions so that tensor-product
/// channels have exactly Kronecker-factored transfer matrices; scaled
/// Gell-Mann otherwise. Instances are cached per dimension and immutable.
class HermitianBasis {
  public:
    static const HermitianBasis& of_dim(Eigen::Index d);

    Eigen::Index dim() const { return dim_; }
    Eigen::Index size() const { return static_cast<Eigen::Index>(elements_.size()); }
    const std::vector<Matrix>& elements() const { return elements_; }
    bool tensor_pauli() const { return tensor_pauli_; }

    /// Real coordinates of a Hermitian matrix in this basis.
    Eigen::VectorXd coords(const Matrix& h) const;
    Matrix reconstruct(const Eigen::VectorXd& c) const;

    /// d^2 x d^2 unitary whose column i is vec(H_i).
    const Matrix& stack() const { return stack_; }

  private:
    explicit HermitianBasis(Eigen::Index d);

    Eigen::Index dim_;
    bool tensor_pauli_;
    std::vector<Matrix> elements_;
    Matrix stack_;
};

// ============================================================================
// Small helpers shared across modules
// ============================================================================

Matrix kron(const Matrix& a, const Matrix& b);
bool is_power_of_two(Eigen::Index d);

/// Real part of tr(a b); a and b must be square and of equal dimension.
double trace_product_real(const Matrix& a, const Matrix& b);

}  // namespace symtwirl
