#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "symtwirl/group_symmetry.hpp"
#include "symtwirl/operator_core.hpp"
#include "symtwirl/rng.hpp"

#include <bit>
#include <cmath>

using namespace symtwirl;

namespace {

HermitianOperator sigma(Pauli p) { return HermitianOperator(pauli_matrix(p)); }

}  // namespace

TEST_CASE("hs_inner on Paulis") {
    CHECK(hs_inner(sigma(Pauli::X), sigma(Pauli::X)) == doctest::Approx(2.0));
    CHECK(hs_inner(sigma(Pauli::X), sigma(Pauli::Z)) == doctest::Approx(0.0));
    CHECK(hs_inner(HermitianOperator::identity(2), HermitianOperator::identity(2)) ==
          doctest::Approx(2.0));
    CHECK_THROWS_AS(hs_inner(sigma(Pauli::X), HermitianOperator::identity(4)),
                    std::invalid_argument);
}

TEST_CASE("weighted_inner examples") {
    CHECK(weighted_inner(DensityMatrix::maximally_mixed(2), sigma(Pauli::Z), sigma(Pauli::Z)) ==
          doctest::Approx(1.0));
    CHECK(weighted_inner(DensityMatrix((Matrix(2, 2) << 1, 0, 0, 0).finished()), sigma(Pauli::X),
                         sigma(Pauli::Y)) == doctest::Approx(0.0).epsilon(1e-12));
    // direct trace evaluation: tr[diag(0.6,0.4) * (s_z*1 + 1*s_z)/2] = 0.6 - 0.4
    const DensityMatrix omega((Matrix(2, 2) << 0.6, 0, 0, 0.4).finished());
    CHECK(weighted_inner(omega, sigma(Pauli::Z), HermitianOperator::identity(2)) ==
          doctest::Approx(0.2));
}

TEST_CASE("weighted_inner properties") {
    Rng seeds(41);
    for (int trial = 0; trial < 20; ++trial) {
        const HermitianOperator h = random_observable(3, 100 + trial);
        Matrix raw = random_observable(3, 200 + trial).mat();
        raw = raw * raw;
        raw /= raw.trace().real();
        const DensityMatrix omega(raw);
        CHECK(weighted_inner(omega, h, h) >= -1e-10);
        // hs_inner recovered at omega = 1/d up to the factor d
        const HermitianOperator h2 = random_observable(3, 300 + trial);
        CHECK(weighted_inner(DensityMatrix::maximally_mixed(3), h, h2) ==
              doctest::Approx(hs_inner(h, h2) / 3.0).epsilon(1e-12));
        // symmetry and bilinearity in the first slot
        CHECK(weighted_inner(omega, h, h2) == doctest::Approx(weighted_inner(omega, h2, h)));
    }
}

TEST_CASE("gell_mann_basis structure") {
    SUBCASE("d = 2 is the Pauli set") {
        const OperatorBasis b = gell_mann_basis(2);
        REQUIRE(b.elements.size() == 4);
        CHECK((b.elements[0].mat() - Matrix::Identity(2, 2)).norm() == doctest::Approx(0.0));
        CHECK((b.elements[1].mat() - pauli_matrix(Pauli::X)).norm() == doctest::Approx(0.0));
        CHECK((b.elements[2].mat() - pauli_matrix(Pauli::Y)).norm() == doctest::Approx(0.0));
        CHECK((b.elements[3].mat() - pauli_matrix(Pauli::Z)).norm() == doctest::Approx(0.0));
    }
    for (Eigen::Index d : {3, 4}) {
        const OperatorBasis b = gell_mann_basis(d);
        REQUIRE(static_cast<Eigen::Index>(b.elements.size()) == d * d);
        for (std::size_t i = 1; i < b.elements.size(); ++i) {
            CHECK(b.elements[i].trace() == doctest::Approx(0.0).epsilon(1e-12));
            for (std::size_t j = 1; j < b.elements.size(); ++j) {
                const double expected = i == j ? 2.0 : 0.0;
                CHECK(hs_inner(b.elements[i], b.elements[j]) ==
                      doctest::Approx(expected).epsilon(1e-12));
            }
            CHECK(hs_inner(b.elements[0], b.elements[i]) == doctest::Approx(0.0).epsilon(1e-12));
        }
    }
}

TEST_CASE("gell_mann expansion round-trip") {
    for (Eigen::Index d : {2, 3, 5}) {
        const OperatorBasis b = gell_mann_basis(d);
        const HermitianOperator h = random_observable(d, 7 + static_cast<std::uint64_t>(d));
        Matrix recon = Matrix::Zero(d, d);
        // coefficients: identity component tr(h)/d, generators tr(h l)/2
        recon += (h.trace() / static_cast<double>(d)) * b.elements[0].mat();
        for (std::size_t i = 1; i < b.elements.size(); ++i) {
            recon += (hs_inner(h, b.elements[i]) / 2.0) * b.elements[i].mat();
        }
        CHECK((recon - h.mat()).norm() <= 1e-10);
    }
}

TEST_CASE("eig_hermitian") {
    SUBCASE("sigma_z") {
        const SpectralDecomposition dec = eig_hermitian(sigma(Pauli::Z));
        REQUIRE(dec.eigenvalues.size() == 2);
        CHECK(dec.eigenvalues[0] == doctest::Approx(-1.0));
        CHECK(dec.eigenvalues[1] == doctest::Approx(1.0));
        for (const Matrix& p : dec.projectors) CHECK(p.trace().real() == doctest::Approx(1.0));
    }
    SUBCASE("identity is fully degenerate") {
        const SpectralDecomposition dec = eig_hermitian(HermitianOperator::identity(2));
        REQUIRE(dec.eigenvalues.size() == 1);
        CHECK((dec.projectors[0] - Matrix::Identity(2, 2)).norm() == doctest::Approx(0.0));
    }
    SUBCASE("degeneracy grouping") {
        Matrix m = Matrix::Zero(3, 3);
        m(0, 0) = 1.0;
        m(1, 1) = 1.0 + 1e-12;
        m(2, 2) = 2.0;
        const SpectralDecomposition dec = eig_hermitian(HermitianOperator(m), 1e-9);
        CHECK(dec.eigenvalues.size() == 2);
    }
    SUBCASE("invariants on a random operator") {
        const HermitianOperator h = random_observable(5, 99);
        const SpectralDecomposition dec = eig_hermitian(h);
        Matrix sum = Matrix::Zero(5, 5);
        Matrix recon = Matrix::Zero(5, 5);
        for (std::size_t k = 0; k < dec.projectors.size(); ++k) {
            const Matrix& p = dec.projectors[k];
            CHECK((p * p - p).norm() <= 1e-10);
            for (std::size_t l = 0; l < k; ++l) {
                CHECK((p * dec.projectors[l]).norm() <= 1e-10);
            }
            sum += p;
            recon += dec.eigenvalues[k] * p;
        }
        CHECK((sum - Matrix::Identity(5, 5)).norm() <= 1e-10);
        CHECK((recon - h.mat()).norm() <= 1e-10);
    }
}

TEST_CASE("dicke_state") {
    SUBCASE("amplitudes of |D_4^(2)>") {
        const DensityMatrix rho = dicke_state(4, 2);
        int nonzero = 0;
        for (Eigen::Index x = 0; x < 16; ++x) {
            const double pop = rho.mat()(x, x).real();
            if (pop > 1e-14) {
                ++nonzero;
                CHECK(pop == doctest::Approx(1.0 / 6.0));
                CHECK(std::popcount(static_cast<unsigned>(x)) == 2);
            }
        }
        CHECK(nonzero == 6);
    }
    SUBCASE("l = 0 gives |0...0>") {
        const DensityMatrix rho = dicke_state(3, 0);
        CHECK(rho.mat()(0, 0).real() == doctest::Approx(1.0));
    }
    SUBCASE("zzII expectation by enumeration") {
        // oracle: sum over the 6 weight-2 strings of the z1*z2 eigenvalue
        double oracle = 0.0;
        int count = 0;
        for (unsigned x = 0; x < 16; ++x) {
            if (std::popcount(x) != 2) continue;
            const int b0 = (x >> 3) & 1, b1 = (x >> 2) & 1;
            oracle += (b0 ? -1.0 : 1.0) * (b1 ? -1.0 : 1.0);
            ++count;
        }
        oracle /= count;
        CHECK(oracle == doctest::Approx(-1.0 / 3.0));
        const double got = trace_product_real(dicke_state(4, 2).mat(),
                                              pauli_observable("zzII").mat());
        CHECK(got == doctest::Approx(oracle).epsilon(1e-12));
    }
    SUBCASE("permutation invariance") {
        const DensityMatrix rho = dicke_state(4, 2);
        const GroupRepresentation s4 = GroupRepresentation::symmetric_qubits(4);
        CHECK(is_symmetric(s4, rho, 1e-12));
    }
    CHECK_THROWS_AS(dicke_state(3, 4), std::invalid_argument);
}

TEST_CASE("ghz_state") {
    const DensityMatrix bell = ghz_state(2);
    CHECK(bell.mat()(0, 0).real() == doctest::Approx(0.5));
    CHECK(bell.mat()(0, 3).real() == doctest::Approx(0.5));
    CHECK(bell.mat()(3, 3).real() == doctest::Approx(0.5));
    CHECK(trace_product_real(bell.mat(), pauli_observable("zz").mat()) == doctest::Approx(1.0));
    const GroupRepresentation s3 = GroupRepresentation::symmetric_qubits(3);
    CHECK(is_symmetric(s3, ghz_state(3), 1e-12));
}

TEST_CASE("pauli_observable") {
    const HermitianOperator zi = pauli_observable("zI");
    CHECK((zi.mat() - kron(pauli_matrix(Pauli::Z), Matrix::Identity(2, 2))).norm() ==
          doctest::Approx(0.0));
    // involutory
    const HermitianOperator xyzz = pauli_observable("xyzz");
    CHECK((xyzz.mat() * xyzz.mat() - Matrix::Identity(16, 16)).norm() <= 1e-12);
    // xxxx is invariant under the S_4 twirl
    const GroupRepresentation s4 = GroupRepresentation::symmetric_qubits(4);
    const HermitianOperator xxxx = pauli_observable("xxxx");
    CHECK((twirl(s4, xxxx).mat() - xxxx.mat()).norm() <= 1e-12);
    CHECK_THROWS_AS(pauli_observable("zq"), std::invalid_argument);
    CHECK_THROWS_AS(pauli_observable(""), std::invalid_argument);
}

TEST_CASE("random_observable") {
    const HermitianOperator a = random_observable(4, 123);
    const HermitianOperator b = random_observable(4, 123);
    const HermitianOperator c = random_observable(4, 124);
    CHECK((a.mat() - a.mat().adjoint()).norm() <= 1e-14);
    CHECK((a.mat() - b.mat()).norm() == doctest::Approx(0.0));
    CHECK((a.mat() - c.mat()).norm() > 1e-3);
}

TEST_CASE("HermitianOperator construction") {
    Matrix bad(2, 2);
    bad << 0, 1, 0, 0;
    CHECK_THROWS_AS(HermitianOperator{bad}, std::invalid_argument);
    // benign rounding is symmetrized away
    Matrix nearly = pauli_matrix(Pauli::X);
    nearly(0, 1) += Complex(0, 1e-14);
    const HermitianOperator fixed(nearly);
    CHECK((fixed.mat() - fixed.mat().adjoint()).norm() == doctest::Approx(0.0));
}

TEST_CASE("DensityMatrix validation") {
    CHECK_THROWS_AS(DensityMatrix{Matrix::Identity(2, 2)}, std::invalid_argument);
    Matrix neg(2, 2);
    neg << 1.5, 0, 0, -0.5;
    CHECK_THROWS_AS(DensityMatrix{neg}, std::invalid_argument);
}

TEST_CASE("HermitianBasis orthonormality and kron ordering") {
    for (Eigen::Index d : {2, 3, 4}) {
        const HermitianBasis& basis = HermitianBasis::of_dim(d);
        REQUIRE(basis.size() == d * d);
        for (Eigen::Index i = 0; i < basis.size(); ++i) {
            for (Eigen::Index j = i; j < basis.size(); ++j) {
                const double expected = i == j ? 1.0 : 0.0;
                CHECK(trace_product_real(basis.elements()[i], basis.elements()[j]) ==
                      doctest::Approx(expected).epsilon(1e-12));
            }
        }
        const HermitianOperator h = random_observable(d, 55);
        CHECK((basis.reconstruct(basis.coords(h.mat())) - h.mat()).norm() <= 1e-12);
    }
    // tensor-Pauli ordering: element (i,j) of dim 4 = element_i (x) element_j of dim 2
    const HermitianBasis& b2 = HermitianBasis::of_dim(2);
    const HermitianBasis& b4 = HermitianBasis::of_dim(4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        for (Eigen::Index j = 0; j < 4; ++j) {
            CHECK((b4.elements()[i * 4 + j] - kron(b2.elements()[i], b2.elements()[j])).norm() <=
                  1e-14);
        }
    }
}

TEST_CASE("Rng determinism") {
    Rng a(9), b(9);
    for (int i = 0; i < 100; ++i) CHECK(a.normal() == b.normal());
    CHECK(Rng::derive_stream(1, 2) != Rng::derive_stream(1, 3));
    CHECK(Rng::derive_stream(1, 2) == Rng::derive_stream(1, 2));
}
