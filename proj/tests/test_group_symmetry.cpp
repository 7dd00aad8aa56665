#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include "test_support.hpp"

#include "symtwirl/channel_algebra.hpp"
#include "symtwirl/group_symmetry.hpp"

#include <cmath>

using namespace symtwirl;

namespace {

Matrix rotation_z(double angle) {
    Matrix u = Matrix::Zero(2, 2);
    u(0, 0) = std::polar(1.0, -angle / 2);
    u(1, 1) = std::polar(1.0, angle / 2);
    return u;
}

}  // namespace

TEST_CASE("generate_group") {
    SUBCASE("{sigma_z} closes to order 2") {
        const auto g = GroupRepresentation::generate({pauli_matrix(Pauli::Z)}, 16);
        CHECK(g.order() == 2);
        CHECK(g.built_from_generators());
    }
    SUBCASE("two adjacent transpositions on 3 qubits give S_3") {
        const auto s3 = GroupRepresentation::symmetric_qubits(3);
        std::vector<Matrix> gens;
        for (std::size_t i : s3.generator_indices()) gens.push_back(s3.elements()[i]);
        REQUIRE(gens.size() == 2);
        const auto g = GroupRepresentation::generate(gens, 16);
        CHECK(g.order() == 6);
    }
    SUBCASE("irrational rotation does not close") {
        CHECK_THROWS_AS(GroupRepresentation::generate({rotation_z(std::sqrt(2.0))}, 100),
                        std::runtime_error);
    }
    SUBCASE("non-unitary generator rejected") {
        CHECK_THROWS_AS(GroupRepresentation::generate({0.9 * pauli_matrix(Pauli::X)}, 8),
                        std::invalid_argument);
    }
}

TEST_CASE("permutation_rep") {
    const auto s2 = GroupRepresentation::symmetric_qubits(2);
    CHECK(s2.order() == 2);
    bool found_swap = false;
    for (const Matrix& u : s2.elements()) {
        Matrix swap = Matrix::Zero(4, 4);
        swap(0, 0) = swap(3, 3) = swap(1, 2) = swap(2, 1) = 1.0;
        if ((u - swap).norm() < 1e-12) found_swap = true;
    }
    CHECK(found_swap);

    CHECK(GroupRepresentation::symmetric_qubits(4).order() == 24);
    CHECK_THROWS_AS(GroupRepresentation::symmetric_qubits(7), std::invalid_argument);

    // P_(12)|01> = |10>
    Eigen::VectorXcd e01 = Eigen::VectorXcd::Zero(4);
    e01(1) = 1.0;
    Eigen::VectorXcd e10 = Eigen::VectorXcd::Zero(4);
    e10(2) = 1.0;
    bool maps = false;
    for (const Matrix& u : s2.elements()) {
        if ((u * e01 - e10).norm() < 1e-12) maps = true;
    }
    CHECK(maps);
}

TEST_CASE("twirl") {
    const auto zgroup = GroupRepresentation::generate({pauli_matrix(Pauli::Z)}, 8);
    SUBCASE("kills sigma_x under {1, sigma_z}") {
        CHECK(twirl(zgroup, HermitianOperator(pauli_matrix(Pauli::X))).frobenius_norm() <= 1e-14);
    }
    SUBCASE("fixes symmetric states") {
        const DensityMatrix rho((Matrix(2, 2) << 0.3, 0, 0, 0.7).finished());
        CHECK((twirl_raw(zgroup, rho.mat()) - rho.mat()).norm() <= 1e-14);
    }
    SUBCASE("S_4 twirl of z111 is the mean magnetization") {
        const auto s4 = GroupRepresentation::symmetric_qubits(4);
        const Matrix got = twirl_raw(s4, pauli_observable("zIII").mat());
        Matrix expected = Matrix::Zero(16, 16);
        const std::string base = "IIII";
        for (int i = 0; i < 4; ++i) {
            std::string s = base;
            s[static_cast<std::size_t>(i)] = 'z';
            expected += pauli_observable(s).mat();
        }
        expected /= 4.0;
        CHECK((got - expected).norm() <= 1e-12);
    }
    SUBCASE("output commutes with every U_g") {
        const auto s3 = GroupRepresentation::symmetric_qubits(3);
        const Matrix t = twirl_raw(s3, random_observable(8, 5).mat());
        for (const Matrix& u : s3.elements()) {
            CHECK((u * t - t * u).norm() <= 1e-10);
        }
    }
}

TEST_CASE("q_map") {
    const auto zgroup = GroupRepresentation::generate({pauli_matrix(Pauli::Z)}, 8);
    CHECK(q_map(zgroup, HermitianOperator::identity(2)).frobenius_norm() <= 1e-14);
    CHECK((q_map(zgroup, HermitianOperator(pauli_matrix(Pauli::X))).mat() -
           pauli_matrix(Pauli::X))
              .norm() <= 1e-14);
    // idempotence on random input
    const HermitianOperator h = random_observable(2, 77);
    const HermitianOperator qh = q_map(zgroup, h);
    CHECK((q_map(zgroup, qh).mat() - qh.mat()).norm() <= 1e-12);
}

TEST_CASE("twirl projector invariants") {
    const auto s2 = GroupRepresentation::symmetric_qubits(2);
    const TwirlProjector proj(s2);
    const Eigen::MatrixXd& ap = proj.transfer();
    CHECK((ap - ap.transpose()).norm() <= 1e-12);
    CHECK((ap * ap - ap).norm() <= 1e-9);

    // P idempotent and HS-self-adjoint through the twirl itself
    const HermitianOperator h1 = random_observable(4, 11);
    const HermitianOperator h2 = random_observable(4, 12);
    const HermitianOperator ph1 = twirl(s2, h1);
    CHECK((twirl(s2, ph1).mat() - ph1.mat()).norm() <= 1e-9);
    CHECK(hs_inner(twirl(s2, h1), h2) == doctest::Approx(hs_inner(h1, twirl(s2, h2))));

    // A_P agrees with the direct twirl
    CHECK((proj.project(h1.mat()) - ph1.mat()).norm() <= 1e-10);

    for (const Matrix& c : proj.commutant()) {
        for (const Matrix& u : s2.elements()) {
            CHECK((u * c - c * u).norm() <= 1e-9);
        }
    }
}

TEST_CASE("commutant dimensions") {
    SUBCASE("{1, sigma_z} has the diagonal algebra") {
        const auto zg = GroupRepresentation::generate({pauli_matrix(Pauli::Z)}, 8);
        CHECK(commutant_basis(zg).size() == 2);
    }
    SUBCASE("trivial group commutes with everything") {
        const auto triv = GroupRepresentation::generate({Matrix::Identity(2, 2)}, 4);
        CHECK(commutant_basis(triv).size() == 4);
    }
    SUBCASE("S_2 on two qubits: 3^2 + 1^2 = 10") {
        const auto s2 = GroupRepresentation::symmetric_qubits(2);
        CHECK(commutant_basis(s2).size() == 10);
    }
    SUBCASE("S_3 and S_4 match the Schur-Weyl multiplicity count") {
        // sum over spin sectors of (2S+1)^2: n=3 -> 16+4 = 20, n=4 -> 25+9+1 = 35.
        CHECK(commutant_basis(GroupRepresentation::symmetric_qubits(3)).size() == 20);
        const auto s4 = GroupRepresentation::symmetric_qubits(4);
        const TwirlProjector proj(s4);
        CHECK(proj.commutant().size() == 35);
        // cross-check: the commutant is spanned by the twirls of the 35
        // distinct Pauli-letter multisets
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(proj.transfer());
        int ones = 0;
        for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
            if (std::abs(es.eigenvalues()(i) - 1.0) <= 1e-8) ++ones;
        }
        CHECK(ones == 35);
    }
}

TEST_CASE("commutant basis is orthonormal with identity first") {
    const auto s2 = GroupRepresentation::symmetric_qubits(2);
    const TwirlProjector proj(s2);
    const auto& comm = proj.commutant();
    CHECK((comm[0] - Matrix::Identity(4, 4) / 2.0).norm() <= 1e-12);
    for (std::size_t i = 0; i < comm.size(); ++i) {
        for (std::size_t j = i; j < comm.size(); ++j) {
            const double expected = i == j ? 1.0 : 0.0;
            CHECK(trace_product_real(comm[i], comm[j]) ==
                  doctest::Approx(expected).epsilon(1e-10));
        }
    }
    // complement is orthogonal to the commutant and Q acts as identity there
    for (const Matrix& c : proj.complement()) {
        CHECK(proj.project(c).norm() <= 1e-9);
        CHECK((proj.q_project(c) - c).norm() <= 1e-9);
    }
}

TEST_CASE("state_family") {
    SUBCASE("qubit diagonal family has q = 1 and B = sigma_z") {
        const auto zg = GroupRepresentation::generate({pauli_matrix(Pauli::Z)}, 8);
        const DensityMatrix rho((Matrix(2, 2) << 0.7, 0, 0, 0.3).finished());
        const SymmetricStateFamily fam(zg, rho);
        CHECK(fam.parameter_count() == 1);
        // tangent normalized to tr(B^2) = 2: B = +/- sigma_z
        CHECK(std::abs(hs_inner(HermitianOperator(fam.tangent()[0]),
                                HermitianOperator(fam.tangent()[0])) -
                       2.0) <= 1e-10);
        CHECK((fam.tangent()[0] * fam.tangent()[0] - Matrix::Identity(2, 2)).norm() <= 1e-10);
    }
    SUBCASE("trivial group on a qubit: Bloch ball, q = 3") {
        const auto triv = GroupRepresentation::generate({Matrix::Identity(2, 2)}, 4);
        const SymmetricStateFamily fam(triv, DensityMatrix::maximally_mixed(2));
        CHECK(fam.parameter_count() == 3);
    }
    SUBCASE("S_4 family of the Dicke state: q = commutant dim - 1 = 34") {
        const auto s4 = GroupRepresentation::symmetric_qubits(4);
        const SymmetricStateFamily fam(s4, dicke_state(4, 2));
        CHECK(fam.parameter_count() == 34);
    }
    SUBCASE("coordinates round-trip") {
        const auto s2 = GroupRepresentation::symmetric_qubits(2);
        const DensityMatrix rho = test::random_symmetric_state(s2, 31);
        const SymmetricStateFamily fam(s2, rho);
        Matrix recon = Matrix::Identity(4, 4) / 4.0;
        for (int i = 0; i < fam.parameter_count(); ++i) {
            recon += fam.theta()(i) * fam.tangent()[static_cast<std::size_t>(i)];
        }
        CHECK((recon - rho.mat()).norm() <= 1e-10);
    }
    SUBCASE("asymmetric state rejected") {
        const auto zg = GroupRepresentation::generate({pauli_matrix(Pauli::Z)}, 8);
        Matrix plus(2, 2);
        plus << 0.5, 0.5, 0.5, 0.5;
        CHECK_THROWS_AS(SymmetricStateFamily(zg, DensityMatrix(plus)), std::invalid_argument);
    }
}

TEST_CASE("is_symmetric") {
    const auto s4 = GroupRepresentation::symmetric_qubits(4);
    CHECK(is_symmetric(s4, dicke_state(4, 2), 1e-12));
    const auto zg = GroupRepresentation::generate({pauli_matrix(Pauli::Z)}, 8);
    CHECK(is_symmetric(zg, DensityMatrix((Matrix(2, 2) << 0.3, 0, 0, 0.7).finished())));
    Matrix plus(2, 2);
    plus << 0.5, 0.5, 0.5, 0.5;
    CHECK_FALSE(is_symmetric(zg, DensityMatrix(plus)));
}

TEST_CASE("Appendix C property: trace conditions force commutant elements to zero") {
    // any commutant element with tr(rho h) = 0 and tr(B_i h) = 0 vanishes
    const auto s2 = GroupRepresentation::symmetric_qubits(2);
    const DensityMatrix rho = test::random_symmetric_state(s2, 17);
    const SymmetricStateFamily fam(s2, rho);
    const TwirlProjector& proj = fam.projector();

    // Build the Gram of the constraint functionals over the commutant: the
    // only solution of the homogeneous system must be h = 0.
    const std::size_t m = proj.commutant().size();
    Eigen::MatrixXd constraints(1 + fam.tangent().size(), m);
    for (std::size_t j = 0; j < m; ++j) {
        constraints(0, static_cast<Eigen::Index>(j)) =
            trace_product_real(rho.mat(), proj.commutant()[j]);
        for (std::size_t i = 0; i < fam.tangent().size(); ++i) {
            constraints(1 + static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) =
                trace_product_real(fam.tangent()[i], proj.commutant()[j]);
        }
    }
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(constraints);
    // full column rank <=> kernel is {0}
    CHECK(svd.rank() == static_cast<Eigen::Index>(m));
}

TEST_CASE("twirl orthogonality under the weighted inner product for covariant channels") {
    // <P(h1), Q(h2)>_{E(rho)} = 0 for covariant E and symmetric rho
    const auto s2 = GroupRepresentation::symmetric_qubits(2);
    const DensityMatrix rho = test::random_symmetric_state(s2, 23);
    const QuantumChannel e = tensor_power(dephasing(0.4), 2);
    const DensityMatrix omega = e.apply(rho);
    for (int trial = 0; trial < 10; ++trial) {
        const HermitianOperator h1 = random_observable(4, 400 + trial);
        const HermitianOperator h2 = random_observable(4, 500 + trial);
        const double ip = weighted_inner(omega, twirl(s2, h1), q_map(s2, h2));
        CHECK(std::abs(ip) <= 1e-8);
    }
}
