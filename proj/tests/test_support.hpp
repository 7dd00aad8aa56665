#pragma once

#include "symtwirl/channel_algebra.hpp"
#include "symtwirl/group_symmetry.hpp"
#include "symtwirl/operator_core.hpp"
#include "symtwirl/rng.hpp"

#include <vector>

namespace symtwirl::test {

/// Random full-rank state symmetric under G: a seeded mixture in the
/// commutant, floored by the maximally mixed state.
inline DensityMatrix random_symmetric_state(const GroupRepresentation& g, std::uint64_t seed,
                                            double mix = 0.5) {
    const Eigen::Index d = g.dim();
    Rng rng(seed);
    Matrix c(d, d);
    for (Eigen::Index i = 0; i < d; ++i)
        for (Eigen::Index j = 0; j < d; ++j) c(i, j) = rng.complex_normal();
    Matrix h = twirl_raw(g, 0.5 * (c + Matrix(c.adjoint())));
    h = h * h;  // PSD and still in the commutant
    h /= h.trace().real();
    Matrix rho = (1.0 - mix) * h + mix * Matrix::Identity(d, d) / static_cast<double>(d);
    return DensityMatrix(rho);
}

/// Random CPTP map with `n_kraus` Kraus operators (QR of a stacked Gaussian
/// isometry), mixed with depolarizing(0.2) so the transfer matrix is
/// comfortably invertible and full-rank states stay full rank.
inline QuantumChannel random_invertible_channel(Eigen::Index d, std::uint64_t seed,
                                                int n_kraus = 3, double depol_weight = 0.5) {
    Rng rng(seed);
    Matrix stacked(d * n_kraus, d);
    for (Eigen::Index i = 0; i < stacked.rows(); ++i)
        for (Eigen::Index j = 0; j < d; ++j) stacked(i, j) = rng.complex_normal();
    Eigen::HouseholderQR<Matrix> qr(stacked);
    Matrix q = qr.householderQ() * Matrix::Identity(d * n_kraus, d);

    std::vector<Matrix> kraus;
    for (int k = 0; k < n_kraus; ++k) {
        kraus.push_back(std::sqrt(1.0 - depol_weight) * q.middleRows(k * d, d));
    }
    for (const Matrix& m : depolarizing(0.2, d).kraus()) {
        kraus.push_back(std::sqrt(depol_weight) * m);
    }
    return QuantumChannel::from_kraus(std::move(kraus));
}

inline HermitianOperator random_hermitian(Eigen::Index d, std::uint64_t seed) {
    return random_observable(d, seed);
}

}  // namespace symtwirl::test
