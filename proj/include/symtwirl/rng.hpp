#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace symtwirl {

/// Seeded Gaussian/uniform source. Uniform doubles are drawn from the top 53
/// bits of mt19937_64 and normals via Box-Muller, so a given seed yields the
/// same stream on every platform (std::normal_distribution does not promise
/// that).
class Rng {
  public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    /// Uniform in (0, 1).
    double uniform();

    /// Standard normal N(0, 1).
    double normal();

    /// Complex Gaussian with independent N(0,1) real and imaginary parts.
    std::complex<double> complex_normal();

    /// Derives an independent stream for worker `index` (splitmix64 hash of
    /// the pair), used to parallelize sampling without overlapping streams.
    static std::uint64_t derive_stream(std::uint64_t seed, std::uint64_t index);

  private:
    std::mt19937_64 engine_;
    bool have_spare_ = false;
    double spare_ = 0.0;
};

}  // namespace symtwirl
