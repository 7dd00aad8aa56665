#pragma once

#include "symtwirl/optimal_measurement.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace symtwirl {

// ============================================================================
// MeasurementPlan
// ============================================================================

/// Projective measurement of an observable on a fixed state, reduced to the
/// Born-rule outcome distribution p_k = tr(omega Pi_k). Probabilities within
/// -1e-10 of zero are clipped and the distribution renormalized; anything
/// more negative is an error.
struct MeasurementPlan {
    std::vector<double> outcomes;
    std::vector<Matrix> projectors;
    DensityMatrix state;
    std::vector<double> probabilities;

    double expected_mean() const;
    double distribution_variance() const;
};

MeasurementPlan make_plan(const DensityMatrix& omega, const HermitianOperator& y,
                          double group_tol = kEigGroupTol);

/// N i.i.d. Born-rule draws; deterministic per seed.
std::vector<double> sample_outcomes(const MeasurementPlan& plan, std::int64_t n,
                                    std::uint64_t seed);

// ============================================================================
// Estimation
// ============================================================================

struct EstimatorReport {
    std::int64_t samples = 0;
    double mean = 0.0;
    double variance = 0.0;  // unbiased (N-1) estimator; NaN when undefined
    double standard_error = 0.0;
    bool variance_defined = false;
    double target = 0.0;              // Xbar the estimator is aimed at
    double predicted_variance = 0.0;  // (Delta Y)^2 in omega
    bool mean_flagged = false;        // |mean - tr(omega Y)| > 5 stderr
};

/// Samples the plan and summarizes the estimator. `target` defaults to the
/// plan's own expectation value when NaN is passed.
EstimatorReport estimate(const MeasurementPlan& plan, std::int64_t n, std::uint64_t seed,
                         double target = std::numeric_limits<double>::quiet_NaN());

// ============================================================================
// Strategy comparison
// ============================================================================

struct StrategyReport {
    std::string name;
    EstimatorReport estimator;
    double bias = 0.0;  // tr(omega Y) - Xbar; nonzero only for the direct plan
};

struct ComparisonReport {
    StrategyReport optimal;
    StrategyReport customary;
    StrategyReport direct;
    double empirical_ratio = 0.0;  // optimal/customary empirical variances
    double predicted_ratio = 0.0;
    /// Fraction of customary samples the optimal plan needs for equal
    /// precision (= the predicted variance ratio).
    double sample_fraction = 0.0;
    std::string optimal_path;
};

/// Runs the optimal (Y0), customary (E*^{-1}(X)) and direct (X, biased under
/// noise) plans on omega with N samples each.
ComparisonReport compare_strategies(const EstimationContext& ctx, std::int64_t n,
                                    std::uint64_t seed, bool force_sdp = false);

}  // namespace symtwirl
