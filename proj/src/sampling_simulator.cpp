#include "symtwirl/sampling_simulator.hpp"

#include "symtwirl/rng.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

namespace symtwirl {

// ============================================================================
// MeasurementPlan
// ============================================================================

double MeasurementPlan::expected_mean() const {
    double m = 0.0;
    for (std::size_t k = 0; k < outcomes.size(); ++k) m += probabilities[k] * outcomes[k];
    return m;
}

double MeasurementPlan::distribution_variance() const {
    const double m = expected_mean();
    double second = 0.0;
    for (std::size_t k = 0; k < outcomes.size(); ++k) {
        second += probabilities[k] * outcomes[k] * outcomes[k];
    }
    return std::max(0.0, second - m * m);
}

MeasurementPlan make_plan(const DensityMatrix& omega, const HermitianOperator& y,
                          double group_tol) {
    if (omega.dim() != y.dim()) throw std::invalid_argument("make_plan: dimension mismatch");
    SpectralDecomposition dec = eig_hermitian(y, group_tol);

    MeasurementPlan plan{std::move(dec.eigenvalues), std::move(dec.projectors), omega, {}};
    plan.probabilities.reserve(plan.outcomes.size());
    double total = 0.0;
    for (const Matrix& pi : plan.projectors) {
        double p = trace_product_real(omega.mat(), pi);
        if (p < -1e-10) {
            std::ostringstream os;
            os << "make_plan: outcome probability " << p << " below the rounding floor";
            throw std::runtime_error(os.str());
        }
        p = std::max(p, 0.0);
        plan.probabilities.push_back(p);
        total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) {
        std::ostringstream os;
        os << "make_plan: probabilities sum to " << total;
        throw std::runtime_error(os.str());
    }
    for (double& p : plan.probabilities) p /= total;
    return plan;
}

std::vector<double> sample_outcomes(const MeasurementPlan& plan, std::int64_t n,
                                    std::uint64_t seed) {
    if (n < 1) throw std::invalid_argument("sample_outcomes: need n >= 1");
    std::vector<double> cumulative(plan.probabilities.size());
    std::partial_sum(plan.probabilities.begin(), plan.probabilities.end(), cumulative.begin());
    cumulative.back() = 1.0;

    Rng rng(seed);
    std::vector<double> draws;
    draws.reserve(static_cast<std::size_t>(n));
    for (std::int64_t i = 0; i < n; ++i) {
        const double u = rng.uniform();
        const auto it = std::upper_bound(cumulative.begin(), cumulative.end(), u);
        const std::size_t k = static_cast<std::size_t>(it - cumulative.begin());
        draws.push_back(plan.outcomes[std::min(k, plan.outcomes.size() - 1)]);
    }
    return draws;
}

// ============================================================================
// Estimation
// ============================================================================

EstimatorReport estimate(const MeasurementPlan& plan, std::int64_t n, std::uint64_t seed,
                         double target) {
    const std::vector<double> draws = sample_outcomes(plan, n, seed);
    EstimatorReport rep;
    rep.samples = n;
    rep.predicted_variance = plan.distribution_variance();
    rep.target = std::isnan(target) ? plan.expected_mean() : target;

    double sum = 0.0;
    for (double x : draws) sum += x;
    rep.mean = sum / static_cast<double>(n);

    if (n >= 2) {
        double ss = 0.0;
        for (double x : draws) ss += (x - rep.mean) * (x - rep.mean);
        rep.variance = ss / static_cast<double>(n - 1);
        rep.standard_error = std::sqrt(rep.variance / static_cast<double>(n));
        rep.variance_defined = true;
    } else {
        rep.variance = std::numeric_limits<double>::quiet_NaN();
        rep.standard_error = std::numeric_limits<double>::quiet_NaN();
        rep.variance_defined = false;
    }

    if (rep.variance_defined && rep.standard_error > 0.0) {
        rep.mean_flagged = std::abs(rep.mean - plan.expected_mean()) > 5.0 * rep.standard_error;
    }
    return rep;
}

// ============================================================================
// Strategy comparison
// ============================================================================

ComparisonReport compare_strategies(const EstimationContext& ctx, std::int64_t n,
                                    std::uint64_t seed, bool force_sdp) {
    const OptimalMeasurement opt = optimal_observable(ctx, force_sdp);
    const HermitianOperator cust = customary_observable(ctx.channel, ctx.x);

    const MeasurementPlan plan_opt = make_plan(ctx.omega, opt.y0);
    const MeasurementPlan plan_cust = make_plan(ctx.omega, cust);
    const MeasurementPlan plan_direct = make_plan(ctx.omega, ctx.x);

    ComparisonReport rep;
    rep.optimal = {"optimal", estimate(plan_opt, n, Rng::derive_stream(seed, 0), ctx.xbar), 0.0};
    rep.customary = {"customary", estimate(plan_cust, n, Rng::derive_stream(seed, 1), ctx.xbar),
                     0.0};
    rep.direct = {"direct", estimate(plan_direct, n, Rng::derive_stream(seed, 2), ctx.xbar),
                  plan_direct.expected_mean() - ctx.xbar};

    const double vo = rep.optimal.estimator.variance;
    const double vc = rep.customary.estimator.variance;
    rep.empirical_ratio = vc > 0.0 ? vo / vc : std::numeric_limits<double>::quiet_NaN();
    const double po = plan_opt.distribution_variance();
    const double pc = plan_cust.distribution_variance();
    rep.predicted_ratio = pc > 0.0 ? po / pc : std::numeric_limits<double>::quiet_NaN();
    rep.sample_fraction = rep.predicted_ratio;
    rep.optimal_path = opt.path;
    return rep;
}

}  // namespace symtwirl
