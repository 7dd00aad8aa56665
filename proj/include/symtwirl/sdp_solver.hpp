#pragma once

#include "symtwirl/operator_core.hpp"

#include <string>
#include <vector>

namespace symtwirl::sdp {

/// The variance-minimization SDP
///
///   min_{Lambda, h}  tr(weight * Lambda)
///   s.t.             [[Lambda, B(h)], [B(h), 1]] >= 0,
///                    B(h) = delta - sum_j h_j * h_dirs[j],
///
/// whose optimum is min_h ||B(h)||^2_weight by the Schur complement. Lambda
/// ranges over the full Hermitian space of the dimension.
struct Problem {
    Matrix weight;               // Hermitian PSD objective weight (omega)
    Matrix delta;                // Hermitian
    std::vector<Matrix> h_dirs;  // Hermitian directions C_j
};

struct Options {
    double gap_abs = 1e-8;   // absolute gap target, in delta-normalized units
    double gap_rel = 1e-6;   // relative-to-objective gap target
    double mu = 30.0;        // barrier parameter multiplier per stage
    int max_newton = 2000;
    double cap_factor = 1e4; // trace cap on Lambda relative to the start point
    Eigen::VectorXd warm_h;  // optional warm start (original scale)
    bool verbose = false;
};

struct Result {
    bool converged = false;
    /// ||B(h)||^2_weight at the final iterate: a feasible-point value within
    /// gap_bound of the optimum.
    double value = 0.0;
    double objective = 0.0;  // tr(weight * Lambda) at the final iterate
    double gap_bound = 0.0;
    Eigen::VectorXd h_coeffs;
    Matrix lambda;
    Matrix b_matrix;         // B(h) at the solution
    int newton_steps = 0;
    std::string message;
};

/// Primal log-det barrier path-following method with a feasible start
/// (Lambda0 = B(h0)^2 + 1). A redundant trace cap tr(Lambda) <= tau keeps the
/// central path bounded when `weight` is singular; the solve is retried with
/// a larger tau in the rare case the cap is near-active at the solution.
Result solve(const Problem& problem, const Options& options = {});

}  // namespace symtwirl::sdp
