#pragma once

#include "agma/types.hpp"

#include <optional>
#include <string>
#include <vector>

namespace agma::problems {

enum class LossFamily {
    LeastSquares,          // f_n = 1/(2|D_n|) * sum (x'θ - y)^2
    RegularizedLogistic,   // f_n = 1/|D_n| * sum log(1+exp(-y x'θ)) + λ/2 ||θ||^2
    LogLoss,               // f_n = 1/(2|D_n|) * sum log((x'θ - y)^2 + 1), non-convex
};

std::string to_string(LossFamily family);

/// One node's local data: |D_n| x d features and |D_n| labels.
struct NodeDataset {
    Matrix inputs;
    Vector labels;

    Index sample_count() const { return inputs.rows(); }
};

/**
 * Analytic constants of a problem instance.
 *
 * lipschitz (L) and strong_convexity (mu) are the per-node averages
 * (1/N) sum L_n and (1/N) sum mu_n; gradient_power (G) bounds
 * ||grad f_n||^2 over the verification trajectory; theta_star / f_star
 * are the minimizer and its objective value.
 */
struct ProblemConstants {
    double lipschitz = 0.0;
    double strong_convexity = 0.0;
    double gradient_power = 0.0;
    Vector theta_star;
    double f_star = 0.0;

    bool strongly_convex() const { return strong_convexity > 0.0; }
};

/// Node-partitioned dataset plus loss family. Immutable after construction.
struct ProblemInstance {
    std::vector<NodeDataset> nodes;
    LossFamily family = LossFamily::LeastSquares;
    double logistic_lambda = 0.0;  // λ, RegularizedLogistic only
    Index dimension = 0;
    std::optional<ProblemConstants> constants;

    int node_count() const { return static_cast<int>(nodes.size()); }

    /// Throws ValidationError if any structural invariant is violated.
    void validate() const;
};

/// grad f_n(theta) for the configured loss family.
Vector local_gradient(const ProblemInstance& problem, int node, const Vector& theta);

/// f_n(theta).
double local_objective(const ProblemInstance& problem, int node, const Vector& theta);

/// F(theta) = (1/N) sum_n f_n(theta).
double global_objective(const ProblemInstance& problem, const Vector& theta);

/// grad F(theta) = (1/N) sum_n grad f_n(theta).
Vector global_gradient(const ProblemInstance& problem, const Vector& theta);

/**
 * Computes (L, mu, G, theta_star, F_star) for families with analytic
 * constants (LeastSquares, RegularizedLogistic). LogLoss is non-convex and
 * signals "constants unavailable".
 *
 * G is estimated empirically: max over nodes of ||grad f_n||^2 at theta0,
 * theta_star, and 100 points on the segment between them, inflated by 10%.
 * theta0 defaults to the zero vector.
 */
ProblemConstants compute_constants(const ProblemInstance& problem,
                                   const Vector* theta0 = nullptr);

}  // namespace agma::problems
