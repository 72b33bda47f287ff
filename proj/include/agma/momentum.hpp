#pragma once

#include "agma/types.hpp"

#include <vector>

namespace agma::momentum {

/**
 * Effective Lipschitz constant absorbing the stepsize and channel mean:
 *   L_tilde = 1 / (beta (2/mu_h - beta L) mu_h^2).
 * Defined for 0 < beta < 2/(mu_h L); always >= L, with equality at
 * beta = 1/(mu_h L).
 */
double l_beta_tilde(double beta, double mu_h, double lipschitz);

/// Largest stepsize still inside the convergence range, 2/(mu_h L).
double stepsize_upper_limit(double mu_h, double lipschitz);

/**
 * gamma_0 = alpha_0 (alpha_0 L - mu) / (1 - alpha_0); reduces to
 * alpha_0^2 L / (1 - alpha_0) in the convex case (mu = 0).
 * Requires alpha_0 in (0,1); with mu > 0 the initialization condition
 * alpha_0 > sqrt(mu/L) makes gamma_0 > mu.
 */
double gamma0(double alpha0, double lipschitz, double mu);

/**
 * The unique root in (0,1) of
 *   alpha^2 + (alpha_k^2 - q) alpha - alpha_k^2 = 0,
 * i.e. the next element of the control sequence with q = mu / L_tilde
 * (q = 0 in the convex case).
 */
double next_alpha(double alpha_k, double q);

/// Momentum coefficient eta_k = alpha_k (1 - alpha_k) / (alpha_{k+1} + alpha_k^2).
double eta_k(double alpha_k, double alpha_next);

/**
 * Closed-form upper bound on lambda_k = prod_{i<k} (1 - alpha_i):
 *   strongly convex: (1 - sqrt(q))^k
 *   convex:          4 L_tilde / (2 sqrt(L_tilde) + k sqrt(gamma0))^2
 */
double lambda_bound(long k, double q, double gamma0, double l_tilde, bool strongly_convex);

/// Default alpha_0: midpoint of (sqrt(mu/L), 1) when mu > 0, else 0.5.
double default_alpha0(double mu, double lipschitz);

/**
 * The control sequences {alpha_k}, {eta_k}, {lambda_k}, {gamma_k}.
 *
 * Sequences are generated by the exact recursions
 *   alpha_{k+1}^2 = (1 - alpha_{k+1}) alpha_k^2 + q alpha_{k+1}
 *   lambda_{k+1}  = (1 - alpha_k) lambda_k,          lambda_0 = 1
 *   gamma_{k+1}   = (1 - alpha_k) gamma_k + alpha_k mu
 * extended on demand via extend(); accessors are read-only afterwards, so a
 * fully extended schedule is safe to share across threads.
 */
class MomentumSchedule {
public:
    MomentumSchedule(double alpha0, double q, double gamma0, double mu);

    /// Schedule for a strongly convex objective: q = mu / l_tilde,
    /// gamma_0 from (alpha0, L, mu).
    static MomentumSchedule strongly_convex(double alpha0, double mu, double l_tilde,
                                            double lipschitz);

    /// Convex-only schedule: q = 0, gamma_0 = alpha0^2 L / (1 - alpha0).
    static MomentumSchedule convex(double alpha0, double lipschitz);

    /// Ensures alpha_0..alpha_k (and lambda/gamma up to k) are generated.
    void extend(long k);

    double alpha(long k) const { return at(alphas_, k, "alpha"); }
    double lambda(long k) const { return at(lambdas_, k, "lambda"); }
    double gamma(long k) const { return at(gammas_, k, "gamma"); }

    /// eta_k needs alpha_{k+1}; extend(k+1) first.
    double eta(long k) const;

    double alpha0() const { return alphas_.front(); }
    double q() const { return q_; }
    double mu() const { return mu_; }
    double gamma0_value() const { return gammas_.front(); }
    long generated() const { return static_cast<long>(alphas_.size()) - 1; }

private:
    double at(const std::vector<double>& seq, long k, const char* name) const;

    double q_;
    double mu_;
    std::vector<double> alphas_;
    std::vector<double> lambdas_;
    std::vector<double> gammas_;
};

}  // namespace agma::momentum
