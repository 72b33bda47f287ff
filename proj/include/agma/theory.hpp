#pragma once

#include "agma/channel.hpp"
#include "agma/problems.hpp"
#include "agma/types.hpp"

#include <optional>

namespace agma::theory {

/// Everything the closed-form error bounds depend on.
struct BoundInputs {
    double lipschitz = 0.0;       // L
    double mu = 0.0;              // strong convexity (0 = convex-only)
    double mu_h = 1.0;            // channel gain mean
    double sigma_h_sq = 0.0;      // channel gain variance
    double sigma_w_sq = 0.0;      // receiver noise variance
    double gradient_power = 0.0;  // G
    Index dimension = 0;          // d
    int nodes = 1;                // N
    double energy = 1.0;          // E_N
    double beta = 0.0;            // stepsize
    double alpha0 = 0.5;
    double f0_gap = 0.0;          // F(theta_0) - F*
    double dist0_sq = 0.0;        // ||theta_0 - theta*||^2
    double epsilon = 0.5;         // convex-case exponent, in (0,1)

    void validate() const;
    double l_tilde() const;  // L_tilde(beta)
};

/// Assembles bound inputs from a problem (with constants), channel, and run
/// configuration. theta0 defaults to the zero vector.
BoundInputs make_bound_inputs(const problems::ProblemInstance& problem,
                              const channel::ChannelModel& channel_model, double beta,
                              double alpha0, double epsilon = 0.5,
                              const Vector* theta0 = nullptr);

/// Per-iteration noise/distortion increment
///   delta_N = (beta/mu_h) (sigma_h^2 G / N + d sigma_w^2 / (E_N N^2)).
double delta_n(const BoundInputs& inputs);

/// k_0 = floor(N^{1-epsilon}), the momentum-validity horizon of the convex bound.
long k0_cap(const BoundInputs& inputs);

/**
 * Strongly convex error bound:
 *   (1 - sqrt(mu/L_tilde))^k (F(theta_0) - F* + gamma_0/2 ||theta_0-theta*||^2)
 *   + sqrt(L_tilde/mu) (beta/mu_h) (sigma_h^2 G / N + d sigma_w^2/(E_N N^2)).
 * Requires mu > 0 (signals "use theorem2_bound" otherwise). The theorem's
 * initialization condition alpha_0 > sqrt(mu/L) is the caller's contract;
 * only alpha_0 in (0,1) is enforced so limit cases stay evaluable.
 */
double theorem1_bound(const BoundInputs& inputs, long k);

/**
 * Convex error bound, valid for k <= k_0 = floor(N^{1-epsilon}):
 *   4 L_tilde / (2 sqrt(L_tilde) + k sqrt(gamma_0))^2 * (divergence term)
 *   + (beta/mu_h) (sigma_h^2 G / N^epsilon + d sigma_w^2/(E_N N^{1+epsilon}))
 * with gamma_0 = alpha_0^2 L / (1 - alpha_0).
 */
double theorem2_bound(const BoundInputs& inputs, long k);

/// The accumulated-noise form of the convex bound, transient(k) + k*delta_N.
/// Unlike the N-exponent form it has an interior minimum over k, which is
/// what the bound-minimizing k_0 selection searches.
double theorem2_bound_accumulated(const BoundInputs& inputs, long k);

/// argmin over k in [1, k_max] of theorem2_bound_accumulated.
long k0_bound_minimizing(const BoundInputs& inputs, long k_max);

/**
 * The fading/noise error decomposition:
 *   distortion (T2), additive noise (T3), CV_h = sigma_h/mu_h, SNR = E_N/sigma_w^2.
 * In the strongly convex regime T2 + T3 = epsilon_N, the constant term of
 * theorem1_bound; in the convex regime they are the Theorem-2 noise terms.
 * snr is empty when sigma_w_sq = 0 (noise-free).
 */
struct DecompositionTerms {
    double distortion = 0.0;  // T2
    double noise = 0.0;       // T3
    double cv_h = 0.0;
    std::optional<double> snr;
    bool noise_free = false;
};

DecompositionTerms decomposition_terms(const BoundInputs& inputs, bool strongly_convex);

/// Minimal power scaling preserving convergence: N^{epsilon-2} for the
/// strongly convex regime, N^{-1-epsilon'} for the convex regime (constant 1).
double power_scaling_recommendation(int nodes, double epsilon, bool strongly_convex);

}  // namespace agma::theory
