#include "agma/theory.hpp"

#include "agma/momentum.hpp"

#include <cmath>
#include <limits>

namespace agma::theory {

void BoundInputs::validate() const {
    if (lipschitz <= 0.0) throw ValidationError("bound inputs: L must be > 0");
    if (mu < 0.0) throw ValidationError("bound inputs: mu must be >= 0");
    if (mu > lipschitz + 1e-12 * lipschitz)
        throw ValidationError("bound inputs: mu must not exceed L");
    if (mu_h <= 0.0) throw ValidationError("bound inputs: mu_h must be > 0");
    if (sigma_h_sq < 0.0 || sigma_w_sq < 0.0)
        throw ValidationError("bound inputs: variances must be >= 0");
    if (gradient_power < 0.0) throw ValidationError("bound inputs: G must be >= 0");
    if (dimension < 1) throw ValidationError("bound inputs: dimension must be >= 1");
    if (nodes < 1) throw ValidationError("bound inputs: N must be >= 1");
    if (energy <= 0.0) throw ValidationError("bound inputs: E_N must be > 0");
    if (!(alpha0 > 0.0) || !(alpha0 < 1.0))
        throw ValidationError("bound inputs: alpha0 must be in (0, 1)");
    if (f0_gap < 0.0 || dist0_sq < 0.0)
        throw ValidationError("bound inputs: initial gaps must be >= 0");
    if (!(epsilon > 0.0) || !(epsilon < 1.0))
        throw ValidationError("bound inputs: epsilon must be in (0, 1)");
    momentum::l_beta_tilde(beta, mu_h, lipschitz);  // throws when beta out of range
}

double BoundInputs::l_tilde() const { return momentum::l_beta_tilde(beta, mu_h, lipschitz); }

BoundInputs make_bound_inputs(const problems::ProblemInstance& problem,
                              const channel::ChannelModel& channel_model, double beta,
                              double alpha0, double epsilon, const Vector* theta0) {
    if (!problem.constants)
        throw ValidationError("bound inputs need a problem with computed constants");
    const auto& constants = *problem.constants;

    BoundInputs inputs;
    inputs.lipschitz = constants.lipschitz;
    inputs.mu = constants.strong_convexity;
    inputs.mu_h = channel_model.mu_h();
    inputs.sigma_h_sq = channel_model.sigma_h_sq();
    inputs.sigma_w_sq = channel_model.sigma_w_sq();
    inputs.gradient_power = constants.gradient_power;
    inputs.dimension = problem.dimension;
    inputs.nodes = problem.node_count();
    inputs.energy = channel_model.energy();
    inputs.beta = beta;
    inputs.alpha0 = alpha0;
    inputs.epsilon = epsilon;

    Vector start = theta0 ? *theta0 : Vector::Zero(problem.dimension);
    inputs.f0_gap = problems::global_objective(problem, start) - constants.f_star;
    inputs.dist0_sq = (start - constants.theta_star).squaredNorm();
    // The gap is nonnegative in exact arithmetic; clamp solver roundoff.
    inputs.f0_gap = std::max(inputs.f0_gap, 0.0);
    inputs.validate();
    return inputs;
}

double delta_n(const BoundInputs& inputs) {
    const double N = static_cast<double>(inputs.nodes);
    return inputs.beta / inputs.mu_h *
           (inputs.sigma_h_sq * inputs.gradient_power / N +
            static_cast<double>(inputs.dimension) * inputs.sigma_w_sq / (inputs.energy * N * N));
}

long k0_cap(const BoundInputs& inputs) {
    return static_cast<long>(
        std::floor(std::pow(static_cast<double>(inputs.nodes), 1.0 - inputs.epsilon)));
}

double theorem1_bound(const BoundInputs& inputs, long k) {
    inputs.validate();
    if (k < 0) throw ValidationError("bound iteration k must be >= 0");
    if (inputs.mu <= 0.0)
        throw ValidationError("theorem1_bound needs mu > 0; use theorem2_bound");

    const double l_tilde = inputs.l_tilde();
    const double gamma0 =
        inputs.alpha0 * (inputs.alpha0 * inputs.lipschitz - inputs.mu) / (1.0 - inputs.alpha0);
    // mu = L_tilde is an admissible limit; keep roundoff from turning the
    // decay factor negative.
    const double rate = std::max(0.0, 1.0 - std::sqrt(inputs.mu / l_tilde));
    const double divergence = inputs.f0_gap + 0.5 * gamma0 * inputs.dist0_sq;
    const double epsilon_n = std::sqrt(l_tilde / inputs.mu) * delta_n(inputs);
    return std::pow(rate, static_cast<double>(k)) * divergence + epsilon_n;
}

namespace {

double theorem2_transient(const BoundInputs& inputs, long k) {
    const double l_tilde = inputs.l_tilde();
    const double gamma0 =
        inputs.alpha0 * inputs.alpha0 * inputs.lipschitz / (1.0 - inputs.alpha0);
    const double divergence = inputs.f0_gap + 0.5 * gamma0 * inputs.dist0_sq;
    const double denom = 2.0 * std::sqrt(l_tilde) + static_cast<double>(k) * std::sqrt(gamma0);
    return 4.0 * l_tilde / (denom * denom) * divergence;
}

}  // namespace

double theorem2_bound(const BoundInputs& inputs, long k) {
    inputs.validate();
    if (k < 0) throw ValidationError("bound iteration k must be >= 0");
    if (k > k0_cap(inputs))
        throw ValidationError("theorem2_bound not valid beyond k0 = floor(N^(1-epsilon))");

    const double N = static_cast<double>(inputs.nodes);
    const double noise =
        inputs.beta / inputs.mu_h *
        (inputs.sigma_h_sq * inputs.gradient_power / std::pow(N, inputs.epsilon) +
         static_cast<double>(inputs.dimension) * inputs.sigma_w_sq /
             (inputs.energy * std::pow(N, 1.0 + inputs.epsilon)));
    return theorem2_transient(inputs, k) + noise;
}

double theorem2_bound_accumulated(const BoundInputs& inputs, long k) {
    inputs.validate();
    if (k < 0) throw ValidationError("bound iteration k must be >= 0");
    return theorem2_transient(inputs, k) + static_cast<double>(k) * delta_n(inputs);
}

long k0_bound_minimizing(const BoundInputs& inputs, long k_max) {
    if (k_max < 1) throw ValidationError("k0 search needs k_max >= 1");
    long best_k = 1;
    double best = std::numeric_limits<double>::infinity();
    for (long k = 1; k <= k_max; ++k) {
        double value = theorem2_bound_accumulated(inputs, k);
        if (value < best) {
            best = value;
            best_k = k;
        }
    }
    return best_k;
}

DecompositionTerms decomposition_terms(const BoundInputs& inputs, bool strongly_convex) {
    inputs.validate();
    const double N = static_cast<double>(inputs.nodes);
    DecompositionTerms terms;
    terms.cv_h = std::sqrt(inputs.sigma_h_sq) / inputs.mu_h;
    terms.noise_free = inputs.sigma_w_sq == 0.0;
    if (!terms.noise_free) terms.snr = inputs.energy / inputs.sigma_w_sq;

    const double base = inputs.beta / inputs.mu_h;
    if (strongly_convex) {
        if (inputs.mu <= 0.0)
            throw ValidationError("strongly convex decomposition needs mu > 0");
        const double amplifier = std::sqrt(inputs.l_tilde() / inputs.mu);
        terms.distortion = amplifier * base * inputs.sigma_h_sq * inputs.gradient_power / N;
        terms.noise = amplifier * base * static_cast<double>(inputs.dimension) *
                      inputs.sigma_w_sq / (inputs.energy * N * N);
    } else {
        terms.distortion =
            base * inputs.sigma_h_sq * inputs.gradient_power / std::pow(N, inputs.epsilon);
        terms.noise = base * static_cast<double>(inputs.dimension) * inputs.sigma_w_sq /
                      (inputs.energy * std::pow(N, 1.0 + inputs.epsilon));
    }
    return terms;
}

double power_scaling_recommendation(int nodes, double epsilon, bool strongly_convex) {
    if (nodes < 1) throw ValidationError("power scaling needs N >= 1");
    const double N = static_cast<double>(nodes);
    return strongly_convex ? std::pow(N, epsilon - 2.0) : std::pow(N, -1.0 - epsilon);
}

}  // namespace agma::theory
