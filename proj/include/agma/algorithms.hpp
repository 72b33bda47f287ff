#pragma once

#include "agma/channel.hpp"
#include "agma/momentum.hpp"
#include "agma/problems.hpp"
#include "agma/rng.hpp"
#include "agma/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace agma::algorithms {

enum class Algorithm {
    Agma,             // momentum gradient over the fading MAC
    Gbma,             // plain gradient over the fading MAC (eta = 0)
    FdmGd,            // plain gradient, orthogonal channels
    FdmAgd,           // momentum gradient, orthogonal channels
    CentralNesterov,  // noiseless distortion-free momentum reference
};

std::string to_string(Algorithm algorithm);
Algorithm algorithm_from_string(const std::string& name);

struct AlgorithmConfig {
    Algorithm algorithm = Algorithm::Agma;
    double beta = 0.0;
    std::optional<double> alpha0;     // default: regime-dependent
    int max_iters = 100;
    std::optional<long> restart_k0;   // momentum disabled from iteration k0 on
    std::uint64_t seed = 0;
    bool force_stepsize = false;      // run even when beta is out of range
    std::optional<double> stop_tolerance;  // optional early stop on excess risk
    Vector theta0;                    // empty = zero vector

    void validate() const;
};

/// theta_k, theta_{k-1}, and the extrapolated z_k.
struct IterateState {
    Vector theta_curr;
    Vector theta_prev;
    Vector z;
    long k = 0;

    static IterateState initial(const Vector& theta0) {
        return IterateState{theta0, theta0, theta0, 0};
    }
};

struct TraceRecord {
    long k = 0;
    double excess_risk = 0.0;
    double distance = 0.0;  // ||theta_k - theta*||; NaN when theta* unknown
    double wall_seconds = 0.0;
};

struct RunTrace {
    std::vector<TraceRecord> records;
    AlgorithmConfig config;    // the configuration that produced this trace
    std::uint64_t seed = 0;
    double alpha0_used = 0.0;  // resolved value; 0 for momentum-free algorithms
};

/**
 * One AGMA iteration: local gradients at z_k, superposition over the MAC
 * into v_k, model update theta_{k+1} = z_k - beta v_k, then the momentum
 * advance z_{k+1} = theta_{k+1} + eta_k (theta_{k+1} - theta_k).
 *
 * With restart_k0 set, the extrapolation of z_j uses eta = 0 for every
 * j >= k0, so iterates from k0 onward evolve by plain distorted gradient
 * descent. Throws DivergenceError when an iterate turns non-finite.
 */
IterateState agma_step(const IterateState& state, const momentum::MomentumSchedule& schedule,
                       const channel::ChannelModel& channel_model,
                       const problems::ProblemInstance& problem, double beta,
                       std::optional<long> restart_k0, RngStream& rng);

/**
 * Runs the configured algorithm for max_iters iterations from theta_0
 * (default: zero vector), recording excess risk F(theta_k) - F* at every k
 * including k = 0. Deterministic given the seed.
 *
 * Momentum algorithms need problem constants for the schedule; on a problem
 * without constants (non-convex log-loss) they run with the convex recursion
 * (q = 0) and require an explicit alpha0, and excess risk is reported
 * against F* = 0.
 */
RunTrace run(const AlgorithmConfig& config, const problems::ProblemInstance& problem,
             const channel::ChannelModel& channel_model);

/// Per-iteration mean excess risk with 95% normal-approximation confidence
/// half-widths over independent replications (replication i uses seed + i).
struct MeanTrace {
    std::vector<long> iterations;
    std::vector<double> mean_excess;
    std::vector<double> ci_halfwidth;
    int replications = 0;
    std::uint64_t base_seed = 0;
};

/// Replications run in a worker pool sized by the AGMA_WORKERS environment
/// variable (default: hardware concurrency); results are merged in
/// replication order, so the output is independent of the worker count.
MeanTrace monte_carlo(const AlgorithmConfig& config, const problems::ProblemInstance& problem,
                      const channel::ChannelModel& channel_model, int replications);

}  // namespace agma::algorithms
