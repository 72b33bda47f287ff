#include "agma/algorithms.hpp"

#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

namespace agma::algorithms {

namespace {

bool uses_momentum(Algorithm algorithm) {
    return algorithm == Algorithm::Agma || algorithm == Algorithm::FdmAgd ||
           algorithm == Algorithm::CentralNesterov;
}

bool uses_mac(Algorithm algorithm) {
    return algorithm == Algorithm::Agma || algorithm == Algorithm::Gbma;
}

bool uses_fdm(Algorithm algorithm) {
    return algorithm == Algorithm::FdmGd || algorithm == Algorithm::FdmAgd;
}

// The FDM and centralized baselines see an undistorted mean channel, so
// their effective gain mean is 1 wherever mu_h enters the schedule.
double effective_mu_h(Algorithm algorithm, const channel::ChannelModel& channel_model) {
    return uses_mac(algorithm) ? channel_model.mu_h() : 1.0;
}

std::vector<Vector> gather_local_gradients(const problems::ProblemInstance& problem,
                                           const Vector& z) {
    std::vector<Vector> grads;
    grads.reserve(static_cast<std::size_t>(problem.node_count()));
    for (int n = 0; n < problem.node_count(); ++n)
        grads.push_back(problems::local_gradient(problem, n, z));
    return grads;
}

}  // namespace

std::string to_string(Algorithm algorithm) {
    switch (algorithm) {
        case Algorithm::Agma: return "agma";
        case Algorithm::Gbma: return "gbma";
        case Algorithm::FdmGd: return "fdm_gd";
        case Algorithm::FdmAgd: return "fdm_agd";
        case Algorithm::CentralNesterov: return "central_nesterov";
    }
    return "unknown";
}

Algorithm algorithm_from_string(const std::string& name) {
    if (name == "agma") return Algorithm::Agma;
    if (name == "gbma") return Algorithm::Gbma;
    if (name == "fdm_gd") return Algorithm::FdmGd;
    if (name == "fdm_agd") return Algorithm::FdmAgd;
    if (name == "central_nesterov") return Algorithm::CentralNesterov;
    throw ValidationError("unknown algorithm: " + name);
}

void AlgorithmConfig::validate() const {
    if (max_iters < 0) throw ValidationError("max_iters must be >= 0");
    if (!(beta > 0.0)) throw ValidationError("stepsize beta must be > 0");
    if (alpha0 && (!(*alpha0 > 0.0) || !(*alpha0 < 1.0)))
        throw ValidationError("alpha0 must be in (0, 1)");
    if (restart_k0 && *restart_k0 < 1) throw ValidationError("restart_k0 must be >= 1");
    if (stop_tolerance && !(*stop_tolerance > 0.0))
        throw ValidationError("stop_tolerance must be > 0");
}

namespace {

struct LoopPlan {
    bool momentum = false;
    std::optional<momentum::MomentumSchedule> schedule;
    double alpha0_used = 0.0;
};

LoopPlan plan_loop(const AlgorithmConfig& config, const problems::ProblemInstance& problem,
                   const channel::ChannelModel& channel_model) {
    LoopPlan plan;
    plan.momentum = uses_momentum(config.algorithm);

    const double mu_h = effective_mu_h(config.algorithm, channel_model);
    const bool have_constants = problem.constants.has_value();

    if (have_constants && !config.force_stepsize) {
        double limit = momentum::stepsize_upper_limit(mu_h, problem.constants->lipschitz);
        if (!(config.beta < limit)) {
            std::ostringstream msg;
            msg << "stepsize out of convergence range: beta=" << config.beta << " not in (0, "
                << limit << ")";
            throw ValidationError(msg.str());
        }
    }

    if (!plan.momentum) return plan;

    if (have_constants) {
        const double lipschitz = problem.constants->lipschitz;
        const double mu = problem.constants->strong_convexity;
        double l_tilde;
        try {
            l_tilde = momentum::l_beta_tilde(config.beta, mu_h, lipschitz);
        } catch (const ValidationError&) {
            if (!config.force_stepsize) throw;
            // Forced out-of-range run: L_tilde is undefined, fall back to the
            // schedule of the optimal in-range stepsize (q = mu/L).
            l_tilde = lipschitz;
        }
        const double q = mu / l_tilde;
        if (q >= 1.0 - 1e-12) {
            // mu = L_tilde: the control sequence collapses to alpha = 1 and
            // eta = 0, i.e. plain gradient descent.
            plan.momentum = false;
            return plan;
        }
        // Default alpha0 is the midpoint of the theorem's (sqrt(mu/L), 1)
        // interval; when mu = L that interval is empty and (sqrt(q), 1) is
        // the widest admissible one.
        double fallback = mu < lipschitz * (1.0 - 1e-12)
                              ? momentum::default_alpha0(mu, lipschitz)
                              : 0.5 * (std::sqrt(q) + 1.0);
        double alpha0 = config.alpha0.value_or(fallback);
        plan.alpha0_used = alpha0;
        double g0 = alpha0 * (alpha0 * lipschitz - mu) / (1.0 - alpha0);
        plan.schedule = momentum::MomentumSchedule(alpha0, q, g0, mu);
    } else {
        if (!config.alpha0)
            throw ValidationError(
                "momentum on a problem without constants needs an explicit alpha0");
        plan.alpha0_used = *config.alpha0;
        // Non-convex / unknown constants: convex recursion, gamma_0 moot.
        plan.schedule = momentum::MomentumSchedule(*config.alpha0, 0.0, 1.0, 0.0);
    }
    plan.schedule->extend(config.max_iters + 1);
    return plan;
}

Vector aggregate_gradient(Algorithm algorithm, const problems::ProblemInstance& problem,
                          const channel::ChannelModel& channel_model, const Vector& z,
                          RngStream& rng) {
    if (algorithm == Algorithm::CentralNesterov) return problems::global_gradient(problem, z);
    auto grads = gather_local_gradients(problem, z);
    if (uses_fdm(algorithm)) return channel::fdm_aggregate(grads, channel_model, rng);
    auto realization =
        channel::sample_realization(channel_model, problem.node_count(), problem.dimension, rng);
    return channel::mac_aggregate(grads, realization);
}

IterateState advance(const IterateState& state, Algorithm algorithm,
                     const momentum::MomentumSchedule* schedule,
                     const problems::ProblemInstance& problem,
                     const channel::ChannelModel& channel_model, double beta,
                     std::optional<long> restart_k0, RngStream& rng) {
    Vector v = aggregate_gradient(algorithm, problem, channel_model, state.z, rng);
    Vector theta_next = state.z - beta * v;
    if (!all_finite(theta_next)) {
        std::ostringstream msg;
        msg << "iterate diverged to non-finite values at iteration " << state.k;
        throw DivergenceError(msg.str(), static_cast<int>(state.k));
    }

    IterateState next;
    next.k = state.k + 1;
    next.theta_prev = state.theta_curr;
    next.theta_curr = theta_next;

    double eta = 0.0;
    if (schedule != nullptr) {
        bool momentum_active = !restart_k0 || next.k < *restart_k0;
        if (momentum_active) eta = schedule->eta(state.k);
    }
    next.z = next.theta_curr + eta * (next.theta_curr - next.theta_prev);
    return next;
}

}  // namespace

IterateState agma_step(const IterateState& state, const momentum::MomentumSchedule& schedule,
                       const channel::ChannelModel& channel_model,
                       const problems::ProblemInstance& problem, double beta,
                       std::optional<long> restart_k0, RngStream& rng) {
    return advance(state, Algorithm::Agma, &schedule, problem, channel_model, beta, restart_k0,
                   rng);
}

RunTrace run(const AlgorithmConfig& config, const problems::ProblemInstance& problem,
             const channel::ChannelModel& channel_model) {
    config.validate();
    problem.validate();

    LoopPlan plan = plan_loop(config, problem, channel_model);
    const double f_star = problem.constants ? problem.constants->f_star : 0.0;
    const bool have_star = problem.constants.has_value();

    Vector theta0 = config.theta0.size() > 0 ? config.theta0 : Vector::Zero(problem.dimension);
    if (theta0.size() != problem.dimension)
        throw ValidationError("theta0 dimension does not match the problem");

    RngStream rng(config.seed);
    auto start_time = std::chrono::steady_clock::now();
    auto elapsed = [&start_time] {
        return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time)
            .count();
    };

    RunTrace trace;
    trace.config = config;
    trace.seed = config.seed;
    trace.alpha0_used = plan.alpha0_used;
    trace.records.reserve(static_cast<std::size_t>(config.max_iters) + 1);

    auto record = [&](const Vector& theta, long k) {
        TraceRecord rec;
        rec.k = k;
        rec.excess_risk = problems::global_objective(problem, theta) - f_star;
        rec.distance = have_star ? (theta - problem.constants->theta_star).norm()
                                 : std::numeric_limits<double>::quiet_NaN();
        rec.wall_seconds = elapsed();
        trace.records.push_back(rec);
        return rec.excess_risk;
    };

    IterateState state = IterateState::initial(theta0);
    double excess = record(state.theta_curr, 0);
    for (int k = 0; k < config.max_iters; ++k) {
        if (config.stop_tolerance && excess < *config.stop_tolerance) break;
        state = advance(state, config.algorithm,
                        plan.schedule ? &*plan.schedule : nullptr, problem, channel_model,
                        config.beta, config.restart_k0, rng);
        excess = record(state.theta_curr, state.k);
    }
    return trace;
}

MeanTrace monte_carlo(const AlgorithmConfig& config, const problems::ProblemInstance& problem,
                      const channel::ChannelModel& channel_model, int replications) {
    if (replications < 1) throw ValidationError("monte_carlo needs replications >= 1");
    if (config.stop_tolerance)
        throw ValidationError("monte_carlo needs fixed-length runs; unset stop_tolerance");

    std::vector<RunTrace> traces(static_cast<std::size_t>(replications));
    std::vector<std::exception_ptr> failures(static_cast<std::size_t>(replications));

    int workers = 1;
    if (const char* env = std::getenv("AGMA_WORKERS")) {
        workers = std::max(1, std::atoi(env));
    } else {
        workers = std::max(1u, std::thread::hardware_concurrency());
    }
    workers = std::min<int>({workers, replications, 16});

    std::atomic<int> next{0};
    auto worker = [&] {
        for (int i = next.fetch_add(1); i < replications; i = next.fetch_add(1)) {
            try {
                AlgorithmConfig rep_config = config;
                rep_config.seed = config.seed + static_cast<std::uint64_t>(i);
                traces[static_cast<std::size_t>(i)] = run(rep_config, problem, channel_model);
            } catch (...) {
                failures[static_cast<std::size_t>(i)] = std::current_exception();
            }
        }
    };

    if (workers == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
        for (auto& thread : pool) thread.join();
    }

    for (int i = 0; i < replications; ++i) {
        if (failures[static_cast<std::size_t>(i)]) {
            try {
                std::rethrow_exception(failures[static_cast<std::size_t>(i)]);
            } catch (const std::exception& e) {
                std::ostringstream msg;
                msg << "replication " << i << " failed: " << e.what();
                throw ValidationError(msg.str());
            }
        }
    }

    const std::size_t length = traces.front().records.size();
    MeanTrace mean_trace;
    mean_trace.replications = replications;
    mean_trace.base_seed = config.seed;
    mean_trace.iterations.reserve(length);
    mean_trace.mean_excess.reserve(length);
    mean_trace.ci_halfwidth.reserve(length);

    const double R = static_cast<double>(replications);
    for (std::size_t j = 0; j < length; ++j) {
        double sum = 0.0;
        bool all_equal = true;
        const double first = traces.front().records[j].excess_risk;
        for (const auto& trace : traces) {
            sum += trace.records[j].excess_risk;
            all_equal = all_equal && trace.records[j].excess_risk == first;
        }
        double mean = sum / R;
        double half_width = 0.0;
        // Identical replications (noiseless channels) get an exact zero width
        // instead of the ulp noise a two-pass variance would produce.
        if (replications > 1 && !all_equal) {
            double sq = 0.0;
            for (const auto& trace : traces) {
                double diff = trace.records[j].excess_risk - mean;
                sq += diff * diff;
            }
            double std_error = std::sqrt(sq / (R - 1.0) / R);
            half_width = 1.959963984540054 * std_error;
        }
        if (all_equal) mean = first;
        mean_trace.iterations.push_back(traces.front().records[j].k);
        mean_trace.mean_excess.push_back(mean);
        mean_trace.ci_halfwidth.push_back(half_width);
    }
    return mean_trace;
}

}  // namespace agma::algorithms
