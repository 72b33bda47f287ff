#include "agma/algorithms.hpp"

#include "agma/data.hpp"
#include "agma/theory.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>
#include <cstdlib>

using namespace agma;
using namespace agma::algorithms;

namespace {

channel::ChannelModel noiseless_unit_channel() {
    return channel::ChannelModel::constant(1.0, 0.0, 1.0);
}

AlgorithmConfig config_for(Algorithm algorithm, double beta, int iters,
                           std::uint64_t seed = 7) {
    AlgorithmConfig config;
    config.algorithm = algorithm;
    config.beta = beta;
    config.max_iters = iters;
    config.seed = seed;
    return config;
}

}  // namespace

TEST_CASE("one exact step on the 1-d unit quadratic") {
    // F = 0.5 theta^2 via a single sample X = [1], y = 0; L = 1. With beta = 1
    // the first step lands exactly on the optimum: z0 = 1, v0 = 1, theta1 = 0.
    problems::ProblemInstance problem;
    problem.family = problems::LossFamily::LeastSquares;
    problem.dimension = 1;
    problem.nodes.push_back({Matrix::Ones(1, 1), Vector::Zero(1)});
    problem.constants = problems::compute_constants(problem);

    auto config = config_for(Algorithm::Agma, 1.0, 1);
    config.theta0 = Vector::Ones(1);
    auto trace = run(config, problem, noiseless_unit_channel());
    REQUIRE(trace.records.size() == 2);
    CHECK(trace.records[0].excess_risk == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(trace.records[1].excess_risk == 0.0);
}

TEST_CASE("gbma over the degenerate channel is plain gradient descent") {
    auto problem = data::synthesize_quadratic(6, 50.0, 6, 8, 11);
    const double beta = 1.0 / problem.constants->lipschitz;
    auto trace = run(config_for(Algorithm::Gbma, beta, 40), problem, noiseless_unit_channel());

    Vector theta = Vector::Zero(6);
    for (std::size_t i = 0; i < trace.records.size(); ++i) {
        double expected = problems::global_objective(problem, theta);
        CHECK(testing::relative_error(trace.records[i].excess_risk, expected) <= 1e-12);
        theta -= beta * problems::global_gradient(problem, theta);
    }
}

TEST_CASE("agma over the degenerate channel reproduces central Nesterov") {
    auto problem = data::synthesize_quadratic(10, 100.0, 10, 12, 13);
    const double beta = 1.0 / problem.constants->lipschitz;
    auto agma_trace =
        run(config_for(Algorithm::Agma, beta, 100), problem, noiseless_unit_channel());
    auto reference =
        run(config_for(Algorithm::CentralNesterov, beta, 100), problem, noiseless_unit_channel());
    for (std::size_t i = 0; i < agma_trace.records.size(); ++i) {
        CHECK(testing::relative_error(agma_trace.records[i].excess_risk,
                                      reference.records[i].excess_risk) <= 1e-12);
    }
}

TEST_CASE("max_iters = 0 leaves only the k = 0 record") {
    auto problem = data::synthesize_quadratic(4, 10.0, 4, 4, 15);
    auto trace = run(config_for(Algorithm::Agma, 0.5, 0), problem, noiseless_unit_channel());
    REQUIRE(trace.records.size() == 1);
    CHECK(trace.records[0].k == 0);
    CHECK(trace.records[0].excess_risk ==
          doctest::Approx(problems::global_objective(problem, Vector::Zero(4))).epsilon(1e-14));
}

TEST_CASE("identical seeds reproduce identical traces") {
    auto problem = data::synthesize_quadratic(5, 20.0, 5, 10, 16);
    auto model = channel::ChannelModel::rayleigh(1.0, 1.0, 1.0);
    auto config = config_for(Algorithm::Agma, 1.0 / problem.constants->lipschitz, 30, 99);
    auto a = run(config, problem, model);
    auto b = run(config, problem, model);
    REQUIRE(a.records.size() == b.records.size());
    for (std::size_t i = 0; i < a.records.size(); ++i) {
        // Deterministic content; wall clock readings legitimately differ.
        CHECK(a.records[i].excess_risk == b.records[i].excess_risk);
        CHECK(a.records[i].distance == b.records[i].distance);
    }
}

TEST_CASE("noiseless excess risk obeys the theorem1 transient at k = 50") {
    auto problem = data::synthesize_quadratic(8, 64.0, 8, 6, 17);
    const double beta = 1.0 / problem.constants->lipschitz;
    auto trace = run(config_for(Algorithm::Agma, beta, 50), problem, noiseless_unit_channel());

    auto inputs = theory::make_bound_inputs(
        problem, noiseless_unit_channel(), beta,
        momentum::default_alpha0(problem.constants->strong_convexity,
                                 problem.constants->lipschitz));
    CHECK(trace.records[50].excess_risk <= theory::theorem1_bound(inputs, 50));
}

TEST_CASE("restart at k0 = 1 continues as GBMA restarted from theta_1") {
    auto problem = data::synthesize_quadratic(6, 30.0, 6, 9, 18);
    auto model = channel::ChannelModel::rayleigh(1.0, 0.5, 1.0);
    const double beta = 1.0 / problem.constants->lipschitz;

    auto config = config_for(Algorithm::Agma, beta, 25, 400);
    config.restart_k0 = 1;
    auto restarted = run(config, problem, model);

    // Oracle: replay the same realization stream by hand; after theta_1 every
    // update must be a plain distorted-gradient step.
    RngStream rng(400);
    Vector theta = Vector::Zero(6);
    for (int k = 0; k <= 24; ++k) {
        std::vector<Vector> grads;
        for (int n = 0; n < problem.node_count(); ++n)
            grads.push_back(problems::local_gradient(problem, n, theta));
        auto realization =
            channel::sample_realization(model, problem.node_count(), problem.dimension, rng);
        theta = theta - beta * channel::mac_aggregate(grads, realization);
        double excess = problems::global_objective(problem, theta) - problem.constants->f_star;
        CHECK(restarted.records[static_cast<std::size_t>(k) + 1].excess_risk ==
              doctest::Approx(excess).epsilon(1e-14));
    }
}

TEST_CASE("monte_carlo basics") {
    auto problem = data::synthesize_quadratic(5, 10.0, 5, 6, 19);
    const double beta = 1.0 / problem.constants->lipschitz;

    SUBCASE("a single replication equals the single run") {
        auto model = channel::ChannelModel::rayleigh(1.0, 1.0, 1.0);
        auto config = config_for(Algorithm::Agma, beta, 20, 555);
        auto mean = monte_carlo(config, problem, model, 1);
        auto single = run(config, problem, model);
        for (std::size_t i = 0; i < mean.mean_excess.size(); ++i) {
            CHECK(mean.mean_excess[i] == single.records[i].excess_risk);
            CHECK(mean.ci_halfwidth[i] == 0.0);
        }
    }

    SUBCASE("noiseless replications have zero-width intervals") {
        auto config = config_for(Algorithm::Agma, beta, 15, 556);
        auto mean = monte_carlo(config, problem, noiseless_unit_channel(), 8);
        for (double width : mean.ci_halfwidth) CHECK(width == 0.0);
    }

    SUBCASE("disjoint replication halves agree within their intervals") {
        auto model = channel::ChannelModel::rayleigh(1.0, 1.0, 1.0);
        auto first = config_for(Algorithm::Agma, beta, 25, 1000);
        auto second = config_for(Algorithm::Agma, beta, 25, 1100);
        auto half_a = monte_carlo(first, problem, model, 100);
        auto half_b = monte_carlo(second, problem, model, 100);
        for (std::size_t i = 0; i < half_a.mean_excess.size(); ++i) {
            double gap = std::abs(half_a.mean_excess[i] - half_b.mean_excess[i]);
            CHECK(gap <= half_a.ci_halfwidth[i] + half_b.ci_halfwidth[i] + 1e-12);
        }
    }
}

TEST_CASE("monte_carlo merge order is independent of the worker count") {
    auto problem = data::synthesize_quadratic(4, 10.0, 4, 5, 20);
    auto model = channel::ChannelModel::rayleigh(1.0, 1.0, 1.0);
    auto config = config_for(Algorithm::Agma, 1.0 / problem.constants->lipschitz, 10, 31);

    setenv("AGMA_WORKERS", "1", 1);
    auto serial = monte_carlo(config, problem, model, 16);
    setenv("AGMA_WORKERS", "7", 1);
    auto parallel = monte_carlo(config, problem, model, 16);
    unsetenv("AGMA_WORKERS");
    for (std::size_t i = 0; i < serial.mean_excess.size(); ++i) {
        CHECK(serial.mean_excess[i] == parallel.mean_excess[i]);
        CHECK(serial.ci_halfwidth[i] == parallel.ci_halfwidth[i]);
    }
}

TEST_CASE("stepsize validation and forced divergence") {
    auto problem = data::synthesize_quadratic(5, 25.0, 5, 6, 21);
    const double limit = 2.0 / problem.constants->lipschitz;

    auto config = config_for(Algorithm::Gbma, 1.05 * limit, 10);
    CHECK_THROWS_WITH_AS(run(config, problem, noiseless_unit_channel()),
                         doctest::Contains("convergence range"), ValidationError);

    config.force_stepsize = true;
    auto trace = run(config, problem, noiseless_unit_channel());
    CHECK(trace.records.back().excess_risk >= trace.records.front().excess_risk);

    // A grossly oversized forced step drives the iterate non-finite.
    config.beta = 1e160;
    CHECK_THROWS_AS(run(config, problem, noiseless_unit_channel()), DivergenceError);
}

TEST_CASE("momentum on a problem without constants needs an explicit alpha0") {
    problems::ProblemInstance problem;
    problem.family = problems::LossFamily::LogLoss;
    problem.dimension = 2;
    RngStream rng(22);
    for (int n = 0; n < 3; ++n) {
        Matrix x(2, 2);
        Vector y(2);
        for (int i = 0; i < 2; ++i) {
            y[i] = rng.gaussian();
            for (int j = 0; j < 2; ++j) x(i, j) = rng.gaussian();
        }
        problem.nodes.push_back({x, y});
    }

    auto config = config_for(Algorithm::Agma, 0.1, 5);
    CHECK_THROWS_AS(run(config, problem, noiseless_unit_channel()), ValidationError);
    config.alpha0 = 0.5;
    auto trace = run(config, problem, noiseless_unit_channel());
    CHECK(trace.records.size() == 6);
    // Without F*, the excess column reports the raw objective.
    CHECK(trace.records[0].excess_risk ==
          doctest::Approx(problems::global_objective(problem, Vector::Zero(2))));
}

TEST_CASE("monte_carlo reports the failing replication") {
    auto problem = data::synthesize_quadratic(4, 10.0, 4, 5, 26);
    auto config = config_for(Algorithm::Gbma, 1e160, 30);
    config.force_stepsize = true;
    CHECK_THROWS_WITH_AS(monte_carlo(config, problem, noiseless_unit_channel(), 3),
                         doctest::Contains("replication"), ValidationError);
}

TEST_CASE("agma converges on a strongly convex logistic instance") {
    auto problem = data::synthesize_logistic(4, 3.0, 0.1, 20, 4, 27);
    auto model = channel::ChannelModel::rayleigh(1.0, 0.1, 1.0);
    auto config = config_for(Algorithm::Agma,
                             1.0 / (model.mu_h() * problem.constants->lipschitz), 80, 28);
    auto trace = run(config, problem, model);
    CHECK(trace.records.back().excess_risk < 0.05 * trace.records.front().excess_risk);
    CHECK(trace.records.back().excess_risk >= 0.0);
}

TEST_CASE("fdm variants run and average away the fading") {
    auto problem = data::synthesize_quadratic(5, 10.0, 5, 40, 23);
    auto model = channel::ChannelModel::rayleigh(1.0, 0.2, 1.0);
    const double beta = 1.0 / problem.constants->lipschitz;

    auto gd = run(config_for(Algorithm::FdmGd, beta, 30, 91), problem, model);
    auto agd = run(config_for(Algorithm::FdmAgd, beta, 30, 91), problem, model);
    CHECK(gd.records.back().excess_risk < gd.records.front().excess_risk);
    CHECK(agd.records.back().excess_risk < agd.records.front().excess_risk);
    // Momentum should not be slower on a well-conditioned noiseless-mean path.
    CHECK(agd.records.back().excess_risk < 10.0 * gd.records.back().excess_risk);
}

TEST_CASE("agma_step advances the iterate state") {
    auto problem = data::synthesize_quadratic(4, 10.0, 4, 5, 24);
    auto model = noiseless_unit_channel();
    const double lipschitz = problem.constants->lipschitz;
    auto schedule = momentum::MomentumSchedule::strongly_convex(
        momentum::default_alpha0(problem.constants->strong_convexity, lipschitz),
        problem.constants->strong_convexity, lipschitz, lipschitz);
    schedule.extend(2);

    RngStream rng(25);
    auto state = IterateState::initial(Vector::Zero(4));
    auto next = agma_step(state, schedule, model, problem, 1.0 / lipschitz, std::nullopt, rng);
    CHECK(next.k == 1);
    Vector expected_theta =
        -1.0 / lipschitz * problems::global_gradient(problem, Vector::Zero(4));
    CHECK((next.theta_curr - expected_theta).norm() <= 1e-14);
    Vector expected_z =
        next.theta_curr + schedule.eta(0) * (next.theta_curr - next.theta_prev);
    CHECK((next.z - expected_z).norm() <= 1e-14);
}
