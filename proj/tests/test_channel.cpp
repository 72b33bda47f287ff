#include "agma/channel.hpp"

#include "agma/data.hpp"
#include "test_util.hpp"

#include <doctest.h>

#include <cmath>

using namespace agma;
using namespace agma::channel;

TEST_CASE("constant gain with zero noise is a degenerate realization") {
    auto model = ChannelModel::constant(1.0, 0.0, 1.0);
    RngStream rng(1);
    auto realization = sample_realization(model, 5, 3, rng);
    for (Index n = 0; n < 5; ++n) CHECK(realization.gains[n] == 1.0);
    for (Index i = 0; i < 3; ++i) CHECK(realization.noise[i] == 0.0);
}

TEST_CASE("rayleigh gains match their configured mean over 1e6 samples") {
    auto model = ChannelModel::rayleigh(1.0, 0.0, 1.0);
    const int draws = 1000000;
    RngStream rng(2);
    double sum = 0.0;
    for (int i = 0; i < draws; ++i) sum += model.sample_gain(rng);
    double mean = sum / draws;
    double standard_error = std::sqrt(model.sigma_h_sq() / draws);
    CHECK(std::abs(mean - 1.0) <= 4.0 * standard_error);
}

TEST_CASE("receiver noise variance scales as sigma_w^2/(N^2 E_N)") {
    auto model = ChannelModel::constant(1.0, 1.0, 1.0);  // sigma_w_sq = 1
    const int nodes = 10;
    const Index dim = 3;
    const int draws = 300000;
    RngStream rng(3);
    double sum_sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        auto realization = sample_realization(model, nodes, dim, rng);
        sum_sq += realization.noise.squaredNorm();
    }
    double per_coordinate = sum_sq / (static_cast<double>(draws) * dim);
    double expected = 1.0 / 100.0;
    // SE of a variance estimate is var * sqrt(2/n).
    double standard_error = expected * std::sqrt(2.0 / (static_cast<double>(draws) * dim));
    CHECK(std::abs(per_coordinate - expected) <= 5.0 * standard_error);
}

TEST_CASE("mac_aggregate with unit gains and no noise is the plain average") {
    Vector g(2);
    g << 1.0, -2.0;
    std::vector<Vector> grads{g, g, g};
    ChannelRealization realization{Vector::Ones(3), Vector::Zero(2)};
    Vector out = mac_aggregate(grads, realization);
    CHECK(out.isApprox(g, 1e-15));
}

TEST_CASE("mac_aggregate erases a zero-gain node") {
    Vector a(2), b(2);
    a << 3.0, 1.0;
    b << -5.0, 2.0;
    ChannelRealization realization{Vector(2), Vector::Zero(2)};
    realization.gains << 2.0, 0.0;
    Vector out = mac_aggregate({a, b}, realization);
    CHECK(out.isApprox(a, 1e-15));  // (1/2) * 2a = a
}

TEST_CASE("mac_aggregate matches a direct summation oracle") {
    RngStream rng(4);
    const int nodes = 7;
    const Index dim = 5;
    std::vector<Vector> grads;
    for (int n = 0; n < nodes; ++n) {
        Vector g(dim);
        for (Index i = 0; i < dim; ++i) g[i] = rng.gaussian();
        grads.push_back(g);
    }
    ChannelRealization realization;
    realization.gains.resize(nodes);
    realization.noise.resize(dim);
    for (int n = 0; n < nodes; ++n) realization.gains[n] = rng.uniform01();
    for (Index i = 0; i < dim; ++i) realization.noise[i] = rng.gaussian();

    Vector expected = realization.noise;
    for (int n = 0; n < nodes; ++n)
        expected += realization.gains[n] / static_cast<double>(nodes) * grads[static_cast<std::size_t>(n)];
    CHECK((mac_aggregate(grads, realization) - expected).norm() <= 1e-12);
}

TEST_CASE("fdm_aggregate with unit constant gains and no noise is the exact average") {
    auto model = ChannelModel::constant(1.0, 0.0, 1.0);
    RngStream rng(5);
    Vector a(2), b(2);
    a << 1.0, 5.0;
    b << 3.0, -1.0;
    Vector out = fdm_aggregate({a, b}, model, rng);
    CHECK(out.isApprox(0.5 * (a + b), 1e-15));
}

TEST_CASE("fdm_aggregate noise variance is sigma_w^2/(N E_N) per coordinate") {
    auto model = ChannelModel::constant(1.0, 1.0, 1.0);
    const int nodes = 100;
    const Index dim = 4;
    const int draws = 100000;
    std::vector<Vector> zeros(nodes, Vector::Zero(dim));
    RngStream rng(6);
    double sum_sq = 0.0;
    for (int i = 0; i < draws; ++i) sum_sq += fdm_aggregate(zeros, model, rng).squaredNorm();
    double per_coordinate = sum_sq / (static_cast<double>(draws) * dim);
    double expected = 1.0 / 100.0;
    double standard_error = expected * std::sqrt(2.0 / (static_cast<double>(draws) * dim));
    CHECK(std::abs(per_coordinate - expected) <= 5.0 * standard_error);
}

TEST_CASE("fdm and mac topologies coincide for a single node") {
    auto model = ChannelModel::rayleigh(1.0, 0.5, 2.0);
    Vector g(3);
    g << 1.0, 0.0, -1.0;
    const int draws = 200000;

    RngStream rng_fdm(7), rng_mac(8);
    double fdm_mean = 0.0, mac_mean = 0.0, fdm_sq = 0.0, mac_sq = 0.0;
    for (int i = 0; i < draws; ++i) {
        double f = fdm_aggregate({g}, model, rng_fdm)[0];
        auto realization = sample_realization(model, 1, 3, rng_mac);
        double m = mac_aggregate({g}, realization)[0];
        fdm_mean += f;
        mac_mean += m;
        fdm_sq += f * f;
        mac_sq += m * m;
    }
    fdm_mean /= draws;
    mac_mean /= draws;
    double fdm_var = fdm_sq / draws - fdm_mean * fdm_mean;
    double mac_var = mac_sq / draws - mac_mean * mac_mean;
    // Identical distributions: compare first and second moments loosely.
    CHECK(std::abs(fdm_mean - mac_mean) <= 0.02);
    CHECK(std::abs(fdm_var - mac_var) / mac_var <= 0.05);
}

TEST_CASE("moment identities hold within 5 standard errors") {
    auto problem = data::synthesize_quadratic(4, 10.0, 4, 12, 31);
    auto model = ChannelModel::uniform_from_moments(1.5, 0.5, 1.0, 1.0);
    Vector z = Vector::Zero(4);
    auto result = moment_check(model, problem, z, 100000, 32);
    CHECK(result.mean_error <= 5.0 * result.mean_standard_error);
    CHECK(result.second_moment_error <= 5.0 * result.second_moment_standard_error);
}

TEST_CASE("deterministic channel gives exact moments") {
    auto problem = data::synthesize_quadratic(4, 10.0, 4, 12, 31);
    auto model = ChannelModel::constant(0.7, 0.0, 1.0);
    Vector z = Vector::Constant(4, 0.5);
    auto result = moment_check(model, problem, z, 1000, 33);
    CHECK(result.mean_error <= 1e-13);
    CHECK(result.second_moment_error <= 1e-13);
}

TEST_CASE("aggregate mean at theta_star is noise-only") {
    auto problem = data::synthesize_quadratic(4, 10.0, 4, 12, 31);
    auto model = ChannelModel::uniform_from_moments(1.5, 0.5, 1.0, 1.0);
    auto result =
        moment_check(model, problem, problem.constants->theta_star, 50000, 34);
    // grad F(theta*) = 0, so the mean deviation is pure Monte Carlo noise.
    CHECK(result.mean_error <= 5.0 * result.mean_standard_error);
}

TEST_CASE("identical seeds give bit-identical realizations") {
    auto model = ChannelModel::rayleigh(1.0, 1.0, 1.0);
    RngStream a(42), b(42);
    auto ra = sample_realization(model, 16, 8, a);
    auto rb = sample_realization(model, 16, 8, b);
    CHECK((ra.gains - rb.gains).cwiseAbs().maxCoeff() == 0.0);
    CHECK((ra.noise - rb.noise).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("channel construction validates moments and support") {
    // Rayleigh has a fixed coefficient of variation; sigma_h_sq = 0.5 with
    // mu_h = 1 is inconsistent.
    CHECK_THROWS_AS(ChannelModel::rayleigh_from_moments(1.0, 0.5, 1.0, 1.0), ValidationError);
    double consistent = (4.0 / 3.14159265358979323846 - 1.0);
    CHECK_NOTHROW(ChannelModel::rayleigh_from_moments(1.0, consistent, 1.0, 1.0));
    // Uniform gains must stay non-negative.
    CHECK_THROWS_AS(ChannelModel::uniform_from_moments(1.0, 0.5, 1.0, 1.0), ValidationError);
    CHECK_NOTHROW(ChannelModel::uniform_from_moments(std::sqrt(1.5), 0.5, 1.0, 1.0));
    CHECK_THROWS_AS(ChannelModel::uniform(-0.1, 1.0, 1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(ChannelModel::constant(1.0, -1.0, 1.0), ValidationError);
    CHECK_THROWS_AS(ChannelModel::constant(1.0, 1.0, 0.0), ValidationError);
}

TEST_CASE("aggregation validates shapes") {
    Vector g2(2), g3(3);
    g2.setZero();
    g3.setZero();
    ChannelRealization realization{Vector::Ones(2), Vector::Zero(2)};
    CHECK_THROWS_AS(mac_aggregate({g2, g2, g2}, realization), ValidationError);
    CHECK_THROWS_AS(mac_aggregate({g2, g3}, realization), ValidationError);
}
