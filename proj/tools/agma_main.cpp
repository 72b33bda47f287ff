// Command-line front-end: experiment runner, verification suites, and the
// closed-form bound evaluator.

#include "agma/harness.hpp"
#include "agma/momentum.hpp"
#include "agma/theory.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

int run_command(const std::string& config_path, const std::optional<std::string>& out_dir,
                std::optional<int> replications, std::optional<std::uint64_t> seed) {
    auto config = agma::harness::load_config_file(config_path);
    if (out_dir) config.output_dir = *out_dir;
    if (replications) config.replications = *replications;
    if (seed) config.seed = *seed;
    config.validate();

    auto result = agma::harness::run_experiment(config);
    for (const auto& combo : result.combinations) {
        if (combo.failed) {
            std::cout << "FAILED  " << combo.name << ": " << combo.error << "\n";
        } else {
            std::cout << "wrote   " << combo.csv_path;
            if (combo.stepsize_out_of_range) std::cout << "  [outside convergence range]";
            std::cout << "\n";
        }
    }
    std::cout << "manifest " << result.manifest_path << "\n";
    return result.all_succeeded() ? 0 : 1;
}

int print_report(const agma::harness::VerifyReport& report) {
    int failures = 0;
    for (const auto& check : report.checks) {
        std::printf("%s  %s.%s  measured=%.6g threshold=%.6g\n",
                    check.passed ? "PASS" : "FAIL", report.suite.c_str(), check.name.c_str(),
                    check.measured, check.threshold);
        if (!check.passed) ++failures;
    }
    return failures;
}

int verify_command(const std::string& suite_name, std::uint64_t seed) {
    std::vector<agma::harness::VerifySuite> suites;
    if (suite_name == "all") {
        suites = {agma::harness::VerifySuite::Sequences, agma::harness::VerifySuite::Moments,
                  agma::harness::VerifySuite::Reduction, agma::harness::VerifySuite::Bounds};
    } else {
        suites = {agma::harness::suite_from_string(suite_name)};
    }
    int failures = 0;
    for (auto suite : suites) failures += print_report(agma::harness::verify(suite, seed));
    return failures == 0 ? 0 : 1;
}

struct BoundsArgs {
    std::string regime = "strongly_convex";
    double lipschitz = 1.0;
    double mu = 0.0;
    double mu_h = 1.0;
    double sigma_h_sq = 0.0;
    double sigma_w_sq = 0.0;
    double gradient_power = 1.0;
    long dimension = 1;
    int nodes = 1;
    double energy = 1.0;
    double beta = 0.0;       // 0 = use beta_factor
    double beta_factor = 1.0;
    double alpha0 = 0.0;     // 0 = regime default
    double f0_gap = 1.0;
    double dist0_sq = 1.0;
    double epsilon = 0.5;
    long k_max = 100;
};

int bounds_command(const BoundsArgs& args) {
    const bool strongly_convex = args.regime == "strongly_convex" || args.regime == "sc";
    if (!strongly_convex && args.regime != "convex") {
        std::cerr << "unknown regime '" << args.regime << "' (use strongly_convex | convex)\n";
        return 1;
    }

    agma::theory::BoundInputs inputs;
    inputs.lipschitz = args.lipschitz;
    inputs.mu = strongly_convex ? args.mu : 0.0;
    inputs.mu_h = args.mu_h;
    inputs.sigma_h_sq = args.sigma_h_sq;
    inputs.sigma_w_sq = args.sigma_w_sq;
    inputs.gradient_power = args.gradient_power;
    inputs.dimension = args.dimension;
    inputs.nodes = args.nodes;
    inputs.energy = args.energy;
    inputs.beta = args.beta > 0.0 ? args.beta : args.beta_factor / (args.mu_h * args.lipschitz);
    inputs.alpha0 = args.alpha0 > 0.0
                        ? args.alpha0
                        : agma::momentum::default_alpha0(inputs.mu, inputs.lipschitz);
    inputs.f0_gap = args.f0_gap;
    inputs.dist0_sq = args.dist0_sq;
    inputs.epsilon = args.epsilon;
    inputs.validate();

    auto terms = agma::theory::decomposition_terms(inputs, strongly_convex);
    std::printf("# L_tilde=%.12g delta_N=%.12g T2=%.12g T3=%.12g CV_h=%.12g", inputs.l_tilde(),
                agma::theory::delta_n(inputs), terms.distortion, terms.noise, terms.cv_h);
    if (terms.noise_free)
        std::printf(" SNR=inf(noise-free)");
    else
        std::printf(" SNR=%.12g", *terms.snr);
    std::printf(" E_N_recommended=%.12g\n",
                agma::theory::power_scaling_recommendation(args.nodes, args.epsilon,
                                                           strongly_convex));

    long k_top = args.k_max;
    if (!strongly_convex) k_top = std::min(k_top, agma::theory::k0_cap(inputs));
    std::printf("k,bound_value\n");
    for (long k = 0; k <= k_top; ++k) {
        double bound = strongly_convex ? agma::theory::theorem1_bound(inputs, k)
                                       : agma::theory::theorem2_bound(inputs, k);
        std::printf("%ld,%.17g\n", k, bound);
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"AGMA: accelerated gradient-descent learning over noisy fading MACs"};
    app.require_subcommand(1);

    // run
    std::string config_path;
    std::optional<std::string> out_dir;
    std::optional<int> replications;
    std::optional<std::uint64_t> seed_override;
    auto* run_cmd = app.add_subcommand("run", "Run an experiment config (JSON)");
    run_cmd->add_option("config", config_path, "Path to the experiment JSON")->required();
    run_cmd->add_option("--out", out_dir, "Output directory override");
    run_cmd->add_option("--reps", replications, "Replication count override");
    run_cmd->add_option("--seed", seed_override, "Base seed override");

    // verify
    std::string suite = "all";
    std::uint64_t verify_seed = 20250604;
    auto* verify_cmd = app.add_subcommand("verify", "Run a built-in verification suite");
    verify_cmd->add_option("suite", suite, "sequences | moments | reduction | bounds | all")
        ->required();
    verify_cmd->add_option("--seed", verify_seed, "Suite seed");

    // bounds
    BoundsArgs bounds;
    auto* bounds_cmd = app.add_subcommand("bounds", "Evaluate the closed-form error bounds");
    bounds_cmd->add_option("--regime", bounds.regime, "strongly_convex | convex");
    bounds_cmd->add_option("--L", bounds.lipschitz, "Lipschitz constant");
    bounds_cmd->add_option("--mu", bounds.mu, "Strong convexity constant");
    bounds_cmd->add_option("--mu-h", bounds.mu_h, "Channel gain mean");
    bounds_cmd->add_option("--sigma-h-sq", bounds.sigma_h_sq, "Channel gain variance");
    bounds_cmd->add_option("--sigma-w-sq", bounds.sigma_w_sq, "Receiver noise variance");
    bounds_cmd->add_option("--G", bounds.gradient_power, "Local gradient power bound");
    bounds_cmd->add_option("--d", bounds.dimension, "Model dimension");
    bounds_cmd->add_option("--N", bounds.nodes, "Node count");
    bounds_cmd->add_option("--E-N", bounds.energy, "Transmit power coefficient");
    bounds_cmd->add_option("--beta", bounds.beta, "Stepsize (overrides --beta-factor)");
    bounds_cmd->add_option("--beta-factor", bounds.beta_factor, "f in beta = f/(mu_h L)");
    bounds_cmd->add_option("--alpha0", bounds.alpha0, "Momentum initializer");
    bounds_cmd->add_option("--f0-gap", bounds.f0_gap, "F(theta_0) - F*");
    bounds_cmd->add_option("--dist0-sq", bounds.dist0_sq, "||theta_0 - theta*||^2");
    bounds_cmd->add_option("--epsilon", bounds.epsilon, "Convex-case exponent");
    bounds_cmd->add_option("--k-max", bounds.k_max, "Largest iteration to print");

    CLI11_PARSE(app, argc, argv);

    try {
        if (run_cmd->parsed()) return run_command(config_path, out_dir, replications, seed_override);
        if (verify_cmd->parsed()) return verify_command(suite, verify_seed);
        if (bounds_cmd->parsed()) return bounds_command(bounds);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
