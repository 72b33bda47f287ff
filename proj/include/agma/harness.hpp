#pragma once

#include "agma/algorithms.hpp"
#include "agma/channel.hpp"
#include "agma/data.hpp"
#include "agma/types.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace agma::harness {

/// Declarative channel description; build() performs the moment validation.
struct ChannelSpec {
    channel::GainFamily family = channel::GainFamily::Rayleigh;
    std::optional<double> mu_h;
    std::optional<double> sigma_h_sq;
    std::optional<double> lo;  // uniform endpoints, alternative to moments
    std::optional<double> hi;
    double sigma_w_sq = 0.0;
    double energy = 1.0;

    channel::ChannelModel build() const;
};

struct AlgorithmSpec {
    algorithms::Algorithm algorithm = algorithms::Algorithm::Agma;
    std::optional<double> beta;         // absolute stepsize
    std::optional<double> beta_factor;  // f in beta = f / (mu_h L)
    std::optional<double> alpha0;
    int max_iters = 100;
    std::optional<long> restart_k0;
    std::string restart_mode;  // "", "auto" = floor(N^(1-eps)), "bound_min"
    double epsilon = 0.5;      // convex-case exponent for bounds / restart
    bool force = false;        // execute even with beta out of range
};

struct SweepSpec {
    std::string parameter;  // N, E_N, beta_factor, alpha0, sigma_h_sq, sigma_w_sq
    std::vector<double> values;
};

struct ExperimentConfig {
    data::DatasetSpec dataset;
    ChannelSpec channel;
    std::vector<AlgorithmSpec> algorithms;
    int replications = 1;
    std::uint64_t seed = 0;
    std::optional<SweepSpec> sweep;
    std::string output_dir = "results";

    void validate() const;
};

/// Parses the JSON experiment document (see README for the schema).
/// Malformed fields are reported with their path.
ExperimentConfig parse_config(const std::string& json_text);
ExperimentConfig load_config_file(const std::string& path);

struct CombinationResult {
    std::string name;
    std::string algorithm;
    std::optional<double> sweep_value;
    std::string csv_path;
    std::uint64_t base_seed = 0;
    bool stepsize_out_of_range = false;
    std::string bound_kind;  // "theorem1", "theorem2", or ""
    double resolved_beta = 0.0;
    std::optional<long> resolved_restart_k0;
    bool failed = false;
    std::string error;
};

struct ExperimentResult {
    std::vector<CombinationResult> combinations;
    std::string manifest_path;
    bool all_succeeded() const;
};

/**
 * Runs every sweep-value x algorithm combination through monte_carlo, writes
 * one CSV per combination (columns: k, mean_excess_risk, ci_halfwidth,
 * bound_value, algorithm, plus the swept parameter) and a manifest JSON with
 * the resolved config and per-combination seeds. The manifest is written
 * last, as the commit marker. Re-running the same config reproduces the CSV
 * bytes exactly.
 *
 * A combination whose stepsize falls outside the convergence range is
 * rejected unless it was produced by a sweep or carries force=true, in which
 * case it executes flagged. A combination that fails mid-run is recorded in
 * the manifest with failed=true; remaining combinations still run.
 */
ExperimentResult run_experiment(const ExperimentConfig& config);

enum class VerifySuite { Sequences, Moments, Reduction, Bounds };

VerifySuite suite_from_string(const std::string& name);

struct VerifyCheck {
    std::string name;
    bool passed = false;
    double measured = 0.0;
    double threshold = 0.0;
};

struct VerifyReport {
    std::string suite;
    std::vector<VerifyCheck> checks;
    bool all_passed() const;
};

/// Built-in invariant suites: momentum sequence properties, channel moment
/// identities, the noiseless reduction to centralized references, and
/// bound-vs-simulation dominance.
VerifyReport verify(VerifySuite suite, std::uint64_t seed = 20250604);

}  // namespace agma::harness
