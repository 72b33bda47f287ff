#include "agma/harness.hpp"

#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using namespace agma;
using namespace agma::harness;

namespace {

std::string small_experiment_json(const std::string& output_dir) {
    return R"({
      "dataset": {"type": "synthetic_quadratic", "dimension": 4, "condition_number": 10,
                  "rank": 4, "nodes": 6, "seed": 3},
      "channel": {"gains": "rayleigh", "mu_h": 1.0, "sigma_w_sq": 1.0, "E_N": 1.0},
      "algorithms": [
        {"name": "agma", "beta_factor": 1.0, "max_iters": 12},
        {"name": "gbma", "beta_factor": 1.0, "max_iters": 12}
      ],
      "replications": 4,
      "seed": 777,
      "output": ")" + output_dir + R"("
    })";
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in);
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return buffer.str();
}

std::filesystem::path fresh_dir(const std::string& tag) {
    auto dir = std::filesystem::temp_directory_path() / ("agma_harness_" + tag);
    std::filesystem::remove_all(dir);
    return dir;
}

}  // namespace

TEST_CASE("config parsing round trip") {
    auto dir = fresh_dir("parse");
    auto config = parse_config(small_experiment_json(dir.string()));
    CHECK(config.algorithms.size() == 2);
    CHECK(config.replications == 4);
    CHECK(config.seed == 777);
    CHECK(config.dataset.nodes == 6);
    CHECK(config.channel.energy == 1.0);
}

TEST_CASE("config validation reports the offending field") {
    CHECK_THROWS_WITH_AS(parse_config("{"), doctest::Contains("not valid JSON"),
                         ValidationError);
    CHECK_THROWS_WITH_AS(parse_config(R"({"channel": {}, "algorithms": []})"),
                         doctest::Contains("dataset"), ValidationError);

    auto dir = fresh_dir("validate");
    std::string no_algorithms = R"({
      "dataset": {"type": "synthetic_quadratic", "dimension": 4, "nodes": 4},
      "channel": {"gains": "constant", "mu_h": 1.0},
      "algorithms": []
    })";
    CHECK_THROWS_WITH_AS(parse_config(no_algorithms), doctest::Contains("algorithms"),
                         ValidationError);

    std::string bad_sweep = R"({
      "dataset": {"type": "synthetic_quadratic", "dimension": 4, "nodes": 4},
      "channel": {"gains": "constant", "mu_h": 1.0},
      "algorithms": [{"name": "agma"}],
      "sweep": {"parameter": "bandwidth", "values": [1, 2]}
    })";
    CHECK_THROWS_WITH_AS(parse_config(bad_sweep), doctest::Contains("sweep.parameter"),
                         ValidationError);

    std::string bad_name = R"({
      "dataset": {"type": "synthetic_quadratic", "dimension": 4, "nodes": 4},
      "channel": {"gains": "constant", "mu_h": 1.0},
      "algorithms": [{"name": "adam"}]
    })";
    CHECK_THROWS_WITH_AS(parse_config(bad_name), doctest::Contains("unknown algorithm"),
                         ValidationError);
}

TEST_CASE("run_experiment writes CSVs and a manifest, byte-identically on reruns") {
    auto dir = fresh_dir("run1");
    auto config = parse_config(small_experiment_json(dir.string()));
    auto result = run_experiment(config);
    CHECK(result.all_succeeded());
    REQUIRE(result.combinations.size() == 2);

    for (const auto& combo : result.combinations) {
        CHECK(std::filesystem::exists(combo.csv_path));
        auto text = slurp(combo.csv_path);
        CHECK(text.rfind("k,mean_excess_risk,ci_halfwidth,bound_value,algorithm\n", 0) == 0);
        // header + k = 0..12
        CHECK(std::count(text.begin(), text.end(), '\n') == 14);
    }
    CHECK(std::filesystem::exists(result.manifest_path));

    // AGMA rows carry the theorem1 bound; GBMA rows leave the column empty.
    auto agma_csv = slurp(result.combinations[0].csv_path);
    auto gbma_csv = slurp(result.combinations[1].csv_path);
    CHECK(agma_csv.find(",,agma") == std::string::npos);
    CHECK(gbma_csv.find(",,gbma") != std::string::npos);

    auto dir2 = fresh_dir("run2");
    auto config2 = config;
    config2.output_dir = dir2.string();
    auto result2 = run_experiment(config2);
    for (std::size_t i = 0; i < result.combinations.size(); ++i) {
        CHECK(slurp(result.combinations[i].csv_path) ==
              slurp(result2.combinations[i].csv_path));
    }

    std::filesystem::remove_all(dir);
    std::filesystem::remove_all(dir2);
}

TEST_CASE("sweep over E_N produces one CSV per combination with the swept column") {
    auto dir = fresh_dir("sweep");
    auto config = parse_config(small_experiment_json(dir.string()));
    config.algorithms.resize(1);
    config.sweep = SweepSpec{"E_N", {0.5, 2.0}};
    auto result = run_experiment(config);
    CHECK(result.all_succeeded());
    REQUIRE(result.combinations.size() == 2);
    auto first = slurp(result.combinations[0].csv_path);
    CHECK(first.rfind("k,mean_excess_risk,ci_halfwidth,bound_value,algorithm,E_N\n", 0) == 0);
    CHECK(first.find(",agma,0.5\n") != std::string::npos);
    std::filesystem::remove_all(dir);
}

TEST_CASE("out-of-range stepsizes: rejected directly, executed when swept or forced") {
    auto dir = fresh_dir("stepsize");
    auto config = parse_config(small_experiment_json(dir.string()));
    config.algorithms.resize(1);
    config.algorithms[0].beta_factor = 2.1;

    // Direct out-of-range configuration fails the whole combination.
    auto rejected = run_experiment(config);
    CHECK(!rejected.all_succeeded());
    CHECK(rejected.combinations[0].failed);
    CHECK(rejected.combinations[0].error.find("convergence range") != std::string::npos);

    // As a sweep value it executes, flagged.
    config.algorithms[0].beta_factor = 1.0;
    config.algorithms[0].max_iters = 5;
    config.sweep = SweepSpec{"beta_factor", {0.5, 2.1}};
    auto swept = run_experiment(config);
    CHECK(swept.all_succeeded());
    CHECK(!swept.combinations[0].stepsize_out_of_range);
    CHECK(swept.combinations[1].stepsize_out_of_range);

    // force = true has the same effect without a sweep.
    config.sweep.reset();
    config.algorithms[0].beta_factor = 2.1;
    config.algorithms[0].force = true;
    auto forced = run_experiment(config);
    CHECK(forced.all_succeeded());
    CHECK(forced.combinations[0].stepsize_out_of_range);

    std::filesystem::remove_all(dir);
}

TEST_CASE("restart modes resolve against the convex instance") {
    auto dir = fresh_dir("restart");
    std::string text = R"({
      "dataset": {"type": "synthetic_quadratic", "dimension": 6, "condition_number": 20,
                  "rank": 4, "nodes": 16, "seed": 5},
      "channel": {"gains": "rayleigh", "mu_h": 1.0, "sigma_w_sq": 1.0, "E_N": 1.0},
      "algorithms": [
        {"name": "agma", "beta_factor": 1.0, "max_iters": 10, "restart_k0": "auto", "epsilon": 0.5},
        {"name": "agma", "beta_factor": 1.0, "max_iters": 10, "restart_k0": "bound_min"}
      ],
      "replications": 2,
      "seed": 42,
      "output": ")" + dir.string() + R"("
    })";
    auto result = run_experiment(parse_config(text));
    CHECK(result.all_succeeded());
    // Both produce the theorem2 bound column on this mu = 0 instance.
    for (const auto& combo : result.combinations) CHECK(combo.bound_kind == "theorem2");
    std::filesystem::remove_all(dir);
}

TEST_CASE("verify suites pass") {
    CHECK(verify(VerifySuite::Sequences).all_passed());
    CHECK(verify(VerifySuite::Reduction).all_passed());
    CHECK(verify(VerifySuite::Moments).all_passed());
}

TEST_CASE("suite names resolve") {
    CHECK(suite_from_string("sequences") == VerifySuite::Sequences);
    CHECK(suite_from_string("moments") == VerifySuite::Moments);
    CHECK(suite_from_string("reduction") == VerifySuite::Reduction);
    CHECK(suite_from_string("bounds") == VerifySuite::Bounds);
    CHECK_THROWS_AS(suite_from_string("everything"), ValidationError);
}
