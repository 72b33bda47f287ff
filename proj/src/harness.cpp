#include "agma/harness.hpp"

#include "agma/theory.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <memory>
#include <set>
#include <sstream>

namespace agma::harness {

using nlohmann::json;

namespace {

std::string format_double(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%.17g", value);
    return buffer;
}

std::string format_short(double value) {
    char buffer[40];
    std::snprintf(buffer, sizeof buffer, "%g", value);
    return buffer;
}

[[noreturn]] void config_error(const std::string& path, const std::string& what) {
    throw ValidationError("config error at " + path + ": " + what);
}

const json& require_field(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key)) config_error(path + "." + key, "missing required field");
    return j.at(key);
}

template <typename T>
T get_required(const json& j, const std::string& key, const std::string& path) {
    try {
        return require_field(j, key, path).get<T>();
    } catch (const json::exception& e) {
        config_error(path + "." + key, e.what());
    }
}

template <typename T>
T get_or(const json& j, const std::string& key, T fallback, const std::string& path) {
    if (!j.contains(key) || j.at(key).is_null()) return fallback;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        config_error(path + "." + key, e.what());
    }
}

template <typename T>
std::optional<T> get_optional(const json& j, const std::string& key, const std::string& path) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    try {
        return j.at(key).get<T>();
    } catch (const json::exception& e) {
        config_error(path + "." + key, e.what());
    }
}

}  // namespace

channel::ChannelModel ChannelSpec::build() const {
    switch (family) {
        case channel::GainFamily::Rayleigh:
            if (!mu_h) throw ValidationError("channel: rayleigh gains need mu_h");
            if (sigma_h_sq)
                return channel::ChannelModel::rayleigh_from_moments(*mu_h, *sigma_h_sq,
                                                                    sigma_w_sq, energy);
            return channel::ChannelModel::rayleigh(*mu_h, sigma_w_sq, energy);
        case channel::GainFamily::Uniform:
            if (lo && hi) return channel::ChannelModel::uniform(*lo, *hi, sigma_w_sq, energy);
            if (mu_h && sigma_h_sq)
                return channel::ChannelModel::uniform_from_moments(*mu_h, *sigma_h_sq,
                                                                   sigma_w_sq, energy);
            throw ValidationError("channel: uniform gains need (lo, hi) or (mu_h, sigma_h_sq)");
        case channel::GainFamily::Constant:
            if (!mu_h) throw ValidationError("channel: constant gains need mu_h");
            return channel::ChannelModel::constant(*mu_h, sigma_w_sq, energy);
    }
    throw ValidationError("channel: unknown gain family");
}

void ExperimentConfig::validate() const {
    if (algorithms.empty()) throw ValidationError("config error at algorithms: need at least one");
    if (replications < 1)
        throw ValidationError("config error at replications: must be >= 1");
    if (sweep) {
        static const std::set<std::string> kParameters = {
            "N", "E_N", "beta_factor", "alpha0", "sigma_h_sq", "sigma_w_sq"};
        if (kParameters.count(sweep->parameter) == 0)
            throw ValidationError("config error at sweep.parameter: unknown parameter '" +
                                  sweep->parameter + "'");
        if (sweep->values.empty())
            throw ValidationError("config error at sweep.values: must be non-empty");
        for (double v : sweep->values) {
            if (sweep->parameter == "N" &&
                (v < 1.0 || std::floor(v) != v))
                throw ValidationError("config error at sweep.values: N values must be integers >= 1");
            if ((sweep->parameter == "E_N" && v <= 0.0) ||
                (sweep->parameter == "beta_factor" && v <= 0.0))
                throw ValidationError("config error at sweep.values: values must be > 0");
            if ((sweep->parameter == "sigma_h_sq" || sweep->parameter == "sigma_w_sq") && v < 0.0)
                throw ValidationError("config error at sweep.values: variances must be >= 0");
            if (sweep->parameter == "alpha0" && (v <= 0.0 || v >= 1.0))
                throw ValidationError("config error at sweep.values: alpha0 must be in (0,1)");
        }
    }
}

namespace {

data::DatasetSpec parse_dataset(const json& j) {
    const std::string path = "dataset";
    data::DatasetSpec spec;
    spec.nodes = get_required<int>(j, "nodes", path);
    spec.seed = get_or<std::uint64_t>(j, "seed", 0, path);
    spec.standardize = get_or<bool>(j, "standardize", true, path);
    spec.center_labels = get_or<bool>(j, "center_labels", true, path);
    if (auto spn = get_optional<Index>(j, "samples_per_node", path)) spec.samples_per_node = spn;

    const std::string type = get_required<std::string>(j, "type", path);
    if (type == "synthetic_quadratic") {
        data::SyntheticQuadraticSource src;
        src.dimension = get_required<Index>(j, "dimension", path);
        src.condition_number = get_or<double>(j, "condition_number", 1.0, path);
        src.rank = get_or<Index>(j, "rank", src.dimension, path);
        src.samples_per_node = get_or<Index>(j, "samples_per_node", 0, path);
        spec.samples_per_node.reset();  // handled inside the generator
        spec.source = src;
    } else if (type == "synthetic_logistic") {
        data::SyntheticLogisticSource src;
        src.dimension = get_required<Index>(j, "dimension", path);
        src.separation = get_or<double>(j, "separation", 2.0, path);
        src.logistic_lambda = get_or<double>(j, "lambda", 0.1, path);
        src.samples_per_node = get_or<Index>(j, "samples_per_node", 4, path);
        spec.samples_per_node.reset();
        spec.source = src;
    } else if (type == "csv") {
        data::CsvSource src;
        src.path = get_required<std::string>(j, "path", path);
        const json& label = require_field(j, "label_column", path);
        src.label_column = label.is_string() ? label.get<std::string>()
                                             : std::to_string(label.get<long>());
        std::string task = get_or<std::string>(j, "task", "regression", path);
        if (task == "regression") {
            src.task = data::Task::Regression;
        } else if (task == "binary") {
            src.task = data::Task::BinaryClassification;
        } else {
            config_error(path + ".task", "expected 'regression' or 'binary'");
        }
        std::string family = get_or<std::string>(
            j, "family", task == "binary" ? "logistic" : "least_squares", path);
        if (family == "least_squares") {
            src.family = problems::LossFamily::LeastSquares;
        } else if (family == "logistic") {
            src.family = problems::LossFamily::RegularizedLogistic;
        } else if (family == "log_loss") {
            src.family = problems::LossFamily::LogLoss;
        } else {
            config_error(path + ".family", "expected least_squares | logistic | log_loss");
        }
        src.logistic_lambda = get_or<double>(j, "lambda", 0.1, path);
        spec.source = src;
    } else {
        config_error(path + ".type", "expected synthetic_quadratic | synthetic_logistic | csv");
    }
    return spec;
}

ChannelSpec parse_channel(const json& j) {
    const std::string path = "channel";
    ChannelSpec spec;
    std::string gains = get_or<std::string>(j, "gains", "rayleigh", path);
    if (gains == "rayleigh") {
        spec.family = channel::GainFamily::Rayleigh;
    } else if (gains == "uniform") {
        spec.family = channel::GainFamily::Uniform;
    } else if (gains == "constant") {
        spec.family = channel::GainFamily::Constant;
    } else {
        config_error(path + ".gains", "expected rayleigh | uniform | constant");
    }
    spec.mu_h = get_optional<double>(j, "mu_h", path);
    spec.sigma_h_sq = get_optional<double>(j, "sigma_h_sq", path);
    spec.lo = get_optional<double>(j, "lo", path);
    spec.hi = get_optional<double>(j, "hi", path);
    spec.sigma_w_sq = get_or<double>(j, "sigma_w_sq", 0.0, path);
    if (j.contains("E_N"))
        spec.energy = get_required<double>(j, "E_N", path);
    else
        spec.energy = get_or<double>(j, "energy", 1.0, path);
    return spec;
}

AlgorithmSpec parse_algorithm(const json& j, std::size_t index) {
    const std::string path = "algorithms[" + std::to_string(index) + "]";
    AlgorithmSpec spec;
    spec.algorithm = algorithms::algorithm_from_string(get_required<std::string>(j, "name", path));
    spec.beta = get_optional<double>(j, "beta", path);
    spec.beta_factor = get_optional<double>(j, "beta_factor", path);
    if (spec.beta && spec.beta_factor)
        config_error(path, "give either beta or beta_factor, not both");
    if (!spec.beta && !spec.beta_factor) spec.beta_factor = 1.0;
    spec.alpha0 = get_optional<double>(j, "alpha0", path);
    spec.max_iters = get_or<int>(j, "max_iters", 100, path);
    spec.epsilon = get_or<double>(j, "epsilon", 0.5, path);
    spec.force = get_or<bool>(j, "force", false, path);
    if (j.contains("restart_k0") && !j.at("restart_k0").is_null()) {
        const json& restart = j.at("restart_k0");
        if (restart.is_string()) {
            spec.restart_mode = restart.get<std::string>();
            if (spec.restart_mode != "auto" && spec.restart_mode != "bound_min")
                config_error(path + ".restart_k0", "expected a count, 'auto', or 'bound_min'");
        } else {
            spec.restart_k0 = restart.get<long>();
        }
    }
    return spec;
}

}  // namespace

ExperimentConfig parse_config(const std::string& json_text) {
    json document;
    try {
        document = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }

    ExperimentConfig config;
    config.dataset = parse_dataset(require_field(document, "dataset", "config"));
    config.channel = parse_channel(require_field(document, "channel", "config"));
    const json& algos = require_field(document, "algorithms", "config");
    if (!algos.is_array()) config_error("algorithms", "expected an array");
    for (std::size_t i = 0; i < algos.size(); ++i)
        config.algorithms.push_back(parse_algorithm(algos[i], i));
    config.replications = get_or<int>(document, "replications", 1, "config");
    config.seed = get_or<std::uint64_t>(document, "seed", 0, "config");
    config.output_dir = get_or<std::string>(document, "output", "results", "config");
    if (document.contains("sweep") && !document.at("sweep").is_null()) {
        const json& sweep = document.at("sweep");
        SweepSpec spec;
        spec.parameter = get_required<std::string>(sweep, "parameter", "sweep");
        spec.values = get_required<std::vector<double>>(sweep, "values", "sweep");
        config.sweep = spec;
    }
    config.validate();
    return config;
}

ExperimentConfig load_config_file(const std::string& path) {
    std::ifstream file(path);
    if (!file) throw ValidationError("cannot open config file: " + path);
    std::ostringstream buffer;
    buffer << file.rdbuf();
    return parse_config(buffer.str());
}

namespace {

json dataset_to_json(const data::DatasetSpec& spec) {
    json j;
    j["nodes"] = spec.nodes;
    j["seed"] = spec.seed;
    if (const auto* q = std::get_if<data::SyntheticQuadraticSource>(&spec.source)) {
        j["type"] = "synthetic_quadratic";
        j["dimension"] = q->dimension;
        j["condition_number"] = q->condition_number;
        j["rank"] = q->rank;
        j["samples_per_node"] = q->samples_per_node;
    } else if (const auto* l = std::get_if<data::SyntheticLogisticSource>(&spec.source)) {
        j["type"] = "synthetic_logistic";
        j["dimension"] = l->dimension;
        j["separation"] = l->separation;
        j["lambda"] = l->logistic_lambda;
        j["samples_per_node"] = l->samples_per_node;
    } else {
        const auto& c = std::get<data::CsvSource>(spec.source);
        j["type"] = "csv";
        j["path"] = c.path;
        j["label_column"] = c.label_column;
        j["task"] = c.task == data::Task::Regression ? "regression" : "binary";
        j["family"] = problems::to_string(c.family);
        j["lambda"] = c.logistic_lambda;
        j["standardize"] = spec.standardize;
        j["center_labels"] = spec.center_labels;
        if (spec.samples_per_node) j["samples_per_node"] = *spec.samples_per_node;
    }
    return j;
}

json channel_to_json(const ChannelSpec& spec) {
    json j;
    j["gains"] = channel::to_string(spec.family);
    if (spec.mu_h) j["mu_h"] = *spec.mu_h;
    if (spec.sigma_h_sq) j["sigma_h_sq"] = *spec.sigma_h_sq;
    if (spec.lo) j["lo"] = *spec.lo;
    if (spec.hi) j["hi"] = *spec.hi;
    j["sigma_w_sq"] = spec.sigma_w_sq;
    j["energy"] = spec.energy;
    return j;
}

json algorithm_to_json(const AlgorithmSpec& spec) {
    json j;
    j["name"] = algorithms::to_string(spec.algorithm);
    if (spec.beta) j["beta"] = *spec.beta;
    if (spec.beta_factor) j["beta_factor"] = *spec.beta_factor;
    if (spec.alpha0) j["alpha0"] = *spec.alpha0;
    j["max_iters"] = spec.max_iters;
    j["epsilon"] = spec.epsilon;
    j["force"] = spec.force;
    if (spec.restart_k0) j["restart_k0"] = *spec.restart_k0;
    if (!spec.restart_mode.empty()) j["restart_k0"] = spec.restart_mode;
    return j;
}

struct Combination {
    AlgorithmSpec algorithm;
    data::DatasetSpec dataset;
    ChannelSpec channel;
    std::optional<double> sweep_value;
    bool from_sweep_stepsize = false;
    std::string name;
    std::uint64_t base_seed = 0;
};

std::vector<Combination> expand_combinations(const ExperimentConfig& config) {
    std::vector<std::optional<double>> values;
    if (config.sweep) {
        for (double v : config.sweep->values) values.emplace_back(v);
    } else {
        values.emplace_back(std::nullopt);
    }

    std::map<std::string, int> name_counts;
    std::vector<Combination> combos;
    std::uint64_t index = 0;
    for (const auto& value : values) {
        for (const auto& algo : config.algorithms) {
            Combination combo;
            combo.algorithm = algo;
            combo.dataset = config.dataset;
            combo.channel = config.channel;
            combo.sweep_value = value;
            if (value) {
                const std::string& param = config.sweep->parameter;
                if (param == "N") {
                    combo.dataset.nodes = static_cast<int>(*value);
                } else if (param == "E_N") {
                    combo.channel.energy = *value;
                } else if (param == "sigma_w_sq") {
                    combo.channel.sigma_w_sq = *value;
                } else if (param == "sigma_h_sq") {
                    combo.channel.sigma_h_sq = *value;
                    combo.channel.lo.reset();
                    combo.channel.hi.reset();
                } else if (param == "beta_factor") {
                    combo.algorithm.beta.reset();
                    combo.algorithm.beta_factor = *value;
                    combo.from_sweep_stepsize = true;
                } else if (param == "alpha0") {
                    combo.algorithm.alpha0 = *value;
                }
            }
            std::string name = algorithms::to_string(algo.algorithm);
            if (value)
                name += "__" + config.sweep->parameter + "=" + format_short(*value);
            int count = ++name_counts[name];
            if (count > 1) name += "_" + std::to_string(count);
            combo.name = name;
            combo.base_seed = config.seed + 1000003ull * index;
            ++index;
            combos.push_back(std::move(combo));
        }
    }
    return combos;
}

/// Problems rebuilt only when the sweep changes the node count.
class ProblemCache {
public:
    std::shared_ptr<const problems::ProblemInstance> get(const data::DatasetSpec& spec) {
        auto it = cache_.find(spec.nodes);
        if (it != cache_.end()) return it->second;
        auto problem =
            std::make_shared<const problems::ProblemInstance>(data::load_and_partition(spec));
        cache_.emplace(spec.nodes, problem);
        return problem;
    }

private:
    std::map<int, std::shared_ptr<const problems::ProblemInstance>> cache_;
};

struct ResolvedRun {
    algorithms::AlgorithmConfig config;
    bool stepsize_out_of_range = false;
    std::string bound_kind;
    std::optional<theory::BoundInputs> bound_inputs;
};

ResolvedRun resolve_run(const Combination& combo, const problems::ProblemInstance& problem,
                        const channel::ChannelModel& channel_model) {
    const auto& algo = combo.algorithm;
    ResolvedRun resolved;
    resolved.config.algorithm = algo.algorithm;
    resolved.config.alpha0 = algo.alpha0;
    resolved.config.max_iters = algo.max_iters;
    resolved.config.seed = combo.base_seed;

    const bool mac = algo.algorithm == algorithms::Algorithm::Agma ||
                     algo.algorithm == algorithms::Algorithm::Gbma;
    const double mu_h_eff = mac ? channel_model.mu_h() : 1.0;

    if (algo.beta) {
        resolved.config.beta = *algo.beta;
    } else {
        if (!problem.constants)
            throw ValidationError("beta_factor needs problem constants; give beta directly");
        resolved.config.beta =
            *algo.beta_factor / (mu_h_eff * problem.constants->lipschitz);
    }

    if (problem.constants) {
        double limit =
            momentum::stepsize_upper_limit(mu_h_eff, problem.constants->lipschitz);
        if (!(resolved.config.beta > 0.0) || !(resolved.config.beta < limit)) {
            resolved.stepsize_out_of_range = true;
            if (!algo.force && !combo.from_sweep_stepsize) {
                std::ostringstream msg;
                msg << "combination " << combo.name
                    << ": stepsize out of convergence range: beta=" << resolved.config.beta
                    << " not in (0, " << limit << "); set force=true to run anyway";
                throw ValidationError(msg.str());
            }
            resolved.config.force_stepsize = true;
        }
    }

    // Restart iteration.
    if (algo.restart_k0) {
        resolved.config.restart_k0 = *algo.restart_k0;
    } else if (!algo.restart_mode.empty()) {
        if (algo.restart_mode == "auto") {
            double k0 = std::floor(
                std::pow(static_cast<double>(problem.node_count()), 1.0 - algo.epsilon));
            resolved.config.restart_k0 = std::max(1L, static_cast<long>(k0));
        } else {  // bound_min
            if (!problem.constants || problem.constants->strong_convexity > 0.0)
                throw ValidationError(
                    "bound_min restart selection applies to convex-only problems");
            double alpha0 = algo.alpha0.value_or(momentum::default_alpha0(
                problem.constants->strong_convexity, problem.constants->lipschitz));
            auto inputs = theory::make_bound_inputs(problem, channel_model,
                                                    resolved.config.beta, alpha0, algo.epsilon);
            resolved.config.restart_k0 =
                theory::k0_bound_minimizing(inputs, algo.max_iters);
        }
    }

    // Bound column, AGMA only, needs constants and an in-range stepsize.
    if (algo.algorithm == algorithms::Algorithm::Agma && problem.constants &&
        !resolved.stepsize_out_of_range) {
        double alpha0 = algo.alpha0.value_or(momentum::default_alpha0(
            problem.constants->strong_convexity, problem.constants->lipschitz));
        resolved.bound_inputs = theory::make_bound_inputs(problem, channel_model,
                                                          resolved.config.beta, alpha0,
                                                          algo.epsilon);
        resolved.bound_kind =
            problem.constants->strong_convexity > 0.0 ? "theorem1" : "theorem2";
    }
    return resolved;
}

void write_combination_csv(const std::string& path, const algorithms::MeanTrace& trace,
                           const ResolvedRun& resolved, const std::string& algorithm,
                           const std::optional<SweepSpec>& sweep,
                           const std::optional<double>& sweep_value) {
    std::ofstream out(path, std::ios::binary);  // '\n' endings on every platform
    if (!out) throw ValidationError("cannot write CSV file: " + path);
    out << "k,mean_excess_risk,ci_halfwidth,bound_value,algorithm";
    if (sweep) out << "," << sweep->parameter;
    out << "\n";

    long k0 = 0;
    if (resolved.bound_kind == "theorem2") k0 = theory::k0_cap(*resolved.bound_inputs);
    for (std::size_t row = 0; row < trace.iterations.size(); ++row) {
        long k = trace.iterations[row];
        std::string bound;
        if (resolved.bound_kind == "theorem1") {
            bound = format_double(theory::theorem1_bound(*resolved.bound_inputs, k));
        } else if (resolved.bound_kind == "theorem2" && k <= k0) {
            bound = format_double(theory::theorem2_bound(*resolved.bound_inputs, k));
        }
        out << k << "," << format_double(trace.mean_excess[row]) << ","
            << format_double(trace.ci_halfwidth[row]) << "," << bound << "," << algorithm;
        if (sweep) out << "," << format_short(sweep_value.value_or(0.0));
        out << "\n";
    }
}

}  // namespace

bool ExperimentResult::all_succeeded() const {
    for (const auto& combo : combinations) {
        if (combo.failed) return false;
    }
    return true;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
    config.validate();
    std::filesystem::create_directories(config.output_dir);

    auto combos = expand_combinations(config);
    ProblemCache problems;
    ExperimentResult result;

    json manifest;
    manifest["config"]["dataset"] = dataset_to_json(config.dataset);
    manifest["config"]["channel"] = channel_to_json(config.channel);
    manifest["config"]["replications"] = config.replications;
    manifest["config"]["seed"] = config.seed;
    manifest["config"]["output"] = config.output_dir;
    for (const auto& algo : config.algorithms)
        manifest["config"]["algorithms"].push_back(algorithm_to_json(algo));
    if (config.sweep) {
        manifest["config"]["sweep"]["parameter"] = config.sweep->parameter;
        manifest["config"]["sweep"]["values"] = config.sweep->values;
    }

    for (const auto& combo : combos) {
        CombinationResult entry;
        entry.name = combo.name;
        entry.algorithm = algorithms::to_string(combo.algorithm.algorithm);
        entry.sweep_value = combo.sweep_value;
        entry.base_seed = combo.base_seed;
        std::string csv_path =
            (std::filesystem::path(config.output_dir) / (combo.name + ".csv")).string();

        try {
            auto problem = problems.get(combo.dataset);
            auto channel_model = combo.channel.build();
            ResolvedRun resolved = resolve_run(combo, *problem, channel_model);
            entry.stepsize_out_of_range = resolved.stepsize_out_of_range;
            entry.bound_kind = resolved.bound_kind;
            entry.resolved_beta = resolved.config.beta;
            entry.resolved_restart_k0 = resolved.config.restart_k0;

            auto trace = algorithms::monte_carlo(resolved.config, *problem, channel_model,
                                                 config.replications);
            write_combination_csv(csv_path, trace, resolved, entry.algorithm, config.sweep,
                                  combo.sweep_value);
            entry.csv_path = csv_path;
        } catch (const std::exception& e) {
            entry.failed = true;
            entry.error = e.what();
            // Failure marker so partial output directories are recognizable.
            std::ofstream marker(csv_path + ".failed");
            marker << e.what() << "\n";
        }

        json combo_json;
        combo_json["name"] = entry.name;
        combo_json["algorithm"] = entry.algorithm;
        if (entry.sweep_value) {
            combo_json["sweep_parameter"] = config.sweep->parameter;
            combo_json["sweep_value"] = *entry.sweep_value;
        }
        combo_json["csv"] = entry.csv_path;
        combo_json["base_seed"] = entry.base_seed;
        combo_json["replication_seeds"] =
            json{{"first", entry.base_seed},
                 {"last", entry.base_seed + static_cast<std::uint64_t>(config.replications) - 1}};
        combo_json["stepsize_out_of_range"] = entry.stepsize_out_of_range;
        combo_json["bound"] = entry.bound_kind;
        combo_json["failed"] = entry.failed;
        if (entry.failed) combo_json["error"] = entry.error;
        if (!entry.failed) {
            combo_json["resolved"]["beta"] = entry.resolved_beta;
            if (entry.resolved_restart_k0)
                combo_json["resolved"]["restart_k0"] = *entry.resolved_restart_k0;
        }
        manifest["combinations"].push_back(combo_json);

        result.combinations.push_back(std::move(entry));
    }

    // The manifest is the commit marker: written last, after all CSVs.
    result.manifest_path =
        (std::filesystem::path(config.output_dir) / "manifest.json").string();
    std::ofstream manifest_out(result.manifest_path, std::ios::binary);
    if (!manifest_out) throw ValidationError("cannot write manifest: " + result.manifest_path);
    manifest_out << manifest.dump(2) << "\n";
    return result;
}

// ---------------------------------------------------------------------------
// Verification suites
// ---------------------------------------------------------------------------

namespace {

void add_check(VerifyReport& report, const std::string& name, double measured,
               double threshold) {
    report.checks.push_back({name, measured <= threshold, measured, threshold});
}

VerifyReport verify_sequences(std::uint64_t seed) {
    VerifyReport report{"sequences", {}};
    RngStream rng(seed);
    const long horizon = 1000;

    double worst_alpha_range = 0.0;    // how far any alpha leaves (0,1)
    double worst_alpha_floor = 0.0;    // sqrt(q) - alpha_k, strongly convex
    double worst_residual = 0.0;
    double worst_lambda_gap = 0.0;     // lambda_k - bound
    double worst_gamma_identity = 0.0; // convex gamma_k vs gamma0*lambda_k
    double worst_gamma_floor = 0.0;    // mu - gamma_k, strongly convex

    for (int trial = 0; trial < 100; ++trial) {
        const bool strongly_convex = trial % 2 == 0;
        const double lipschitz = 0.5 + 9.5 * rng.uniform01();
        const double l_tilde = lipschitz * (1.0 + 3.0 * rng.uniform01());

        double q = 0.0;
        double mu = 0.0;
        double alpha0;
        if (strongly_convex) {
            q = 0.81 * rng.uniform01() * (lipschitz / l_tilde);
            q = std::max(q, 1e-6);
            mu = q * l_tilde;
            double floor = std::sqrt(mu / lipschitz);
            alpha0 = floor + (1.0 - floor) * (0.05 + 0.9 * rng.uniform01());
        } else {
            alpha0 = 0.05 + 0.9 * rng.uniform01();
        }
        double g0 = momentum::gamma0(alpha0, lipschitz, mu);
        momentum::MomentumSchedule schedule(alpha0, q, g0, mu);
        schedule.extend(horizon + 1);

        for (long k = 0; k <= horizon; ++k) {
            double a = schedule.alpha(k);
            worst_alpha_range = std::max({worst_alpha_range, -a, a - 1.0});
            if (strongly_convex)
                worst_alpha_floor = std::max(worst_alpha_floor, std::sqrt(q) - a);
            if (k < horizon) {
                double a_next = schedule.alpha(k + 1);
                double residual = std::abs(a_next * a_next - (1.0 - a_next) * a * a - q * a_next);
                worst_residual = std::max(worst_residual, residual);
            }
            double bound = momentum::lambda_bound(k, q, g0, l_tilde, strongly_convex);
            worst_lambda_gap = std::max(worst_lambda_gap, schedule.lambda(k) - bound);
            if (strongly_convex) {
                worst_gamma_floor = std::max(worst_gamma_floor, mu - schedule.gamma(k));
            } else {
                double identity = std::abs(schedule.gamma(k) - g0 * schedule.lambda(k)) /
                                  std::max(g0, 1e-300);
                worst_gamma_identity = std::max(worst_gamma_identity, identity);
            }
        }
    }

    add_check(report, "alpha_in_unit_interval", worst_alpha_range, 0.0);
    // alpha_k and gamma_k approach their floors sqrt(q) and mu at the fixed
    // point, so the strict inequalities are checked up to rounding.
    add_check(report, "alpha_above_sqrt_q", worst_alpha_floor, 1e-12);
    add_check(report, "recursion_residual", worst_residual, 1e-12);
    add_check(report, "lambda_below_closed_form_bound", worst_lambda_gap, 1e-12);
    add_check(report, "convex_gamma_equals_gamma0_lambda", worst_gamma_identity, 1e-12);
    add_check(report, "strongly_convex_gamma_above_mu", worst_gamma_floor, 1e-12);
    return report;
}

VerifyReport verify_moments(std::uint64_t seed) {
    VerifyReport report{"moments", {}};
    auto problem = data::synthesize_quadratic(5, 10.0, 5, 20, seed);
    const int replications = 100000;

    auto model = channel::ChannelModel::uniform_from_moments(1.5, 0.5, 1.0, 1.0);
    Vector z = Vector::Zero(problem.dimension);
    auto stochastic = channel::moment_check(model, problem, z, replications, seed + 1);
    add_check(report, "mean_within_5se", stochastic.mean_error,
              std::max(5.0 * stochastic.mean_standard_error, 1e-12));
    add_check(report, "second_moment_within_5se", stochastic.second_moment_error,
              std::max(5.0 * stochastic.second_moment_standard_error, 1e-12));

    auto deterministic = channel::ChannelModel::constant(1.3, 0.0, 1.0);
    auto exact = channel::moment_check(deterministic, problem, z, 1000, seed + 2);
    add_check(report, "deterministic_channel_mean_exact", exact.mean_error, 1e-12);
    add_check(report, "deterministic_channel_second_moment_exact", exact.second_moment_error,
              1e-12);

    auto at_star =
        channel::moment_check(model, problem, problem.constants->theta_star, 20000, seed + 3);
    add_check(report, "mean_at_theta_star_within_5se", at_star.mean_error,
              std::max(5.0 * at_star.mean_standard_error, 1e-12));
    return report;
}

VerifyReport verify_reduction(std::uint64_t seed) {
    VerifyReport report{"reduction", {}};
    auto problem = data::synthesize_quadratic(10, 100.0, 10, 20, seed);
    const double lipschitz = problem.constants->lipschitz;
    auto noiseless = channel::ChannelModel::constant(1.0, 0.0, 1.0);

    algorithms::AlgorithmConfig agma;
    agma.algorithm = algorithms::Algorithm::Agma;
    agma.beta = 1.0 / lipschitz;
    agma.max_iters = 100;
    agma.seed = seed;
    auto agma_trace = algorithms::run(agma, problem, noiseless);

    algorithms::AlgorithmConfig reference = agma;
    reference.algorithm = algorithms::Algorithm::CentralNesterov;
    auto reference_trace = algorithms::run(reference, problem, noiseless);

    double worst = 0.0;
    for (std::size_t i = 0; i < agma_trace.records.size(); ++i) {
        double a = agma_trace.records[i].excess_risk;
        double b = reference_trace.records[i].excess_risk;
        worst = std::max(worst, std::abs(a - b) / std::max(std::abs(b), 1e-300));
    }
    add_check(report, "agma_matches_central_nesterov", worst, 1e-9);

    // GBMA against an independent plain-GD recursion.
    algorithms::AlgorithmConfig gbma = agma;
    gbma.algorithm = algorithms::Algorithm::Gbma;
    auto gbma_trace = algorithms::run(gbma, problem, noiseless);
    Vector theta = Vector::Zero(problem.dimension);
    double worst_gd = 0.0;
    for (int k = 0; k <= gbma.max_iters; ++k) {
        double excess =
            problems::global_objective(problem, theta) - problem.constants->f_star;
        double traced = gbma_trace.records[static_cast<std::size_t>(k)].excess_risk;
        worst_gd = std::max(worst_gd, std::abs(excess - traced) / std::max(std::abs(excess), 1e-300));
        theta -= gbma.beta * problems::global_gradient(problem, theta);
    }
    add_check(report, "gbma_matches_plain_gradient_descent", worst_gd, 1e-12);
    return report;
}

VerifyReport verify_bounds(std::uint64_t seed) {
    VerifyReport report{"bounds", {}};
    const int replications = 200;

    {
        auto problem = data::synthesize_quadratic(10, 100.0, 10, 100, seed);
        auto model = channel::ChannelModel::rayleigh(1.0, 1.0, 1.0);
        algorithms::AlgorithmConfig config;
        config.algorithm = algorithms::Algorithm::Agma;
        config.beta = 1.0 / (model.mu_h() * problem.constants->lipschitz);
        config.max_iters = 100;
        config.seed = seed + 11;
        auto trace = algorithms::monte_carlo(config, problem, model, replications);

        double alpha0 = momentum::default_alpha0(problem.constants->strong_convexity,
                                                 problem.constants->lipschitz);
        auto inputs = theory::make_bound_inputs(problem, model, config.beta, alpha0);
        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
            double upper = trace.mean_excess[i] + trace.ci_halfwidth[i];
            worst = std::max(worst, upper - theory::theorem1_bound(inputs, trace.iterations[i]));
        }
        add_check(report, "theorem1_dominates_monte_carlo", worst, 0.0);
    }

    {
        auto problem = data::synthesize_quadratic(10, 100.0, 6, 256, seed + 1);
        auto model = channel::ChannelModel::rayleigh(1.0, 1.0, 1.0);
        algorithms::AlgorithmConfig config;
        config.algorithm = algorithms::Algorithm::Agma;
        config.beta = 1.0 / (model.mu_h() * problem.constants->lipschitz);
        config.seed = seed + 12;
        const double epsilon = 0.5;
        auto inputs = theory::make_bound_inputs(problem, model, config.beta, 0.5, epsilon);
        long k0 = theory::k0_cap(inputs);
        config.max_iters = static_cast<int>(k0);
        auto trace = algorithms::monte_carlo(config, problem, model, replications);

        double worst = -std::numeric_limits<double>::infinity();
        for (std::size_t i = 0; i < trace.iterations.size(); ++i) {
            long k = trace.iterations[i];
            if (k < 1) continue;
            double upper = trace.mean_excess[i] + trace.ci_halfwidth[i];
            worst = std::max(worst, upper - theory::theorem2_bound(inputs, k));
        }
        add_check(report, "theorem2_dominates_monte_carlo", worst, 0.0);
    }
    return report;
}

}  // namespace

VerifySuite suite_from_string(const std::string& name) {
    if (name == "sequences") return VerifySuite::Sequences;
    if (name == "moments") return VerifySuite::Moments;
    if (name == "reduction") return VerifySuite::Reduction;
    if (name == "bounds") return VerifySuite::Bounds;
    throw ValidationError("unknown verify suite: " + name);
}

bool VerifyReport::all_passed() const {
    for (const auto& check : checks) {
        if (!check.passed) return false;
    }
    return true;
}

VerifyReport verify(VerifySuite suite, std::uint64_t seed) {
    switch (suite) {
        case VerifySuite::Sequences: return verify_sequences(seed);
        case VerifySuite::Moments: return verify_moments(seed);
        case VerifySuite::Reduction: return verify_reduction(seed);
        case VerifySuite::Bounds: return verify_bounds(seed);
    }
    throw ValidationError("unknown verify suite");
}

}  // namespace agma::harness
