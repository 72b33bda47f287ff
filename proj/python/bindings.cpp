// Python bindings for the AGMA core: problem generators, channel models,
// momentum schedules, the iterate loops, and the closed-form bounds.

#include "agma/algorithms.hpp"
#include "agma/channel.hpp"
#include "agma/data.hpp"
#include "agma/harness.hpp"
#include "agma/momentum.hpp"
#include "agma/problems.hpp"
#include "agma/theory.hpp"

#include <pybind11/eigen.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <optional>

namespace py = pybind11;
using namespace agma;

namespace {

algorithms::AlgorithmConfig make_config(const std::string& algorithm, double beta,
                                        std::optional<double> alpha0, int max_iters,
                                        std::optional<long> restart_k0, std::uint64_t seed,
                                        bool force_stepsize,
                                        std::optional<Vector> theta0) {
    algorithms::AlgorithmConfig config;
    config.algorithm = algorithms::algorithm_from_string(algorithm);
    config.beta = beta;
    config.alpha0 = alpha0;
    config.max_iters = max_iters;
    config.restart_k0 = restart_k0;
    config.seed = seed;
    config.force_stepsize = force_stepsize;
    if (theta0) config.theta0 = *theta0;
    return config;
}

}  // namespace

PYBIND11_MODULE(_agma, m) {
    m.doc() = "Accelerated gradient-descent learning over noisy fading multiple access "
              "channels: simulator, baselines, and analytic error bounds.";

    py::register_exception<ValidationError>(m, "ValidationError", PyExc_ValueError);
    py::register_exception<DivergenceError>(m, "DivergenceError", PyExc_RuntimeError);

    // ---- problems -------------------------------------------------------
    py::class_<problems::ProblemConstants>(m, "ProblemConstants")
        .def_readonly("lipschitz", &problems::ProblemConstants::lipschitz)
        .def_readonly("strong_convexity", &problems::ProblemConstants::strong_convexity)
        .def_readonly("gradient_power", &problems::ProblemConstants::gradient_power)
        .def_readonly("theta_star", &problems::ProblemConstants::theta_star)
        .def_readonly("f_star", &problems::ProblemConstants::f_star)
        .def("__repr__", [](const problems::ProblemConstants& c) {
            return "ProblemConstants(L=" + std::to_string(c.lipschitz) +
                   ", mu=" + std::to_string(c.strong_convexity) + ")";
        });

    py::class_<problems::ProblemInstance>(m, "ProblemInstance")
        .def_property_readonly("dimension",
                               [](const problems::ProblemInstance& p) { return p.dimension; })
        .def_property_readonly("node_count", &problems::ProblemInstance::node_count)
        .def_property_readonly(
            "family",
            [](const problems::ProblemInstance& p) { return problems::to_string(p.family); })
        .def_property_readonly("constants",
                               [](const problems::ProblemInstance& p) { return p.constants; })
        .def("node_inputs",
             [](const problems::ProblemInstance& p, int node) {
                 return p.nodes.at(static_cast<std::size_t>(node)).inputs;
             })
        .def("node_labels", [](const problems::ProblemInstance& p, int node) {
            return p.nodes.at(static_cast<std::size_t>(node)).labels;
        });

    m.def("local_gradient", &problems::local_gradient, py::arg("problem"), py::arg("node"),
          py::arg("theta"));
    m.def("local_objective", &problems::local_objective, py::arg("problem"), py::arg("node"),
          py::arg("theta"));
    m.def("global_objective", &problems::global_objective, py::arg("problem"),
          py::arg("theta"));
    m.def("global_gradient", &problems::global_gradient, py::arg("problem"), py::arg("theta"));
    m.def(
        "compute_constants",
        [](const problems::ProblemInstance& problem) {
            return problems::compute_constants(problem);
        },
        py::arg("problem"));

    // ---- data -----------------------------------------------------------
    m.def("synthesize_quadratic", &data::synthesize_quadratic, py::arg("dimension"),
          py::arg("condition_number"), py::arg("rank"), py::arg("nodes"), py::arg("seed"),
          py::arg("samples_per_node") = 0,
          "Least-squares instance with exact constants; rank < dimension gives a "
          "convex-only problem.");
    m.def("synthesize_logistic", &data::synthesize_logistic, py::arg("dimension"),
          py::arg("separation"), py::arg("lam"), py::arg("nodes"), py::arg("samples_per_node"),
          py::arg("seed"));
    m.def(
        "load_csv",
        [](const std::string& path, const std::string& label_column, const std::string& task,
           const std::string& family, double lam, int nodes,
           std::optional<Index> samples_per_node, bool standardize, bool center_labels,
           std::uint64_t seed) {
            data::CsvSource source;
            source.path = path;
            source.label_column = label_column;
            if (task == "regression") {
                source.task = data::Task::Regression;
            } else if (task == "binary") {
                source.task = data::Task::BinaryClassification;
            } else {
                throw ValidationError("task must be 'regression' or 'binary'");
            }
            if (family == "least_squares") {
                source.family = problems::LossFamily::LeastSquares;
            } else if (family == "logistic") {
                source.family = problems::LossFamily::RegularizedLogistic;
            } else if (family == "log_loss") {
                source.family = problems::LossFamily::LogLoss;
            } else {
                throw ValidationError("family must be least_squares | logistic | log_loss");
            }
            source.logistic_lambda = lam;
            data::DatasetSpec spec;
            spec.source = source;
            spec.nodes = nodes;
            spec.samples_per_node = samples_per_node;
            spec.standardize = standardize;
            spec.center_labels = center_labels;
            spec.seed = seed;
            return data::load_and_partition(spec);
        },
        py::arg("path"), py::arg("label_column"), py::arg("task") = "regression",
        py::arg("family") = "least_squares", py::arg("lam") = 0.1, py::arg("nodes") = 1,
        py::arg("samples_per_node") = std::nullopt, py::arg("standardize") = true,
        py::arg("center_labels") = true, py::arg("seed") = 0);

    // ---- channel --------------------------------------------------------
    py::class_<channel::ChannelModel>(m, "ChannelModel")
        .def_static("rayleigh", &channel::ChannelModel::rayleigh, py::arg("mu_h"),
                    py::arg("sigma_w_sq"), py::arg("energy"))
        .def_static("rayleigh_from_moments", &channel::ChannelModel::rayleigh_from_moments,
                    py::arg("mu_h"), py::arg("sigma_h_sq"), py::arg("sigma_w_sq"),
                    py::arg("energy"))
        .def_static("uniform", &channel::ChannelModel::uniform, py::arg("lo"), py::arg("hi"),
                    py::arg("sigma_w_sq"), py::arg("energy"))
        .def_static("uniform_from_moments", &channel::ChannelModel::uniform_from_moments,
                    py::arg("mu_h"), py::arg("sigma_h_sq"), py::arg("sigma_w_sq"),
                    py::arg("energy"))
        .def_static("constant", &channel::ChannelModel::constant, py::arg("value"),
                    py::arg("sigma_w_sq"), py::arg("energy"))
        .def_property_readonly("mu_h", &channel::ChannelModel::mu_h)
        .def_property_readonly("sigma_h_sq", &channel::ChannelModel::sigma_h_sq)
        .def_property_readonly("sigma_w_sq", &channel::ChannelModel::sigma_w_sq)
        .def_property_readonly("energy", &channel::ChannelModel::energy)
        .def("with_energy", &channel::ChannelModel::with_energy)
        .def("with_sigma_w_sq", &channel::ChannelModel::with_sigma_w_sq);

    m.def(
        "sample_realization",
        [](const channel::ChannelModel& model, int nodes, Index dimension,
           std::uint64_t seed) {
            RngStream rng(seed);
            auto realization = channel::sample_realization(model, nodes, dimension, rng);
            return py::make_tuple(realization.gains, realization.noise);
        },
        py::arg("model"), py::arg("nodes"), py::arg("dimension"), py::arg("seed"),
        "Draw (gains, noise) for one iteration from a fresh stream with the given seed.");
    m.def(
        "mac_aggregate",
        [](const std::vector<Vector>& grads, const Vector& gains, const Vector& noise) {
            return channel::mac_aggregate(grads, channel::ChannelRealization{gains, noise});
        },
        py::arg("local_grads"), py::arg("gains"), py::arg("noise"));
    m.def(
        "fdm_aggregate",
        [](const std::vector<Vector>& grads, const channel::ChannelModel& model,
           std::uint64_t seed) {
            RngStream rng(seed);
            return channel::fdm_aggregate(grads, model, rng);
        },
        py::arg("local_grads"), py::arg("model"), py::arg("seed"));

    py::class_<channel::MomentCheckResult>(m, "MomentCheckResult")
        .def_readonly("mean_error", &channel::MomentCheckResult::mean_error)
        .def_readonly("mean_standard_error", &channel::MomentCheckResult::mean_standard_error)
        .def_readonly("second_moment_error", &channel::MomentCheckResult::second_moment_error)
        .def_readonly("second_moment_standard_error",
                      &channel::MomentCheckResult::second_moment_standard_error);
    m.def("moment_check", &channel::moment_check, py::arg("model"), py::arg("problem"),
          py::arg("z"), py::arg("replications"), py::arg("seed"));

    // ---- momentum -------------------------------------------------------
    m.def("l_beta_tilde", &momentum::l_beta_tilde, py::arg("beta"), py::arg("mu_h"),
          py::arg("lipschitz"));
    m.def("stepsize_upper_limit", &momentum::stepsize_upper_limit, py::arg("mu_h"),
          py::arg("lipschitz"));
    m.def("gamma0", &momentum::gamma0, py::arg("alpha0"), py::arg("lipschitz"), py::arg("mu"));
    m.def("next_alpha", &momentum::next_alpha, py::arg("alpha_k"), py::arg("q"));
    m.def("eta_k", &momentum::eta_k, py::arg("alpha_k"), py::arg("alpha_next"));
    m.def("lambda_bound", &momentum::lambda_bound, py::arg("k"), py::arg("q"),
          py::arg("gamma0"), py::arg("l_tilde"), py::arg("strongly_convex"));
    m.def("default_alpha0", &momentum::default_alpha0, py::arg("mu"), py::arg("lipschitz"));

    py::class_<momentum::MomentumSchedule>(m, "MomentumSchedule")
        .def(py::init<double, double, double, double>(), py::arg("alpha0"), py::arg("q"),
             py::arg("gamma0"), py::arg("mu"))
        .def_static("strongly_convex", &momentum::MomentumSchedule::strongly_convex,
                    py::arg("alpha0"), py::arg("mu"), py::arg("l_tilde"), py::arg("lipschitz"))
        .def_static("convex", &momentum::MomentumSchedule::convex, py::arg("alpha0"),
                    py::arg("lipschitz"))
        .def("extend", &momentum::MomentumSchedule::extend, py::arg("k"))
        .def("alpha", &momentum::MomentumSchedule::alpha, py::arg("k"))
        .def("eta", &momentum::MomentumSchedule::eta, py::arg("k"))
        .def("lambda_k", &momentum::MomentumSchedule::lambda, py::arg("k"))
        .def("gamma", &momentum::MomentumSchedule::gamma, py::arg("k"))
        .def_property_readonly("q", &momentum::MomentumSchedule::q)
        .def_property_readonly("alpha0", &momentum::MomentumSchedule::alpha0);

    // ---- algorithms -----------------------------------------------------
    py::class_<algorithms::RunTrace>(m, "RunTrace")
        .def_property_readonly("iterations",
                               [](const algorithms::RunTrace& t) {
                                   std::vector<long> ks;
                                   for (const auto& r : t.records) ks.push_back(r.k);
                                   return ks;
                               })
        .def_property_readonly("excess_risk",
                               [](const algorithms::RunTrace& t) {
                                   std::vector<double> values;
                                   for (const auto& r : t.records) values.push_back(r.excess_risk);
                                   return values;
                               })
        .def_property_readonly("distance",
                               [](const algorithms::RunTrace& t) {
                                   std::vector<double> values;
                                   for (const auto& r : t.records) values.push_back(r.distance);
                                   return values;
                               })
        .def_readonly("seed", &algorithms::RunTrace::seed)
        .def_property_readonly(
            "beta", [](const algorithms::RunTrace& t) { return t.config.beta; })
        .def_property_readonly(
            "algorithm",
            [](const algorithms::RunTrace& t) { return to_string(t.config.algorithm); })
        .def_property_readonly(
            "max_iters", [](const algorithms::RunTrace& t) { return t.config.max_iters; })
        .def_readonly("alpha0_used", &algorithms::RunTrace::alpha0_used);

    py::class_<algorithms::MeanTrace>(m, "MeanTrace")
        .def_readonly("iterations", &algorithms::MeanTrace::iterations)
        .def_readonly("mean_excess", &algorithms::MeanTrace::mean_excess)
        .def_readonly("ci_halfwidth", &algorithms::MeanTrace::ci_halfwidth)
        .def_readonly("replications", &algorithms::MeanTrace::replications)
        .def_readonly("base_seed", &algorithms::MeanTrace::base_seed);

    m.def(
        "run",
        [](const problems::ProblemInstance& problem, const channel::ChannelModel& model,
           const std::string& algorithm, double beta, std::optional<double> alpha0,
           int max_iters, std::optional<long> restart_k0, std::uint64_t seed,
           bool force_stepsize, std::optional<Vector> theta0) {
            return algorithms::run(make_config(algorithm, beta, alpha0, max_iters, restart_k0,
                                               seed, force_stepsize, std::move(theta0)),
                                   problem, model);
        },
        py::arg("problem"), py::arg("channel"), py::arg("algorithm") = "agma", py::arg("beta"),
        py::arg("alpha0") = std::nullopt, py::arg("max_iters") = 100,
        py::arg("restart_k0") = std::nullopt, py::arg("seed") = 0,
        py::arg("force_stepsize") = false, py::arg("theta0") = std::nullopt,
        "One seeded run; algorithms: agma | gbma | fdm_gd | fdm_agd | central_nesterov.");
    m.def(
        "monte_carlo",
        [](const problems::ProblemInstance& problem, const channel::ChannelModel& model,
           const std::string& algorithm, double beta, std::optional<double> alpha0,
           int max_iters, std::optional<long> restart_k0, std::uint64_t seed,
           bool force_stepsize, int replications) {
            return algorithms::monte_carlo(make_config(algorithm, beta, alpha0, max_iters,
                                                       restart_k0, seed, force_stepsize,
                                                       std::nullopt),
                                           problem, model, replications);
        },
        py::arg("problem"), py::arg("channel"), py::arg("algorithm") = "agma", py::arg("beta"),
        py::arg("alpha0") = std::nullopt, py::arg("max_iters") = 100,
        py::arg("restart_k0") = std::nullopt, py::arg("seed") = 0,
        py::arg("force_stepsize") = false, py::arg("replications") = 1,
        "Mean excess-risk trace with 95% confidence half-widths over replications.");

    // ---- theory ---------------------------------------------------------
    py::class_<theory::BoundInputs>(m, "BoundInputs")
        .def(py::init<>())
        .def_readwrite("lipschitz", &theory::BoundInputs::lipschitz)
        .def_readwrite("mu", &theory::BoundInputs::mu)
        .def_readwrite("mu_h", &theory::BoundInputs::mu_h)
        .def_readwrite("sigma_h_sq", &theory::BoundInputs::sigma_h_sq)
        .def_readwrite("sigma_w_sq", &theory::BoundInputs::sigma_w_sq)
        .def_readwrite("gradient_power", &theory::BoundInputs::gradient_power)
        .def_readwrite("dimension", &theory::BoundInputs::dimension)
        .def_readwrite("nodes", &theory::BoundInputs::nodes)
        .def_readwrite("energy", &theory::BoundInputs::energy)
        .def_readwrite("beta", &theory::BoundInputs::beta)
        .def_readwrite("alpha0", &theory::BoundInputs::alpha0)
        .def_readwrite("f0_gap", &theory::BoundInputs::f0_gap)
        .def_readwrite("dist0_sq", &theory::BoundInputs::dist0_sq)
        .def_readwrite("epsilon", &theory::BoundInputs::epsilon)
        .def("l_tilde", &theory::BoundInputs::l_tilde);

    m.def(
        "make_bound_inputs",
        [](const problems::ProblemInstance& problem, const channel::ChannelModel& model,
           double beta, double alpha0, double epsilon) {
            return theory::make_bound_inputs(problem, model, beta, alpha0, epsilon);
        },
        py::arg("problem"), py::arg("channel"), py::arg("beta"), py::arg("alpha0"),
        py::arg("epsilon") = 0.5);
    m.def("delta_n", &theory::delta_n, py::arg("inputs"));
    m.def("k0_cap", &theory::k0_cap, py::arg("inputs"));
    m.def("theorem1_bound", &theory::theorem1_bound, py::arg("inputs"), py::arg("k"));
    m.def("theorem2_bound", &theory::theorem2_bound, py::arg("inputs"), py::arg("k"));
    m.def("theorem2_bound_accumulated", &theory::theorem2_bound_accumulated, py::arg("inputs"),
          py::arg("k"));
    m.def("k0_bound_minimizing", &theory::k0_bound_minimizing, py::arg("inputs"),
          py::arg("k_max"));
    m.def(
        "decomposition_terms",
        [](const theory::BoundInputs& inputs, bool strongly_convex) {
            auto terms = theory::decomposition_terms(inputs, strongly_convex);
            py::dict out;
            out["distortion"] = terms.distortion;
            out["noise"] = terms.noise;
            out["cv_h"] = terms.cv_h;
            out["snr"] = terms.snr ? py::cast(*terms.snr) : py::none();
            out["noise_free"] = terms.noise_free;
            return out;
        },
        py::arg("inputs"), py::arg("strongly_convex"));
    m.def("power_scaling_recommendation", &theory::power_scaling_recommendation,
          py::arg("nodes"), py::arg("epsilon"), py::arg("strongly_convex"));

    // ---- harness --------------------------------------------------------
    m.def(
        "verify",
        [](const std::string& suite, std::uint64_t seed) {
            auto report = harness::verify(harness::suite_from_string(suite), seed);
            py::list checks;
            for (const auto& check : report.checks) {
                py::dict entry;
                entry["name"] = check.name;
                entry["passed"] = check.passed;
                entry["measured"] = check.measured;
                entry["threshold"] = check.threshold;
                checks.append(entry);
            }
            return checks;
        },
        py::arg("suite"), py::arg("seed") = 20250604,
        "Run a built-in verification suite: sequences | moments | reduction | bounds.");
}
