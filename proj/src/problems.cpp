#include "agma/problems.hpp"

#include <Eigen/Eigenvalues>

#include <cmath>
#include <sstream>

namespace agma::problems {

namespace {

void check_theta(const ProblemInstance& problem, const Vector& theta) {
    if (theta.size() != problem.dimension) {
        std::ostringstream msg;
        msg << "theta has dimension " << theta.size() << ", problem expects "
            << problem.dimension;
        throw ValidationError(msg.str());
    }
}

void check_node(const ProblemInstance& problem, int node) {
    if (node < 0 || node >= problem.node_count()) {
        std::ostringstream msg;
        msg << "node index " << node << " out of range [0, " << problem.node_count() << ")";
        throw ValidationError(msg.str());
    }
}

// log(1 + exp(t)) without overflow.
double log1p_exp(double t) {
    if (t > 0.0) return t + std::log1p(std::exp(-t));
    return std::log1p(std::exp(t));
}

// Logistic sigmoid 1/(1+exp(-t)).
double sigmoid(double t) {
    if (t >= 0.0) return 1.0 / (1.0 + std::exp(-t));
    double e = std::exp(t);
    return e / (1.0 + e);
}

}  // namespace

std::string to_string(LossFamily family) {
    switch (family) {
        case LossFamily::LeastSquares: return "least_squares";
        case LossFamily::RegularizedLogistic: return "logistic";
        case LossFamily::LogLoss: return "log_loss";
    }
    return "unknown";
}

void ProblemInstance::validate() const {
    if (nodes.empty()) throw ValidationError("problem has no nodes");
    if (dimension < 1) throw ValidationError("problem dimension must be >= 1");
    for (std::size_t n = 0; n < nodes.size(); ++n) {
        const auto& node = nodes[n];
        if (node.inputs.cols() != dimension)
            throw ValidationError("node " + std::to_string(n) + " feature width mismatch");
        if (node.inputs.rows() != node.labels.size())
            throw ValidationError("node " + std::to_string(n) + " row/label count mismatch");
        if (node.sample_count() < 1)
            throw ValidationError("node " + std::to_string(n) + " is empty");
        if (family == LossFamily::RegularizedLogistic) {
            for (Index i = 0; i < node.labels.size(); ++i) {
                double y = node.labels[i];
                if (y != 1.0 && y != -1.0)
                    throw ValidationError("logistic labels must be in {-1, +1}");
            }
        }
    }
    if (family == LossFamily::RegularizedLogistic && logistic_lambda <= 0.0)
        throw ValidationError("logistic regularization lambda must be > 0");
}

Vector local_gradient(const ProblemInstance& problem, int node, const Vector& theta) {
    check_node(problem, node);
    check_theta(problem, theta);
    const auto& data = problem.nodes[static_cast<std::size_t>(node)];
    const double m = static_cast<double>(data.sample_count());

    switch (problem.family) {
        case LossFamily::LeastSquares: {
            Vector residual = data.inputs * theta - data.labels;
            return data.inputs.transpose() * residual / m;
        }
        case LossFamily::RegularizedLogistic: {
            Vector grad = problem.logistic_lambda * theta;
            for (Index i = 0; i < data.sample_count(); ++i) {
                double y = data.labels[i];
                double margin = y * data.inputs.row(i).dot(theta);
                grad.noalias() -= (y * sigmoid(-margin) / m) * data.inputs.row(i).transpose();
            }
            return grad;
        }
        case LossFamily::LogLoss: {
            Vector grad = Vector::Zero(problem.dimension);
            for (Index i = 0; i < data.sample_count(); ++i) {
                double r = data.inputs.row(i).dot(theta) - data.labels[i];
                grad.noalias() += (r / ((r * r + 1.0) * m)) * data.inputs.row(i).transpose();
            }
            return grad;
        }
    }
    throw ValidationError("unknown loss family");
}

double local_objective(const ProblemInstance& problem, int node, const Vector& theta) {
    check_node(problem, node);
    check_theta(problem, theta);
    const auto& data = problem.nodes[static_cast<std::size_t>(node)];
    const double m = static_cast<double>(data.sample_count());

    switch (problem.family) {
        case LossFamily::LeastSquares: {
            Vector residual = data.inputs * theta - data.labels;
            return 0.5 * residual.squaredNorm() / m;
        }
        case LossFamily::RegularizedLogistic: {
            double loss = 0.0;
            for (Index i = 0; i < data.sample_count(); ++i) {
                double margin = data.labels[i] * data.inputs.row(i).dot(theta);
                loss += log1p_exp(-margin);
            }
            return loss / m + 0.5 * problem.logistic_lambda * theta.squaredNorm();
        }
        case LossFamily::LogLoss: {
            double loss = 0.0;
            for (Index i = 0; i < data.sample_count(); ++i) {
                double r = data.inputs.row(i).dot(theta) - data.labels[i];
                loss += std::log(r * r + 1.0);
            }
            return 0.5 * loss / m;
        }
    }
    throw ValidationError("unknown loss family");
}

double global_objective(const ProblemInstance& problem, const Vector& theta) {
    check_theta(problem, theta);
    double total = 0.0;
    for (int n = 0; n < problem.node_count(); ++n) total += local_objective(problem, n, theta);
    return total / static_cast<double>(problem.node_count());
}

Vector global_gradient(const ProblemInstance& problem, const Vector& theta) {
    check_theta(problem, theta);
    Vector grad = Vector::Zero(problem.dimension);
    for (int n = 0; n < problem.node_count(); ++n) grad += local_gradient(problem, n, theta);
    return grad / static_cast<double>(problem.node_count());
}

namespace {

// Centralized Nesterov descent with constant momentum, used only to locate
// theta_star for the logistic family. mu = lambda > 0 guarantees linear rate.
Vector solve_logistic_minimizer(const ProblemInstance& problem, double lipschitz, double mu) {
    const double beta = 1.0 / lipschitz;
    const double sqrt_q = std::sqrt(mu / lipschitz);
    const double eta = (1.0 - sqrt_q) / (1.0 + sqrt_q);
    const long max_iters = 1000000;
    const double tol = 1e-12;

    Vector theta = Vector::Zero(problem.dimension);
    Vector theta_prev = theta;
    for (long k = 0; k < max_iters; ++k) {
        Vector z = theta + eta * (theta - theta_prev);
        Vector grad = global_gradient(problem, z);
        if (global_gradient(problem, theta).norm() <= tol) return theta;
        theta_prev = theta;
        theta = z - beta * grad;
    }
    if (global_gradient(problem, theta).norm() <= tol) return theta;
    throw ValidationError("logistic minimizer did not reach gradient norm 1e-12 within 1e6 iterations");
}

double estimate_gradient_power(const ProblemInstance& problem, const Vector& theta0,
                               const Vector& theta_star) {
    // Max of ||grad f_n||^2 at theta0, theta_star, and 100 interior points,
    // inflated by 10%.
    const int interior = 100;
    double worst = 0.0;
    for (int i = 0; i <= interior + 1; ++i) {
        double t = static_cast<double>(i) / static_cast<double>(interior + 1);
        Vector theta = theta0 + t * (theta_star - theta0);
        for (int n = 0; n < problem.node_count(); ++n) {
            worst = std::max(worst, local_gradient(problem, n, theta).squaredNorm());
        }
    }
    return 1.1 * worst;
}

}  // namespace

ProblemConstants compute_constants(const ProblemInstance& problem, const Vector* theta0) {
    problem.validate();
    Vector start = theta0 ? *theta0 : Vector::Zero(problem.dimension);
    check_theta(problem, start);

    ProblemConstants constants;
    const int N = problem.node_count();
    const Index d = problem.dimension;

    switch (problem.family) {
        case LossFamily::LeastSquares: {
            Matrix gram_mean = Matrix::Zero(d, d);
            Vector rhs_mean = Vector::Zero(d);
            double lipschitz_sum = 0.0;
            double mu_sum = 0.0;
            for (const auto& node : problem.nodes) {
                const double m = static_cast<double>(node.sample_count());
                Matrix gram = node.inputs.transpose() * node.inputs / m;
                Eigen::SelfAdjointEigenSolver<Matrix> eigen(gram);
                if (eigen.info() != Eigen::Success)
                    throw ValidationError("eigen-solve failed on a node Gram matrix");
                lipschitz_sum += eigen.eigenvalues().maxCoeff();
                mu_sum += std::max(0.0, eigen.eigenvalues().minCoeff());
                gram_mean += gram;
                rhs_mean += node.inputs.transpose() * node.labels / m;
            }
            gram_mean /= static_cast<double>(N);
            rhs_mean /= static_cast<double>(N);
            constants.lipschitz = lipschitz_sum / static_cast<double>(N);
            constants.strong_convexity = mu_sum / static_cast<double>(N);

            // Normal-equation solve; ridge 1e-12 when the Gram mean is
            // (numerically) singular, giving a reproducible minimum-norm-like
            // reference for the convex-only case.
            Matrix system = gram_mean;
            if (constants.strong_convexity <= 1e-12) {
                system += 1e-12 * Matrix::Identity(d, d);
            }
            constants.theta_star = system.ldlt().solve(rhs_mean);
            if (!all_finite(constants.theta_star))
                throw ValidationError("normal-equation solve produced non-finite theta_star");
            constants.f_star = global_objective(problem, constants.theta_star);
            break;
        }
        case LossFamily::RegularizedLogistic: {
            double max_sq_norm = 0.0;
            for (const auto& node : problem.nodes) {
                for (Index i = 0; i < node.sample_count(); ++i) {
                    max_sq_norm = std::max(max_sq_norm, node.inputs.row(i).squaredNorm());
                }
            }
            constants.strong_convexity = problem.logistic_lambda;
            constants.lipschitz = problem.logistic_lambda + max_sq_norm / 4.0;
            constants.theta_star =
                solve_logistic_minimizer(problem, constants.lipschitz, constants.strong_convexity);
            constants.f_star = global_objective(problem, constants.theta_star);
            break;
        }
        case LossFamily::LogLoss:
            throw ValidationError("constants unavailable: log-loss family is non-convex");
    }

    constants.gradient_power = estimate_gradient_power(problem, start, constants.theta_star);
    return constants;
}

}  // namespace agma::problems
