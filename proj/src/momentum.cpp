#include "agma/momentum.hpp"

#include <cmath>
#include <limits>
#include <sstream>

namespace agma::momentum {

double stepsize_upper_limit(double mu_h, double lipschitz) {
    if (mu_h <= 0.0 || lipschitz <= 0.0)
        throw ValidationError("stepsize limit needs mu_h > 0 and L > 0");
    return 2.0 / (mu_h * lipschitz);
}

double l_beta_tilde(double beta, double mu_h, double lipschitz) {
    double limit = stepsize_upper_limit(mu_h, lipschitz);
    if (!(beta > 0.0) || !(beta < limit)) {
        std::ostringstream msg;
        msg << "stepsize out of convergence range: beta=" << beta << " not in (0, " << limit
            << ")";
        throw ValidationError(msg.str());
    }
    return 1.0 / (beta * (2.0 / mu_h - beta * lipschitz) * mu_h * mu_h);
}

double gamma0(double alpha0, double lipschitz, double mu) {
    if (!(alpha0 > 0.0) || !(alpha0 < 1.0))
        throw ValidationError("alpha0 must lie in the open interval (0, 1)");
    if (mu < 0.0 || lipschitz <= 0.0) throw ValidationError("gamma0 needs L > 0 and mu >= 0");
    if (mu > 0.0 && alpha0 * alpha0 <= mu / lipschitz)
        throw ValidationError("strongly convex initialization requires alpha0 > sqrt(mu/L)");
    return alpha0 * (alpha0 * lipschitz - mu) / (1.0 - alpha0);
}

double next_alpha(double alpha_k, double q) {
    if (!(alpha_k > 0.0) || alpha_k > 1.0)
        throw ValidationError("next_alpha needs alpha_k in (0, 1]");
    if (q < 0.0 || q >= 1.0) throw ValidationError("next_alpha needs q in [0, 1)");
    double t = alpha_k * alpha_k - q;
    double root = 0.5 * (-t + std::sqrt(t * t + 4.0 * alpha_k * alpha_k));
    // Guard against floating error landing exactly on the boundary.
    if (root <= 0.0) root = std::numeric_limits<double>::min();
    if (root >= 1.0) root = std::nextafter(1.0, 0.0);
    return root;
}

double eta_k(double alpha_k, double alpha_next) {
    if (!(alpha_k > 0.0) || !(alpha_k < 1.0) || !(alpha_next > 0.0) || !(alpha_next < 1.0))
        throw ValidationError("eta_k needs both alphas in (0, 1)");
    return alpha_k * (1.0 - alpha_k) / (alpha_next + alpha_k * alpha_k);
}

double lambda_bound(long k, double q, double gamma0, double l_tilde, bool strongly_convex) {
    if (k < 0) throw ValidationError("lambda_bound needs k >= 0");
    if (strongly_convex) {
        return std::pow(1.0 - std::sqrt(q), static_cast<double>(k));
    }
    double denom = 2.0 * std::sqrt(l_tilde) + static_cast<double>(k) * std::sqrt(gamma0);
    return 4.0 * l_tilde / (denom * denom);
}

double default_alpha0(double mu, double lipschitz) {
    if (mu <= 0.0) return 0.5;
    return 0.5 * (std::sqrt(mu / lipschitz) + 1.0);
}

MomentumSchedule::MomentumSchedule(double alpha0, double q, double gamma0, double mu)
    : q_(q), mu_(mu) {
    if (!(alpha0 > 0.0) || !(alpha0 < 1.0)) throw ValidationError("alpha0 must be in (0, 1)");
    if (q < 0.0 || q >= 1.0) throw ValidationError("schedule needs q in [0, 1)");
    if (q > 0.0 && alpha0 * alpha0 <= q)
        throw ValidationError("strongly convex schedule requires alpha0 > sqrt(q)");
    alphas_.push_back(alpha0);
    lambdas_.push_back(1.0);
    gammas_.push_back(gamma0);
}

MomentumSchedule MomentumSchedule::strongly_convex(double alpha0, double mu, double l_tilde,
                                                   double lipschitz) {
    if (mu <= 0.0) throw ValidationError("strongly convex schedule needs mu > 0");
    return MomentumSchedule(alpha0, mu / l_tilde, gamma0(alpha0, lipschitz, mu), mu);
}

MomentumSchedule MomentumSchedule::convex(double alpha0, double lipschitz) {
    return MomentumSchedule(alpha0, 0.0, gamma0(alpha0, lipschitz, 0.0), 0.0);
}

void MomentumSchedule::extend(long k) {
    while (static_cast<long>(alphas_.size()) <= k) {
        double a = alphas_.back();
        double next = next_alpha(a, q_);
        lambdas_.push_back((1.0 - a) * lambdas_.back());
        gammas_.push_back((1.0 - a) * gammas_.back() + a * mu_);
        alphas_.push_back(next);
    }
}

double MomentumSchedule::eta(long k) const {
    return eta_k(at(alphas_, k, "alpha"), at(alphas_, k + 1, "alpha"));
}

double MomentumSchedule::at(const std::vector<double>& seq, long k, const char* name) const {
    if (k < 0 || k >= static_cast<long>(seq.size())) {
        std::ostringstream msg;
        msg << name << "_" << k << " not generated; call extend(" << k << ") first";
        throw ValidationError(msg.str());
    }
    return seq[static_cast<std::size_t>(k)];
}

}  // namespace agma::momentum
