#include "agma/channel.hpp"

#include <cmath>
#include <sstream>

namespace agma::channel {

namespace {

constexpr double kPi = 3.14159265358979323846;
constexpr double kMomentTolerance = 1e-12;

double relative_gap(double a, double b) {
    double scale = std::max({std::abs(a), std::abs(b), 1e-300});
    return std::abs(a - b) / scale;
}

}  // namespace

std::string to_string(GainFamily family) {
    switch (family) {
        case GainFamily::Rayleigh: return "rayleigh";
        case GainFamily::Uniform: return "uniform";
        case GainFamily::Constant: return "constant";
    }
    return "unknown";
}

ChannelModel::ChannelModel(GainFamily family, double a, double b, double mu_h,
                           double sigma_h_sq, double sigma_w_sq, double energy)
    : family_(family),
      param_a_(a),
      param_b_(b),
      mu_h_(mu_h),
      sigma_h_sq_(sigma_h_sq),
      sigma_w_sq_(sigma_w_sq),
      energy_(energy) {
    if (mu_h_ <= 0.0) throw ValidationError("channel gain mean mu_h must be > 0");
    if (sigma_h_sq_ < 0.0) throw ValidationError("gain variance must be >= 0");
    if (sigma_w_sq_ < 0.0) throw ValidationError("noise variance must be >= 0");
    if (energy_ <= 0.0) throw ValidationError("power coefficient E_N must be > 0");
}

ChannelModel ChannelModel::rayleigh(double mu_h, double sigma_w_sq, double energy) {
    if (mu_h <= 0.0) throw ValidationError("Rayleigh mean must be > 0");
    double scale = mu_h / std::sqrt(kPi / 2.0);
    double variance = (2.0 - kPi / 2.0) * scale * scale;
    return ChannelModel(GainFamily::Rayleigh, scale, 0.0, mu_h, variance, sigma_w_sq, energy);
}

ChannelModel ChannelModel::rayleigh_from_moments(double mu_h, double sigma_h_sq,
                                                 double sigma_w_sq, double energy) {
    ChannelModel model = rayleigh(mu_h, sigma_w_sq, energy);
    if (relative_gap(model.sigma_h_sq(), sigma_h_sq) > kMomentTolerance) {
        std::ostringstream msg;
        msg << "requested sigma_h_sq=" << sigma_h_sq
            << " is inconsistent with Rayleigh gains of mean " << mu_h << " (implied variance "
            << model.sigma_h_sq() << "); use uniform gains for arbitrary moment pairs";
        throw ValidationError(msg.str());
    }
    return model;
}

ChannelModel ChannelModel::uniform(double lo, double hi, double sigma_w_sq, double energy) {
    if (lo < 0.0) throw ValidationError("uniform gain lower endpoint must be >= 0");
    if (hi <= lo) throw ValidationError("uniform gain endpoints must satisfy hi > lo");
    double mean = 0.5 * (lo + hi);
    double variance = (hi - lo) * (hi - lo) / 12.0;
    return ChannelModel(GainFamily::Uniform, lo, hi, mean, variance, sigma_w_sq, energy);
}

ChannelModel ChannelModel::uniform_from_moments(double mu_h, double sigma_h_sq,
                                                double sigma_w_sq, double energy) {
    if (sigma_h_sq <= 0.0) throw ValidationError("uniform_from_moments needs sigma_h_sq > 0");
    double half_width = std::sqrt(3.0 * sigma_h_sq);
    double lo = mu_h - half_width;
    if (lo < -1e-12) {
        std::ostringstream msg;
        msg << "uniform gains with mu_h=" << mu_h << ", sigma_h_sq=" << sigma_h_sq
            << " would have negative support (lo=" << lo << ")";
        throw ValidationError(msg.str());
    }
    return uniform(std::max(lo, 0.0), mu_h + half_width, sigma_w_sq, energy);
}

ChannelModel ChannelModel::constant(double c, double sigma_w_sq, double energy) {
    if (c <= 0.0) throw ValidationError("constant gain must be > 0");
    return ChannelModel(GainFamily::Constant, c, 0.0, c, 0.0, sigma_w_sq, energy);
}

double ChannelModel::sample_gain(RngStream& rng) const {
    switch (family_) {
        case GainFamily::Rayleigh: return rng.rayleigh(param_a_);
        case GainFamily::Uniform: return rng.uniform(param_a_, param_b_);
        case GainFamily::Constant: return param_a_;
    }
    throw ValidationError("unknown gain family");
}

ChannelModel ChannelModel::with_energy(double energy) const {
    ChannelModel copy = *this;
    if (energy <= 0.0) throw ValidationError("power coefficient E_N must be > 0");
    copy.energy_ = energy;
    return copy;
}

ChannelModel ChannelModel::with_sigma_w_sq(double sigma_w_sq) const {
    ChannelModel copy = *this;
    if (sigma_w_sq < 0.0) throw ValidationError("noise variance must be >= 0");
    copy.sigma_w_sq_ = sigma_w_sq;
    return copy;
}

ChannelRealization sample_realization(const ChannelModel& model, int nodes, Index dimension,
                                      RngStream& rng) {
    if (nodes < 1) throw ValidationError("sample_realization needs N >= 1");
    if (dimension < 1) throw ValidationError("sample_realization needs d >= 1");

    ChannelRealization realization;
    realization.gains.resize(nodes);
    for (int n = 0; n < nodes; ++n) realization.gains[n] = model.sample_gain(rng);

    realization.noise.resize(dimension);
    double stddev =
        std::sqrt(model.sigma_w_sq()) / (static_cast<double>(nodes) * std::sqrt(model.energy()));
    for (Index i = 0; i < dimension; ++i) realization.noise[i] = rng.gaussian(0.0, stddev);
    return realization;
}

Vector mac_aggregate(const std::vector<Vector>& local_grads,
                     const ChannelRealization& realization) {
    const int N = static_cast<int>(local_grads.size());
    if (N == 0) throw ValidationError("mac_aggregate needs at least one gradient");
    if (realization.gains.size() != N)
        throw ValidationError("gain count does not match gradient count");

    const Index d = local_grads.front().size();
    Vector out = Vector::Zero(d);
    for (int n = 0; n < N; ++n) {
        if (local_grads[static_cast<std::size_t>(n)].size() != d)
            throw ValidationError("gradient dimension mismatch in mac_aggregate");
        out.noalias() += realization.gains[n] * local_grads[static_cast<std::size_t>(n)];
    }
    out /= static_cast<double>(N);
    if (realization.noise.size() != d)
        throw ValidationError("noise dimension does not match gradient dimension");
    out += realization.noise;
    return out;
}

Vector fdm_aggregate(const std::vector<Vector>& local_grads, const ChannelModel& model,
                     RngStream& rng) {
    const int N = static_cast<int>(local_grads.size());
    if (N == 0) throw ValidationError("fdm_aggregate needs at least one gradient");
    const Index d = local_grads.front().size();

    double stddev = std::sqrt(model.sigma_w_sq() / model.energy());
    Vector out = Vector::Zero(d);
    for (int n = 0; n < N; ++n) {
        const Vector& grad = local_grads[static_cast<std::size_t>(n)];
        if (grad.size() != d) throw ValidationError("gradient dimension mismatch in fdm_aggregate");
        double gain = model.sample_gain(rng);
        out.noalias() += gain * grad;
        for (Index i = 0; i < d; ++i) out[i] += rng.gaussian(0.0, stddev);
    }
    return out / static_cast<double>(N);
}

MomentCheckResult moment_check(const ChannelModel& model,
                               const problems::ProblemInstance& problem, const Vector& z,
                               int replications, std::uint64_t seed) {
    if (replications < 1) throw ValidationError("moment_check needs replications >= 1");
    const int N = problem.node_count();
    const Index d = problem.dimension;

    std::vector<Vector> grads;
    grads.reserve(static_cast<std::size_t>(N));
    double local_power_sum = 0.0;
    for (int n = 0; n < N; ++n) {
        grads.push_back(problems::local_gradient(problem, n, z));
        local_power_sum += grads.back().squaredNorm();
    }
    Vector grad_f = Vector::Zero(d);
    for (const auto& g : grads) grad_f += g;
    grad_f /= static_cast<double>(N);

    const Vector analytic_mean = model.mu_h() * grad_f;
    const double analytic_second =
        model.mu_h() * model.mu_h() * grad_f.squaredNorm() +
        model.sigma_h_sq() / (static_cast<double>(N) * N) * local_power_sum +
        static_cast<double>(d) * model.sigma_w_sq() /
            (model.energy() * static_cast<double>(N) * N);

    RngStream rng(seed);
    Vector sum_v = Vector::Zero(d);
    Vector sum_v_sq = Vector::Zero(d);  // per-coordinate, for the mean's SE
    double sum_norm_sq = 0.0;
    double sum_norm_sq_sq = 0.0;
    for (int r = 0; r < replications; ++r) {
        Vector v = mac_aggregate(grads, sample_realization(model, N, d, rng));
        sum_v += v;
        sum_v_sq += v.cwiseProduct(v);
        double nsq = v.squaredNorm();
        sum_norm_sq += nsq;
        sum_norm_sq_sq += nsq * nsq;
    }

    const double R = static_cast<double>(replications);
    Vector mean_v = sum_v / R;
    double mean_norm_sq = sum_norm_sq / R;

    // Relative scale for the mean: the aggregate's own magnitude, so the
    // check stays meaningful when grad F(z) ~ 0 (e.g. z = theta_star).
    double scale = std::max({analytic_mean.norm(), std::sqrt(analytic_second), 1e-300});

    MomentCheckResult result;
    result.mean_error = (mean_v - analytic_mean).norm() / scale;
    // E||mean_v - E v||^2 = sum_i Var(v_i)/R.
    double var_sum = 0.0;
    for (Index i = 0; i < d; ++i) {
        double var_i = std::max(0.0, sum_v_sq[i] / R - mean_v[i] * mean_v[i]);
        var_sum += var_i;
    }
    result.mean_standard_error = std::sqrt(var_sum / R) / scale;

    double scale2 = std::max(analytic_second, 1e-300);
    result.second_moment_error = std::abs(mean_norm_sq - analytic_second) / scale2;
    double var_norm_sq = std::max(0.0, sum_norm_sq_sq / R - mean_norm_sq * mean_norm_sq);
    result.second_moment_standard_error = std::sqrt(var_norm_sq / R) / scale2;
    return result;
}

}  // namespace agma::channel
