#pragma once

#include "agma/problems.hpp"
#include "agma/rng.hpp"
#include "agma/types.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace agma::channel {

enum class GainFamily { Rayleigh, Uniform, Constant };

std::string to_string(GainFamily family);

/**
 * Block-fading channel with receiver noise.
 *
 * Gains h_{n,k} are i.i.d. non-negative with mean mu_h and variance
 * sigma_h_sq, redrawn independently every iteration and node. The receiver
 * noise after matched filtering and averaging over the MAC has per-coordinate
 * variance sigma_w_sq / (N^2 * energy), with energy the transmit power
 * coefficient E_N.
 *
 * Construct via the factories; (mu_h, sigma_h_sq) always equal the analytic
 * moments of the configured gain distribution.
 */
class ChannelModel {
public:
    /// Rayleigh fading with the given mean gain. The variance is then fixed
    /// by the distribution: sigma_h_sq = (4/pi - 1) * mu_h^2.
    static ChannelModel rayleigh(double mu_h, double sigma_w_sq, double energy);

    /// Rayleigh, validating that the requested variance matches the
    /// distribution's fixed coefficient of variation (within 1e-12 relative).
    static ChannelModel rayleigh_from_moments(double mu_h, double sigma_h_sq,
                                              double sigma_w_sq, double energy);

    /// Uniform gains on [lo, hi], lo >= 0.
    static ChannelModel uniform(double lo, double hi, double sigma_w_sq, double energy);

    /// Uniform gains matching arbitrary (mu_h, sigma_h_sq), provided the
    /// implied lower endpoint mu_h - sqrt(3 sigma_h_sq) is non-negative.
    static ChannelModel uniform_from_moments(double mu_h, double sigma_h_sq,
                                             double sigma_w_sq, double energy);

    /// Degenerate constant gain c >= 0 (sigma_h_sq = 0).
    static ChannelModel constant(double c, double sigma_w_sq, double energy);

    GainFamily gain_family() const { return family_; }
    double mu_h() const { return mu_h_; }
    double sigma_h_sq() const { return sigma_h_sq_; }
    double sigma_w_sq() const { return sigma_w_sq_; }
    double energy() const { return energy_; }

    /// Distribution parameters: Rayleigh scale, Uniform endpoints, or the
    /// constant value (param_b unused except for Uniform).
    double param_a() const { return param_a_; }
    double param_b() const { return param_b_; }

    double sample_gain(RngStream& rng) const;

    /// Copy with a different power coefficient / noise variance (sweeps).
    ChannelModel with_energy(double energy) const;
    ChannelModel with_sigma_w_sq(double sigma_w_sq) const;

private:
    ChannelModel(GainFamily family, double a, double b, double mu_h, double sigma_h_sq,
                 double sigma_w_sq, double energy);

    GainFamily family_;
    double param_a_;
    double param_b_;
    double mu_h_;
    double sigma_h_sq_;
    double sigma_w_sq_;
    double energy_;
};

/// One iteration's channel state: per-node gains and the receiver noise.
struct ChannelRealization {
    Vector gains;  // length N, entrywise >= 0
    Vector noise;  // length d, N(0, sigma_w_sq/(N^2 energy) I)
};

/// Draws gains and MAC receiver noise for one iteration.
ChannelRealization sample_realization(const ChannelModel& model, int nodes, Index dimension,
                                      RngStream& rng);

/// v = (1/N) sum_n h_n g_n + w  (over-the-air superposition).
Vector mac_aggregate(const std::vector<Vector>& local_grads, const ChannelRealization& realization);

/**
 * Orthogonal-channel baseline: each node's gradient rides its own fading
 * channel with phase correction and its own receiver noise of per-coordinate
 * variance sigma_w_sq / energy; the PS averages the N signals, so the
 * effective noise variance is sigma_w_sq / (N * energy) per coordinate.
 */
Vector fdm_aggregate(const std::vector<Vector>& local_grads, const ChannelModel& model,
                     RngStream& rng);

/**
 * Monte Carlo check of the aggregate's analytic moments at a fixed point z:
 *   E[v]      = mu_h * grad F(z)
 *   E[||v||^2] = mu_h^2 ||grad F(z)||^2 + (sigma_h_sq/N^2) sum_n ||grad f_n(z)||^2
 *                + d sigma_w_sq / (energy N^2)
 *
 * Errors are relative deviations; each comes with its estimated Monte Carlo
 * standard error on the same relative scale.
 */
struct MomentCheckResult {
    double mean_error = 0.0;
    double mean_standard_error = 0.0;
    double second_moment_error = 0.0;
    double second_moment_standard_error = 0.0;
};

MomentCheckResult moment_check(const ChannelModel& model, const problems::ProblemInstance& problem,
                               const Vector& z, int replications, std::uint64_t seed);

}  // namespace agma::channel
