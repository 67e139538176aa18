// Distortion functions of the sampled Wiener process.
//
// Absolute distortions are per unit time in units of sigma^2. Functions of
// rbar alone (d_tilde, g_fun, ratios) are dimensionless.
#pragma once

#include "wiener/spectral.hpp"
#include "wiener/waterfill.hpp"

namespace wiener::drf {

/// Bitrate R in bits per unit time.
class RateSpec {
  public:
    /// Throws DomainError unless rate > 0 and finite.
    explicit RateSpec(double bits_per_time);

    double rate() const noexcept { return rate_; }
    /// rbar = R/fs.
    double bits_per_sample(const ProcessParams &params) const noexcept { return rate_ / params.fs(); }

  private:
    double rate_;
};

/// Rates below this many bits per sample are rejected: the distortion
/// diverges and quadrature loses accuracy.
inline constexpr double kMinBitsPerSample = 1e-4;

/// (1 + log2(sqrt(3) + 2))/2: above this rbar the optimal water level lies
/// below 1/12 and d_opt has the closed form idrf_low_rate.
double border_rbar();

/// A distortion together with the waterfilling point that produced it.
struct DistortionPoint {
    double distortion = 0.0;
    waterfill::WaterfillPoint point; ///< normalized (units of sigma^2/fs)
};

/// Shannon DRF of the Wiener process, 2 sigma^2 / (pi^2 ln2 R).
double d_w(const RateSpec &rate, double sigma2);

/// DRF of the sampled (discrete-time) process, per unit time.
DistortionPoint d_bar(const ProcessParams &params, const RateSpec &rate);

/// sigma^2 / (6 fs): error of the linear-interpolation estimate.
double mmse_fs(const ProcessParams &params);

/// Indirect DRF D(fs, R): mmse plus waterfilling over S_bar - 1/6.
DistortionPoint d_opt(const ProcessParams &params, const RateSpec &rate);

/// Normalized lossy term: d_opt = (sigma^2/fs)(1/6 + d_tilde(R/fs)).
double d_tilde(double rbar);

/// Solution of d_tilde(rbar) = 1/6 (bisection to 1e-10).
double equilibrium_rbar();

/// G(rbar) = int min{S_bar, theta}/S_bar, theta on the unshifted density.
double g_fun(double rbar);

/// Distortion of compress-and-estimate coding (direct integral).
DistortionPoint d_ce(const ProcessParams &params, const RateSpec &rate);

/// The same quantity assembled as mmse + d_bar - (sigma^2/fs) G/6.
double d_ce_assembled(const ProcessParams &params, const RateSpec &rate);

/// Normalized CE lossy term: d_ce = (sigma^2/fs)(1/6 + d_ce_tilde(R/fs)).
double d_ce_tilde(double rbar);

/// Normalized discrete DRF: d_bar = (sigma^2/fs) d_bar_tilde(R/fs).
double d_bar_tilde(double rbar);

/// mmse + d_bar.
double d_upper(const ProcessParams &params, const RateSpec &rate);

/// Limit of the mean lag-1 sample-error cross moment under CE coding,
/// d_bar_tilde - G/2 (normalized).
double cross_moment_limit(double rbar);

/// d_opt / d_w = (pi^2 ln2 / 2) rbar (1/6 + d_tilde).
double ratio_smp(double rbar);
double ratio_smp(const ProcessParams &params, const RateSpec &rate);

/// d_opt / mmse = 1 + 6 d_tilde.
double ratio_qnt(double rbar);
double ratio_qnt(const ProcessParams &params, const RateSpec &rate);

/// d_ce / d_opt.
double ce_penalty(double rbar);
double ce_penalty(const ProcessParams &params, const RateSpec &rate);

// -----------------------------------------------------------------------------
// Closed forms
// -----------------------------------------------------------------------------

/// (sigma^2/fs)(1/6 + (2+sqrt 3)/6 2^(-2 rbar)); equals d_opt for rbar >= border_rbar().
double idrf_low_rate(const ProcessParams &params, const RateSpec &rate);

/// mmse + (2/3)(sigma^2/fs) 2^(-2 rbar); equals d_ce for rbar >= 1.
double d_ce_low_rate(const ProcessParams &params, const RateSpec &rate);

/// (sigma^2/fs)(1/6 + 2^(-2 rbar)); equals d_upper for rbar >= 1.
double d_upper_low_rate(const ProcessParams &params, const RateSpec &rate);

// -----------------------------------------------------------------------------
// High sampling-rate expansions
// -----------------------------------------------------------------------------

enum class Curve { DiscreteWiener, Optimal, CompressEstimate };

/// D(fs, R) = sigma^2 (first / R + second R / fs^2) + O(fs^-4) for fs >> R.
struct ExpansionCoefficients {
    double first = 0.0;
    double second = 0.0;
};

/// Coefficients derived by expanding the waterfilling integrals around a small
/// crossing point phi*. All three curves share first = 2/(pi^2 ln2); the
/// second-order terms are -ln2/18 (discrete), +ln2/18 (optimal) and
/// +ln2/18 (compress-and-estimate).
ExpansionCoefficients high_rate_coefficients(Curve curve);

// -----------------------------------------------------------------------------
// Bundle
// -----------------------------------------------------------------------------

struct DistortionBundle {
    double d_opt = 0.0;
    double d_ce = 0.0;
    double d_upper = 0.0;
    double d_w = 0.0;
    double d_bar = 0.0;
    double mmse = 0.0;
    double theta_opt = 0.0; ///< water level on S_bar - 1/6
    double theta_ce = 0.0;  ///< water level on S_bar (shared by d_bar, d_ce, d_upper)
};

/// All distortions at one (fs, R), each water level solved once.
DistortionBundle bundle(const ProcessParams &params, const RateSpec &rate);

} // namespace wiener::drf
