#include "wiener/drf.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "wiener/errors.hpp"

namespace wiener::drf {

namespace {

using waterfill::WaterfillPoint;

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

void check_rbar(double rbar, const char *who) {
    if (!(rbar >= kMinBitsPerSample && std::isfinite(rbar))) {
        throw DomainError(std::string(who) + ": bits per sample must be >= 1e-4 and finite, got " +
                          std::to_string(rbar));
    }
}

WaterfillPoint solve_shifted(double rbar) {
    return waterfill::solve_theta_for_rate(SpectralDensity::shifted_sampled_wiener(), rbar);
}

WaterfillPoint solve_unshifted(double rbar) {
    return waterfill::solve_theta_for_rate(SpectralDensity::sampled_wiener(), rbar);
}

// (S - 1/6)/S = 1 - (2/3) sin^2(pi phi/2)
double ce_weight(double phi) {
    const double s = std::sin(0.5 * kPi * phi);
    return 1.0 - (2.0 / 3.0) * s * s;
}

double ce_term(double theta) {
    return waterfill::weighted_distortion(SpectralDensity::sampled_wiener(), theta, ce_weight)
        .value;
}

double g_at_theta(double theta) {
    return waterfill::integrate_density(
               SpectralDensity::sampled_wiener(),
               {waterfill::TransformKind::ReciprocalWeighted, theta})
        .value;
}

} // namespace

RateSpec::RateSpec(double bits_per_time) : rate_(bits_per_time) {
    if (!(bits_per_time > 0.0 && std::isfinite(bits_per_time))) {
        throw DomainError("RateSpec: rate must be positive and finite");
    }
}

double border_rbar() { return 0.5 * (1.0 + std::log2(std::sqrt(3.0) + 2.0)); }

double d_w(const RateSpec &rate, double sigma2) {
    if (!(sigma2 > 0.0)) throw DomainError("d_w: sigma2 must be positive");
    return 2.0 * sigma2 / (kPi * kPi * kLn2 * rate.rate());
}

double mmse_fs(const ProcessParams &params) { return params.sigma2() / (6.0 * params.fs()); }

DistortionPoint d_bar(const ProcessParams &params, const RateSpec &rate) {
    const double rbar = rate.bits_per_sample(params);
    check_rbar(rbar, "d_bar");
    const WaterfillPoint point = solve_unshifted(rbar);
    return {params.sample_variance() * point.distortion, point};
}

double d_bar_tilde(double rbar) {
    check_rbar(rbar, "d_bar_tilde");
    return solve_unshifted(rbar).distortion;
}

DistortionPoint d_opt(const ProcessParams &params, const RateSpec &rate) {
    const double rbar = rate.bits_per_sample(params);
    check_rbar(rbar, "d_opt");
    const WaterfillPoint point = solve_shifted(rbar);
    return {mmse_fs(params) + params.sample_variance() * point.distortion, point};
}

double d_tilde(double rbar) {
    check_rbar(rbar, "d_tilde");
    return solve_shifted(rbar).distortion;
}

double equilibrium_rbar() {
    // d_tilde is decreasing; d_tilde(0.5) > 1/6 > d_tilde(1.5).
    double lo = 0.5;
    double hi = 1.5;
    while (hi - lo > 1e-11) {
        const double mid = 0.5 * (lo + hi);
        if (d_tilde(mid) > 1.0 / 6.0) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    return 0.5 * (lo + hi);
}

double g_fun(double rbar) {
    check_rbar(rbar, "g_fun");
    return g_at_theta(solve_unshifted(rbar).theta);
}

DistortionPoint d_ce(const ProcessParams &params, const RateSpec &rate) {
    const double rbar = rate.bits_per_sample(params);
    check_rbar(rbar, "d_ce");
    const WaterfillPoint point = solve_unshifted(rbar);
    return {mmse_fs(params) + params.sample_variance() * ce_term(point.theta), point};
}

double d_ce_tilde(double rbar) {
    check_rbar(rbar, "d_ce_tilde");
    return ce_term(solve_unshifted(rbar).theta);
}

double d_ce_assembled(const ProcessParams &params, const RateSpec &rate) {
    const double rbar = rate.bits_per_sample(params);
    check_rbar(rbar, "d_ce_assembled");
    const WaterfillPoint point = solve_unshifted(rbar);
    const double g = g_at_theta(point.theta);
    // mmse + (2/3) D + (1/3)(D - G/2) = mmse + D - G/6
    const double d = point.distortion;
    return mmse_fs(params) +
           params.sample_variance() * ((2.0 / 3.0) * d + (1.0 / 3.0) * (d - 0.5 * g));
}

double d_upper(const ProcessParams &params, const RateSpec &rate) {
    return mmse_fs(params) + d_bar(params, rate).distortion;
}

double cross_moment_limit(double rbar) {
    check_rbar(rbar, "cross_moment_limit");
    const WaterfillPoint point = solve_unshifted(rbar);
    return point.distortion - 0.5 * g_at_theta(point.theta);
}

double ratio_smp(double rbar) {
    return 0.5 * kPi * kPi * kLn2 * rbar * (1.0 / 6.0 + d_tilde(rbar));
}

double ratio_smp(const ProcessParams &params, const RateSpec &rate) {
    return ratio_smp(rate.bits_per_sample(params));
}

double ratio_qnt(double rbar) { return 1.0 + 6.0 * d_tilde(rbar); }

double ratio_qnt(const ProcessParams &params, const RateSpec &rate) {
    return ratio_qnt(rate.bits_per_sample(params));
}

double ce_penalty(double rbar) {
    return (1.0 / 6.0 + d_ce_tilde(rbar)) / (1.0 / 6.0 + d_tilde(rbar));
}

double ce_penalty(const ProcessParams &params, const RateSpec &rate) {
    return ce_penalty(rate.bits_per_sample(params));
}

double idrf_low_rate(const ProcessParams &params, const RateSpec &rate) {
    const double rbar = rate.bits_per_sample(params);
    return params.sample_variance() *
           (1.0 / 6.0 + (2.0 + std::sqrt(3.0)) / 6.0 * std::exp2(-2.0 * rbar));
}

double d_ce_low_rate(const ProcessParams &params, const RateSpec &rate) {
    const double rbar = rate.bits_per_sample(params);
    return mmse_fs(params) + (2.0 / 3.0) * params.sample_variance() * std::exp2(-2.0 * rbar);
}

double d_upper_low_rate(const ProcessParams &params, const RateSpec &rate) {
    const double rbar = rate.bits_per_sample(params);
    return params.sample_variance() * (1.0 / 6.0 + std::exp2(-2.0 * rbar));
}

ExpansionCoefficients high_rate_coefficients(Curve curve) {
    const double first = 2.0 / (kPi * kPi * kLn2);
    switch (curve) {
    case Curve::DiscreteWiener:
        return {first, -kLn2 / 18.0};
    case Curve::Optimal:
        return {first, kLn2 / 18.0};
    case Curve::CompressEstimate:
        return {first, kLn2 / 18.0};
    }
    return {};
}

DistortionBundle bundle(const ProcessParams &params, const RateSpec &rate) {
    const double rbar = rate.bits_per_sample(params);
    check_rbar(rbar, "bundle");
    const WaterfillPoint shifted = solve_shifted(rbar);
    const WaterfillPoint unshifted = solve_unshifted(rbar);
    const double scale = params.sample_variance();
    DistortionBundle out;
    out.mmse = mmse_fs(params);
    out.d_w = d_w(rate, params.sigma2());
    out.d_opt = out.mmse + scale * shifted.distortion;
    out.d_bar = scale * unshifted.distortion;
    out.d_ce = out.mmse + scale * ce_term(unshifted.theta);
    out.d_upper = out.mmse + out.d_bar;
    out.theta_opt = shifted.theta;
    out.theta_ce = unshifted.theta;
    return out;
}

} // namespace wiener::drf
