#include "wiener/waterfill.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>
#include <vector>

#include "wiener/errors.hpp"

namespace wiener::waterfill {

namespace {

void check_theta(double theta, const char *who) {
    if (!(theta > 0.0 && std::isfinite(theta))) {
        throw DomainError(std::string(who) + ": theta must be positive and finite");
    }
}

void check_lower(double lower, const char *who) {
    if (!(lower >= 0.0 && lower < 1.0)) {
        throw DomainError(std::string(who) + ": lower limit must lie in [0,1)");
    }
}

} // namespace

quad::Result distortion_integral(const SpectralDensity &density, double theta,
                                 quad::Strategy strategy, double lower) {
    check_theta(theta, "distortion_integral");
    check_lower(lower, "distortion_integral");
    const double crossing = density.level_crossing(theta);
    const double cut[] = {crossing};
    return quad::integrate([&](double phi) { return std::min(theta, density(phi)); }, lower, 1.0,
                           cut, strategy);
}

quad::Result rate_integral(const SpectralDensity &density, double theta, quad::Strategy strategy,
                           double lower) {
    check_theta(theta, "rate_integral");
    check_lower(lower, "rate_integral");
    const double crossing = density.level_crossing(theta);
    if (crossing <= lower) return {};
    auto half_log = [&](double phi) {
        return std::max(0.0, 0.5 * std::log2(density(phi) / theta));
    };
    return quad::integrate(half_log, lower, crossing, {}, strategy);
}

quad::Result area_above_water(const SpectralDensity &density, double theta,
                              quad::Strategy strategy, double lower) {
    check_theta(theta, "area_above_water");
    check_lower(lower, "area_above_water");
    const double crossing = density.level_crossing(theta);
    if (crossing <= lower) return {};
    if (density.singular_at_zero() && lower == 0.0) {
        throw DomainError("area_above_water: diverges on (0,1] for a singular density");
    }
    return quad::integrate([&](double phi) { return std::max(0.0, density(phi) - theta); },
                           lower, crossing, {}, strategy);
}

quad::Result weighted_distortion(const SpectralDensity &density, double theta,
                                 const std::function<double(double)> &weight,
                                 quad::Strategy strategy) {
    check_theta(theta, "weighted_distortion");
    const double cut[] = {density.level_crossing(theta)};
    return quad::integrate(
        [&](double phi) { return std::min(theta, density(phi)) * weight(phi); }, 0.0, 1.0, cut,
        strategy);
}

double distortion_at_theta(const SpectralDensity &density, double theta) {
    return distortion_integral(density, theta).value;
}

double rate_at_theta(const SpectralDensity &density, double theta) {
    return rate_integral(density, theta).value;
}

WaterfillPoint solve_theta_for_rate(const SpectralDensity &density, double rate) {
    if (!(rate > 0.0 && std::isfinite(rate))) {
        throw DomainError("solve_theta_for_rate: rate must be positive and finite");
    }
    // rate ~ -1/2 log2 theta seeds the bracket.
    double log_lo = (-2.0 * rate - 8.0) * std::numbers::ln2;
    double log_hi = (-2.0 * rate + 8.0) * std::numbers::ln2;
    auto rate_at_log = [&](double log_theta) { return rate_at_theta(density, std::exp(log_theta)); };

    int doublings = 0;
    while (rate_at_log(log_hi) > rate) {
        if (++doublings > 200) {
            throw NumericalError("solve_theta_for_rate: upper bracket did not straddle");
        }
        log_hi += std::numbers::ln2;
    }
    doublings = 0;
    while (rate_at_log(log_lo) < rate) {
        if (++doublings > 200) {
            throw NumericalError("solve_theta_for_rate: lower bracket did not straddle");
        }
        log_lo -= std::numbers::ln2;
    }
    // rate is decreasing in theta: rate(lo) >= target >= rate(hi).
    while (log_hi - log_lo > 1e-13) {
        const double mid = 0.5 * (log_lo + log_hi);
        if (rate_at_log(mid) > rate) {
            log_lo = mid;
        } else {
            log_hi = mid;
        }
    }
    WaterfillPoint point;
    point.theta = std::exp(0.5 * (log_lo + log_hi));
    point.rate = rate_at_theta(density, point.theta);
    point.distortion = distortion_at_theta(density, point.theta);
    return point;
}

quad::Result integrate_density(const SpectralDensity &density, DensityTransform transform,
                               double lower, quad::Strategy strategy) {
    check_lower(lower, "integrate_density");
    switch (transform.kind) {
    case TransformKind::Identity:
        if (density.singular_at_zero() && lower == 0.0) {
            throw DomainError("integrate_density: identity transform diverges at 0");
        }
        return quad::integrate([&](double phi) { return density(phi); }, lower, 1.0, {},
                               strategy);
    case TransformKind::Reciprocal:
        return quad::integrate([&](double phi) { return 1.0 / density(phi); }, lower, 1.0, {},
                               strategy);
    case TransformKind::ReciprocalWeighted: {
        check_theta(transform.theta, "integrate_density");
        const double theta = transform.theta;
        const double cut[] = {density.level_crossing(theta)};
        return quad::integrate(
            [&](double phi) {
                const double s = density(phi);
                return std::min(theta, s) / s;
            },
            lower, 1.0, cut, strategy);
    }
    }
    return {};
}

WaterfillPoint finite_waterfill(std::span<const double> eigenvalues, double rbar) {
    if (!(rbar > 0.0 && std::isfinite(rbar))) {
        throw DomainError("finite_waterfill: rbar must be positive and finite");
    }
    if (eigenvalues.empty()) {
        throw DomainError("finite_waterfill: no eigenvalues");
    }
    std::vector<double> sorted(eigenvalues.begin(), eigenvalues.end());
    for (double v : sorted) {
        if (!(v > 0.0)) throw DomainError("finite_waterfill: eigenvalues must be positive");
    }
    std::sort(sorted.begin(), sorted.end(), std::greater<>());
    const double n = static_cast<double>(sorted.size());

    // With the m largest active: log theta = (sum_{k<=m} log lambda_k - 2 n rbar ln2)/m.
    double log_sum = 0.0;
    double theta = 0.0;
    for (std::size_t m = 1; m <= sorted.size(); ++m) {
        log_sum += std::log(sorted[m - 1]);
        const double log_theta = (log_sum - 2.0 * n * rbar * std::numbers::ln2) / static_cast<double>(m);
        theta = std::exp(log_theta);
        const bool last = m == sorted.size();
        if (theta < sorted[m - 1] && (last || theta >= sorted[m])) break;
    }
    WaterfillPoint point;
    point.theta = theta;
    double rate = 0.0;
    double distortion = 0.0;
    for (double v : sorted) {
        distortion += std::min(theta, v);
        if (v > theta) rate += 0.5 * std::log2(v / theta);
    }
    point.rate = rate / n;
    point.distortion = distortion / n;
    return point;
}

} // namespace wiener::waterfill
