// Reverse waterfilling over a spectral density on (0,1].
//
// For a water level theta the parametric pair is
//   D(theta) = int_0^1 min{theta, S(phi)} dphi
//   R(theta) = 1/2 int_0^1 log2+ [S(phi)/theta] dphi      (bits per sample)
// Distortions are dimensionless here; callers scale by sigma^2/fs.
#pragma once

#include <functional>
#include <span>

#include "wiener/quadrature.hpp"
#include "wiener/spectral.hpp"

namespace wiener::waterfill {

/// A consistent (theta, rate, distortion) triple on one parametric curve.
struct WaterfillPoint {
    double theta = 0.0;
    double rate = 0.0;       ///< bits per sample
    double distortion = 0.0; ///< in units of sigma^2/fs
};

/// int_lower^1 min{theta, S} dphi with its error estimate.
quad::Result distortion_integral(const SpectralDensity &density, double theta,
                                 quad::Strategy strategy = quad::Strategy::GradedGaussLegendre,
                                 double lower = 0.0);

/// 1/2 int_lower^1 log2+ [S/theta] dphi with its error estimate.
quad::Result rate_integral(const SpectralDensity &density, double theta,
                           quad::Strategy strategy = quad::Strategy::GradedGaussLegendre,
                           double lower = 0.0);

/// int_lower^1 (S - theta)+ dphi: the part of the density above the water.
quad::Result area_above_water(const SpectralDensity &density, double theta,
                              quad::Strategy strategy = quad::Strategy::GradedGaussLegendre,
                              double lower = 0.0);

/// int_0^1 min{theta, S(phi)} w(phi) dphi for a bounded weight w.
quad::Result weighted_distortion(const SpectralDensity &density, double theta,
                                 const std::function<double(double)> &weight,
                                 quad::Strategy strategy = quad::Strategy::GradedGaussLegendre);

/// Throws DomainError for theta <= 0.
double distortion_at_theta(const SpectralDensity &density, double theta);
double rate_at_theta(const SpectralDensity &density, double theta);

/// Inverts rate_at_theta by bisection on log theta (relative tolerance 1e-12).
/// Throws DomainError for rate <= 0 and NumericalError if the initial bracket
/// [2^(-2r-8), 2^(-2r+8)] does not straddle after 200 doublings.
WaterfillPoint solve_theta_for_rate(const SpectralDensity &density, double rate_bits_per_sample);

enum class TransformKind {
    Identity,           ///< S
    Reciprocal,         ///< 1/S
    ReciprocalWeighted, ///< min{theta, S}/S
};

struct DensityTransform {
    TransformKind kind = TransformKind::Identity;
    double theta = 0.0; ///< used by ReciprocalWeighted only
};

/// int_lower^1 transform(S(phi)) dphi. Identity on a singular density
/// requires lower > 0.
quad::Result integrate_density(const SpectralDensity &density, DensityTransform transform,
                               double lower = 0.0,
                               quad::Strategy strategy = quad::Strategy::GradedGaussLegendre);

// -----------------------------------------------------------------------------
// Finite waterfilling
// -----------------------------------------------------------------------------

/// Waterfilling over a finite set of variances at rbar bits per component:
/// rbar = (1/n) sum_k 1/2 log2+ (lambda_k/theta), distortion = (1/n) sum_k min{theta, lambda_k}.
/// Solved exactly over the active set. Throws DomainError for rbar <= 0 or
/// non-positive eigenvalues.
WaterfillPoint finite_waterfill(std::span<const double> eigenvalues, double rbar);

} // namespace wiener::waterfill
