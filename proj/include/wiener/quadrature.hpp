// Adaptive quadrature on sub-intervals of [0,1] with an integrable
// singularity allowed at 0.
#pragma once

#include <functional>
#include <span>

namespace wiener::quad {

enum class Strategy {
    /// phi = u^2 substitution, composite 32-point Gauss-Legendre panels on u,
    /// adaptive bisection. Default.
    GradedGaussLegendre,
    /// Adaptive Gauss-Kronrod 7/15 directly on phi. Cross-check only.
    PlainAdaptive,
};

struct Options {
    double abs_tol = 1e-10;
    double rel_tol = 1e-13;
    int max_depth = 64;
    /// Reported error above max(fail_abs, fail_rel |value|) throws QuadratureError.
    double fail_abs = 1e-9;
    double fail_rel = 1e-12;
};

struct Result {
    double value = 0.0;
    double error = 0.0; ///< a-posteriori estimate (sum of per-panel refinement deltas)
    int panels = 0;
};

/// Integrates f over [a,b] (0 <= a < b) with mandatory panel boundaries at
/// every breakpoint strictly inside (a,b). f is never evaluated at a or b.
Result integrate(const std::function<double(double)> &f, double a, double b,
                 std::span<const double> breakpoints = {},
                 Strategy strategy = Strategy::GradedGaussLegendre, const Options &options = {});

} // namespace wiener::quad
