#include "wiener/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <string>

#include "wiener/errors.hpp"

namespace wiener {

namespace {

constexpr double kPi = std::numbers::pi;

// Denominators of the interpolated-kernel eigenvalue formula below this
// magnitude are treated as a numerical failure.
constexpr double kDegenerateDenominator = 1e-12;

void check_phi(double phi, const char *who) {
    if (!(phi > 0.0 && phi <= 1.0)) {
        throw DomainError(std::string(who) + ": phi must lie in (0,1], got " +
                          std::to_string(phi));
    }
}

} // namespace

ProcessParams::ProcessParams(double sigma2, double fs) : sigma2_(sigma2), fs_(fs) {
    if (!(std::isfinite(sigma2) && sigma2 > 0.0)) {
        throw DomainError("ProcessParams: sigma2 must be positive and finite");
    }
    if (!(std::isfinite(fs) && fs > 0.0)) {
        throw DomainError("ProcessParams: fs must be positive and finite");
    }
}

double s_bar(double phi) {
    check_phi(phi, "s_bar");
    const double s = std::sin(0.5 * kPi * phi);
    return 1.0 / (4.0 * s * s);
}

double s_tilde_density(double phi) {
    check_phi(phi, "s_tilde_density");
    return s_bar(phi) - 1.0 / 6.0;
}

// -----------------------------------------------------------------------------
// SpectralDensity
// -----------------------------------------------------------------------------

SpectralDensity SpectralDensity::sampled_wiener() {
    return SpectralDensity(DensityKind::SampledWiener, 0.0);
}

SpectralDensity SpectralDensity::shifted_sampled_wiener() {
    return SpectralDensity(DensityKind::ShiftedSampledWiener, 0.0);
}

SpectralDensity SpectralDensity::constant(double value) {
    if (!(std::isfinite(value) && value > 0.0)) {
        throw DomainError("SpectralDensity::constant: value must be positive");
    }
    return SpectralDensity(DensityKind::Constant, value);
}

double SpectralDensity::operator()(double phi) const {
    switch (kind_) {
    case DensityKind::SampledWiener:
        return s_bar(phi);
    case DensityKind::ShiftedSampledWiener:
        return s_tilde_density(phi);
    case DensityKind::Constant:
        check_phi(phi, "SpectralDensity::constant");
        return value_;
    }
    return 0.0;
}

double SpectralDensity::infimum() const noexcept {
    switch (kind_) {
    case DensityKind::SampledWiener:
        return 0.25;
    case DensityKind::ShiftedSampledWiener:
        return 0.25 - 1.0 / 6.0;
    case DensityKind::Constant:
        return value_;
    }
    return 0.0;
}

double SpectralDensity::level_crossing(double level) const noexcept {
    if (kind_ == DensityKind::Constant) {
        return value_ >= level ? 1.0 : 0.0;
    }
    // s_bar(phi) = c  <=>  sin(pi phi/2) = 1/(2 sqrt(c))
    const double c = kind_ == DensityKind::SampledWiener ? level : level + 1.0 / 6.0;
    if (c <= 0.25) return 1.0;
    return 2.0 / kPi * std::asin(0.5 / std::sqrt(c));
}

// -----------------------------------------------------------------------------
// EigenSystem
// -----------------------------------------------------------------------------

double EigenSystem::eigenvalue(std::size_t k) const {
    if (k < 1 || k > size()) {
        throw DomainError("EigenSystem: index k out of range");
    }
    return eigenvalues_[k - 1];
}

std::size_t EigenSystem::source_index(std::size_t k) const {
    if (k < 1 || k > size()) {
        throw DomainError("EigenSystem: index k out of range");
    }
    return order_[k - 1];
}

double EigenSystem::vector_entry(std::size_t k, std::size_t m) const {
    if (kind_ != EigenKind::DiscreteWiener) {
        throw DomainError("EigenSystem::vector_entry: not a discrete eigen-system");
    }
    const std::size_t j = source_index(k);
    if (m < 1 || m > size()) {
        throw DomainError("EigenSystem::vector_entry: index m out of range");
    }
    const double n = static_cast<double>(size());
    const double arg = (2.0 * static_cast<double>(j) - 1.0) * kPi * static_cast<double>(m) /
                       (2.0 * n + 1.0);
    return normalization_[j - 1] * std::sin(arg);
}

double EigenSystem::scaled_normalization(std::size_t k) const {
    if (kind_ != EigenKind::DiscreteWiener) {
        throw DomainError("EigenSystem::scaled_normalization: not a discrete eigen-system");
    }
    const double a = normalization_[source_index(k) - 1];
    return static_cast<double>(size()) * a * a;
}

double EigenSystem::eigenfunction_node(std::size_t k, std::size_t m) const {
    if (kind_ != EigenKind::InterpKernel) {
        throw DomainError("EigenSystem::eigenfunction_node: not an interpolation kernel system");
    }
    const std::size_t j = source_index(k);
    if (m > size()) {
        throw DomainError("EigenSystem::eigenfunction_node: node index out of range");
    }
    const double n = static_cast<double>(size());
    const double arg = (2.0 * static_cast<double>(j) - 1.0) * kPi * static_cast<double>(m) /
                       (2.0 * n);
    return normalization_[j - 1] * std::sin(arg);
}

double EigenSystem::eigenfunction(std::size_t k, double t) const {
    if (kind_ != EigenKind::InterpKernel) {
        throw DomainError("EigenSystem::eigenfunction: not an interpolation kernel system");
    }
    const double horizon_t = horizon();
    if (!(t >= 0.0 && t <= horizon_t * (1.0 + 1e-14))) {
        throw DomainError("EigenSystem::eigenfunction: t outside [0, n Ts]");
    }
    const double u = t / ts_;
    auto left = static_cast<std::size_t>(std::floor(u));
    if (left >= size()) left = size() - 1;
    const double x = std::clamp(u - static_cast<double>(left), 0.0, 1.0);
    return (1.0 - x) * eigenfunction_node(k, left) + x * eigenfunction_node(k, left + 1);
}

EigenSystem discrete_wiener_eigensystem(const ProcessParams &params, std::size_t n) {
    if (n == 0) {
        throw DomainError("discrete_wiener_eigensystem: n must be >= 1");
    }
    EigenSystem system(EigenKind::DiscreteWiener, params.ts());
    const double dn = static_cast<double>(n);
    system.eigenvalues_.resize(n);
    system.order_.resize(n);
    // sum_{m=1}^n sin^2((2k-1) pi m/(2n+1)) = (2n+1)/4 for every k
    system.normalization_.assign(n, 2.0 / std::sqrt(2.0 * dn + 1.0));
    for (std::size_t k = 1; k <= n; ++k) {
        const double s =
            std::sin((2.0 * static_cast<double>(k) - 1.0) * kPi / (2.0 * (2.0 * dn + 1.0)));
        system.eigenvalues_[k - 1] = params.sample_variance() / (4.0 * s * s);
        system.order_[k - 1] = k;
    }
    return system;
}

EigenSystem interp_kernel_eigensystem(const ProcessParams &params, std::size_t n) {
    if (n == 0) {
        throw DomainError("interp_kernel_eigensystem: n must be >= 1");
    }
    EigenSystem system(EigenKind::InterpKernel, params.ts());
    const double dn = static_cast<double>(n);
    const double scale = params.sigma2() * params.ts() * params.ts() / 6.0;

    std::vector<double> raw(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double dk = static_cast<double>(k);
        const double c = std::cos(dk * kPi);
        const double s = std::sin((2.0 * dk - 1.0) * (dn - 1.0) * kPi / (2.0 * dn));
        const double denominator = c + s;
        if (std::abs(denominator) < kDegenerateDenominator) {
            throw NumericalError("interp_kernel_eigensystem: degenerate denominator " +
                                 std::to_string(denominator) + " at k=" + std::to_string(k) +
                                 ", n=" + std::to_string(n));
        }
        raw[k - 1] = std::abs(scale * (2.0 * c - s) / denominator);
    }

    system.order_.resize(n);
    std::iota(system.order_.begin(), system.order_.end(), std::size_t{1});
    std::stable_sort(system.order_.begin(), system.order_.end(),
                     [&](std::size_t a, std::size_t b) { return raw[a - 1] > raw[b - 1]; });
    system.eigenvalues_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        system.eigenvalues_[i] = raw[system.order_[i] - 1];
    }

    // Unit L2 norm on [0, n Ts]: each interval contributes Ts (a^2 + ab + b^2)/3.
    system.normalization_.resize(n);
    for (std::size_t k = 1; k <= n; ++k) {
        const double freq = (2.0 * static_cast<double>(k) - 1.0) * kPi / (2.0 * dn);
        double norm2 = 0.0;
        for (std::size_t m = 0; m < n; ++m) {
            const double a = std::sin(freq * static_cast<double>(m));
            const double b = std::sin(freq * static_cast<double>(m + 1));
            norm2 += (a * a + a * b + b * b) / 3.0;
        }
        norm2 *= params.ts();
        system.normalization_[k - 1] = 1.0 / std::sqrt(norm2);
    }
    return system;
}

// -----------------------------------------------------------------------------
// Kernels
// -----------------------------------------------------------------------------

double bridge_covariance(const ProcessParams &params, double t, double s) {
    const double ts = params.ts();
    const double lo = std::min(t, s);
    const double hi = std::max(t, s);
    const double left = std::floor(lo / ts) * ts;
    const double right = left + ts;
    if (hi > right) return 0.0;
    const double value = params.sigma2() / ts * (right - hi) * (lo - left);
    return std::max(value, 0.0);
}

double interp_kernel(const ProcessParams &params, double t, double s) {
    return params.sigma2() * std::min(t, s) - bridge_covariance(params, t, s);
}

KernelGrid::KernelGrid(const ProcessParams &params, std::size_t intervals,
                       std::size_t points_per_interval)
    : params_(params), intervals_(intervals), per_interval_(points_per_interval) {
    if (intervals == 0 || points_per_interval < 1) {
        throw DomainError("KernelGrid: need at least one interval and one point per interval");
    }
    const std::size_t count = intervals * points_per_interval + 1;
    const double h = params.ts() / static_cast<double>(points_per_interval);
    nodes_.resize(count);
    weights_.assign(count, h);
    for (std::size_t i = 0; i < count; ++i) nodes_[i] = static_cast<double>(i) * h;
    weights_.front() = 0.5 * h;
    weights_.back() = 0.5 * h;
}

void KernelGrid::apply(std::span<const double> f, std::span<double> out) const {
    const std::size_t count = size();
    if (f.size() != count || out.size() != count) {
        throw DomainError("KernelGrid::apply: vector length does not match the grid");
    }
    const double sigma2 = params_.sigma2();

    // sigma^2 sum_j w_j min(t_i, t_j) f_j = sigma^2 (sum_{j<=i} w_j t_j f_j + t_i sum_{j>i} w_j f_j)
    double suffix = 0.0;
    for (std::size_t j = 0; j < count; ++j) suffix += weights_[j] * f[j];
    double prefix = 0.0;
    for (std::size_t i = 0; i < count; ++i) {
        prefix += weights_[i] * nodes_[i] * f[i];
        suffix -= weights_[i] * f[i];
        out[i] = sigma2 * (prefix + nodes_[i] * suffix);
    }

    // Brownian-bridge part: only interior points of a common interval interact.
    const double ts = params_.ts();
    for (std::size_t p = 0; p < intervals_; ++p) {
        const std::size_t base = p * per_interval_;
        const double left = nodes_[base];
        const double right = left + ts;
        for (std::size_t a = 1; a < per_interval_; ++a) {
            const double t = nodes_[base + a];
            double acc = 0.0;
            for (std::size_t b = 1; b < per_interval_; ++b) {
                const double s = nodes_[base + b];
                const double lo = a < b ? t : s;
                const double hi = a < b ? s : t;
                acc += weights_[base + b] * (right - hi) * (lo - left) * f[base + b];
            }
            out[base + a] -= sigma2 / ts * acc;
        }
    }
}

double fredholm_residual(const EigenSystem &system, const ProcessParams &params, std::size_t k,
                         std::size_t grid_points) {
    if (system.kind() != EigenKind::InterpKernel) {
        throw DomainError("fredholm_residual: requires an interpolation-kernel eigen-system");
    }
    if (k < 1 || k > system.size()) {
        throw DomainError("fredholm_residual: k out of range");
    }
    if (grid_points < 50) {
        throw DomainError("fredholm_residual: need at least 50 grid points per interval");
    }
    if (std::abs(system.horizon() - static_cast<double>(system.size()) * params.ts()) >
        1e-12 * system.horizon()) {
        throw DomainError("fredholm_residual: params do not match the eigen-system");
    }
    const KernelGrid grid(params, system.size(), grid_points);
    std::vector<double> phi(grid.size());
    const auto nodes = grid.nodes();
    for (std::size_t i = 0; i < grid.size(); ++i) {
        phi[i] = system.eigenfunction(k, std::min(nodes[i], system.horizon()));
    }
    std::vector<double> image(grid.size());
    grid.apply(phi, image);
    const double lambda = system.eigenvalue(k);
    double residual = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
        residual = std::max(residual, std::abs(lambda * phi[i] - image[i]));
    }
    return residual;
}

} // namespace wiener
