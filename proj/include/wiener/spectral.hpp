// Spectral densities and finite-rank Karhunen-Loeve eigen-systems of the
// sampled Wiener process and of its linear interpolation.
#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace wiener {

// =============================================================================
// Process parameters
// =============================================================================

/// Intensity sigma^2 and sampling rate f_s of the sampled Wiener model.
/// The covariance of the process is sigma^2 min{t,s}.
class ProcessParams {
  public:
    /// Throws DomainError unless sigma2 > 0 and fs > 0 (both finite).
    ProcessParams(double sigma2, double fs);

    double sigma2() const noexcept { return sigma2_; }
    double fs() const noexcept { return fs_; }

    /// Sampling interval T_s = 1/f_s.
    double ts() const noexcept { return 1.0 / fs_; }

    /// Variance of one increment between samples, sigma^2/f_s. This is the
    /// unit in which normalized distortions are expressed.
    double sample_variance() const noexcept { return sigma2_ / fs_; }

  private:
    double sigma2_;
    double fs_;
};

// =============================================================================
// Densities on (0,1]
// =============================================================================

/// 1/(4 sin^2(pi phi / 2)): asymptotic eigenvalue density of the min{i,j}
/// matrix. Throws DomainError for phi outside (0,1].
double s_bar(double phi);

/// s_bar(phi) - 1/6: asymptotic eigenvalue density of the interpolated
/// process, in units of sigma^2 Ts^2. Throws DomainError outside (0,1].
double s_tilde_density(double phi);

enum class DensityKind { SampledWiener, ShiftedSampledWiener, Constant };

/// A non-increasing density on (0,1] over which waterfilling integrates.
/// Constant exists only as a test stub.
class SpectralDensity {
  public:
    static SpectralDensity sampled_wiener();
    static SpectralDensity shifted_sampled_wiener();
    static SpectralDensity constant(double value);

    DensityKind kind() const noexcept { return kind_; }

    /// Evaluates the density; phi must lie in (0,1].
    double operator()(double phi) const;

    /// Infimum over (0,1], attained at phi = 1.
    double infimum() const noexcept;

    /// True if the density diverges at 0+.
    bool singular_at_zero() const noexcept { return kind_ != DensityKind::Constant; }

    /// Largest phi* in [0,1] with density(phi) >= level on (0, phi*].
    /// Closed form; used to split integrals at the water-level kink.
    double level_crossing(double level) const noexcept;

  private:
    SpectralDensity(DensityKind kind, double value) : kind_(kind), value_(value) {}

    DensityKind kind_;
    double value_;
};

// =============================================================================
// Eigen-systems
// =============================================================================

enum class EigenKind {
    DiscreteWiener, ///< covariance (sigma^2/fs) min{i,j}, i,j = 1..n
    InterpKernel    ///< kernel K_W~(t,s) of the interpolated process on [0, n Ts]
};

/// Finite-n eigenvalues (decreasing, positive) of a covariance, plus closed-form
/// access to the eigenvectors (discrete) or eigenfunctions (interpolated kernel).
class EigenSystem {
  public:
    EigenKind kind() const noexcept { return kind_; }
    std::size_t size() const noexcept { return eigenvalues_.size(); }
    std::span<const double> eigenvalues() const noexcept { return eigenvalues_; }

    /// k-th eigenvalue, 1-based, in decreasing order.
    double eigenvalue(std::size_t k) const;

    /// Discrete only: entry m (1..n) of the unit-norm k-th eigenvector,
    /// u_{k,m} = A_k sin((2k-1) pi m / (2n+1)).
    double vector_entry(std::size_t k, std::size_t m) const;

    /// Discrete only: n A_k^2, which tends to 2 as n grows.
    double scaled_normalization(std::size_t k) const;

    /// InterpKernel only: k-th eigenfunction at t in [0, n Ts], normalized to
    /// unit L2 norm. Piecewise linear between sampling instants.
    double eigenfunction(std::size_t k, double t) const;

    /// InterpKernel only: node value of the k-th eigenfunction at t = m Ts.
    double eigenfunction_node(std::size_t k, std::size_t m) const;

    /// Horizon n Ts of the interpolated kernel (n/fs for both kinds).
    double horizon() const noexcept { return static_cast<double>(size()) * ts_; }

  private:
    friend EigenSystem discrete_wiener_eigensystem(const ProcessParams &, std::size_t);
    friend EigenSystem interp_kernel_eigensystem(const ProcessParams &, std::size_t);

    EigenSystem(EigenKind kind, double ts) : kind_(kind), ts_(ts) {}

    // Position of the k-th sorted eigenvalue in the closed-form index order.
    std::size_t source_index(std::size_t k) const;

    EigenKind kind_;
    double ts_;
    std::vector<double> eigenvalues_;
    std::vector<std::size_t> order_;     // sorted position -> formula index (1-based)
    std::vector<double> normalization_;  // per formula index
};

/// Closed-form eigen-system of the n x n matrix (sigma^2/fs) min{i,j}.
/// Throws DomainError for n == 0.
EigenSystem discrete_wiener_eigensystem(const ProcessParams &params, std::size_t n);

/// Closed-form eigen-system of the interpolated-process kernel over n sampling
/// intervals. Throws NumericalError if a formula denominator degenerates.
EigenSystem interp_kernel_eigensystem(const ProcessParams &params, std::size_t n);

// =============================================================================
// Kernels
// =============================================================================

/// Covariance of the Brownian bridge B = W - W~: nonzero only when t and s
/// share a sampling interval.
double bridge_covariance(const ProcessParams &params, double t, double s);

/// K_W~(t,s) = sigma^2 min{t,s} - K_B(t,s).
double interp_kernel(const ProcessParams &params, double t, double s);

/// Uniform grid on [0, n Ts] with composite-trapezoid weights and a fast
/// application of the discretized kernel K_W~.
class KernelGrid {
  public:
    KernelGrid(const ProcessParams &params, std::size_t intervals,
               std::size_t points_per_interval);

    std::size_t size() const noexcept { return nodes_.size(); }
    std::span<const double> nodes() const noexcept { return nodes_; }
    std::span<const double> weights() const noexcept { return weights_; }

    /// out_i = sum_j w_j K_W~(t_i, t_j) f_j. O(size * points_per_interval).
    void apply(std::span<const double> f, std::span<double> out) const;

  private:
    ProcessParams params_;
    std::size_t intervals_;
    std::size_t per_interval_;
    std::vector<double> nodes_;
    std::vector<double> weights_;
};

/// Sup-norm over the grid of lambda_k phi_k(t) - int K_W~(t,s) phi_k(s) ds
/// with trapezoid integration on grid_points per sampling interval.
/// Throws DomainError unless system is an InterpKernel system, 1 <= k <= n and
/// grid_points >= 50.
double fredholm_residual(const EigenSystem &system, const ProcessParams &params,
                         std::size_t k, std::size_t grid_points);

} // namespace wiener
