// Monte-Carlo and semi-analytic validation of sampling, interpolation and
// compress-and-estimate coding of the Wiener process.
//
// Random streams: every (seed, trial, stream) triple seeds its own
// mt19937_64 through seed_seq{seed_lo, seed_hi, trial_lo, trial_hi, stream}.
// Stream 0 drives the path, stream 1 the test-channel noise and stream 2
// the block start value. Results therefore do not depend on how trials are
// split across workers.
#pragma once

#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <vector>

#include "wiener/spectral.hpp"

namespace wiener::mc {

enum class Stream : std::uint32_t { Path = 0, Channel = 1, BlockStart = 2 };

/// Generator for one (seed, trial, stream) triple.
std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t trial, Stream stream);

class SimConfig {
  public:
    /// Throws DomainError unless horizon > 0, oversample >= 1, trials >= 1, workers >= 1.
    SimConfig(double horizon, std::size_t oversample, std::size_t trials, std::uint64_t seed,
              std::size_t workers = 1);

    double horizon() const noexcept { return horizon_; }
    std::size_t oversample() const noexcept { return oversample_; }
    std::size_t trials() const noexcept { return trials_; }
    std::uint64_t seed() const noexcept { return seed_; }
    std::size_t workers() const noexcept { return workers_; }

    /// N_T = ceil(T fs): the horizon is rounded up to a whole number of intervals.
    std::size_t intervals(const ProcessParams &params) const;
    double effective_horizon(const ProcessParams &params) const;
    /// Fine-grid step Ts / oversample.
    double fine_step(const ProcessParams &params) const noexcept;

  private:
    double horizon_;
    std::size_t oversample_;
    std::size_t trials_;
    std::uint64_t seed_;
    std::size_t workers_;
};

struct PathBundle {
    std::vector<double> fine_path;   ///< N_T * oversample + 1 values, fine_path[0] = 0
    std::vector<double> samples;     ///< N_T + 1 values at the sampling instants
    std::vector<double> interpolant; ///< linear interpolation of samples on the fine grid
};

/// Path of one trial. The sample values come first (independent N(0, sigma^2 Ts)
/// increments), then each interval is filled by level-ordered Brownian-bridge
/// midpoint refinement. For dyadic oversample the path at oversample/2 is the
/// even-indexed subsample of the path at oversample.
PathBundle simulate_path(const ProcessParams &params, const SimConfig &config,
                         std::uint64_t trial);

/// Sequential access to the paths of all trials.
class PathStream {
  public:
    PathStream(ProcessParams params, SimConfig config);
    /// Fills bundle with the next trial; false once all trials are drawn.
    bool next(PathBundle &bundle);
    std::uint64_t position() const noexcept { return next_; }

  private:
    ProcessParams params_;
    SimConfig config_;
    std::uint64_t next_ = 0;
};

/// Runs fn(trial) for every trial on config.workers() threads. The result is
/// indexed by trial and does not depend on the worker count.
std::vector<double> run_trials(const SimConfig &config,
                               const std::function<double(std::uint64_t)> &fn);

/// Monte-Carlo estimate against its references.
struct Estimate {
    double mean = 0.0;
    double standard_error = 0.0;
    double reference = 0.0; ///< exact expectation of the estimator on the fine grid
    double analytic = 0.0;  ///< continuous-time value
    double bias = 0.0;      ///< reference - analytic
    double z = 0.0;         ///< (mean - reference) / standard_error, 0 when both vanish
    std::vector<double> per_trial;
};

/// Trapezoid time average of (W - W~)^2 per trial. The reference is
/// sigma^2/(6 fs) (1 - 1/oversample^2).
Estimate empirical_mmse(const ProcessParams &params, const SimConfig &config);

struct CovariancePair {
    double empirical = 0.0;
    double standard_error = 0.0;
    double analytic = 0.0;
};

/// E[B_t B_s] from the simulated bridges. Throws DomainError unless t and s
/// are fine-grid points inside the effective horizon.
CovariancePair bridge_covariance_check(const ProcessParams &params, const SimConfig &config,
                                       double t, double s);

/// Per-interval weights X_n = int g(u) ((n+1)Ts - u)/Ts du and
/// Y_n = int g(u) (u - n Ts)/Ts du over [n Ts, (n+1) Ts].
struct KlWeights {
    std::vector<double> x;
    std::vector<double> y;
};

KlWeights kl_weights(const std::function<double(double)> &g, const ProcessParams &params,
                     std::size_t intervals);

/// int_0^{N Ts} g(u) W~(u) du = sum_n (W_n X_n + W_{n+1} Y_n) for samples
/// W_0..W_N. Throws DomainError for fewer than two samples and
/// QuadratureError if g cannot be integrated.
double kl_coeff_from_samples(std::span<const double> samples,
                             const std::function<double(double)> &g,
                             const ProcessParams &params);

double kl_coeff_from_samples(std::span<const double> samples, const KlWeights &weights);

/// Sample reconstruction errors Delta_m = W_m - W^_m for m = 1..M.
struct ErrorMoments {
    std::vector<double> second; ///< E Delta_m^2, m = 1..M
    std::vector<double> cross;  ///< E Delta_m Delta_{m+1}, m = 1..M-1
};

struct LemmaBounds {
    double lower = 0.0;
    double upper = 0.0;
    double exact = 0.0; ///< time-averaged MSE of the interpolated reconstruction
};

/// Bounds on the time-averaged MSE when the path is estimated by linear
/// interpolation of reconstructed samples (Delta_0 = 0):
///   lower = mmse + (2/3M) sum_{m<M} E Delta_m^2 + (1/3M) sum E Delta_m Delta_{m+1}
///   upper = mmse + (2/3M) sum_{m<=M} E Delta_m^2 + (1/3M) sum E Delta_m Delta_{m+1}
/// Throws DomainError unless M >= 2 and cross has M - 1 entries.
LemmaBounds lemma_bounds(const ErrorMoments &moments, const ProcessParams &params);

/// Exact error moments when the KL coefficients of a block of n samples are
/// reconstructed with distortion min{theta, lambda_k}, theta from finite
/// waterfilling at rbar bits per sample.
ErrorMoments ce_moment_oracle(const ProcessParams &params, std::size_t n, double rbar);

/// Mean of the cross moments in units of sigma^2/fs.
double normalized_mean_cross(const ErrorMoments &moments, const ProcessParams &params);

struct CeEstimate {
    double lower = 0.0;
    double upper = 0.0;
    double midpoint = 0.0;
    double gap = 0.0;
    double exact = 0.0;
};

CeEstimate ce_distortion_estimate(const ProcessParams &params, std::size_t n, double rbar);

/// CE coding through the Gaussian test channel, one block of N_T samples per
/// trial. The block start value is drawn as if the block were the trial-th of
/// a long path, subtracted before the KL transform and restored losslessly.
/// The reference is the exact expectation on the fine grid; analytic is the
/// continuous-time value (LemmaBounds::exact at n = N_T).
Estimate mc_test_channel_run(const ProcessParams &params, const SimConfig &config, double rbar);

} // namespace wiener::mc
