#include "wiener/mc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <string>
#include <thread>
#include <utility>

#include "wiener/errors.hpp"
#include "wiener/quadrature.hpp"
#include "wiener/waterfill.hpp"

namespace wiener::mc {

namespace {

struct Triple {
    std::size_t lo;
    std::size_t mid;
    std::size_t hi;
};

// Midpoint refinement of [0, m] grouped by level.
std::vector<std::vector<Triple>> refinement_levels(std::size_t m) {
    std::vector<std::vector<Triple>> levels;
    std::vector<std::pair<std::size_t, std::size_t>> current{{0, m}};
    while (!current.empty()) {
        std::vector<Triple> level;
        std::vector<std::pair<std::size_t, std::size_t>> next;
        for (auto [lo, hi] : current) {
            if (hi - lo < 2) continue;
            const std::size_t mid = (lo + hi) / 2;
            level.push_back({lo, mid, hi});
            next.emplace_back(lo, mid);
            next.emplace_back(mid, hi);
        }
        if (!level.empty()) levels.push_back(std::move(level));
        current = std::move(next);
    }
    return levels;
}

struct Summary {
    double mean = 0.0;
    double standard_error = 0.0;
};

Summary summarize(const std::vector<double> &values) {
    const double count = static_cast<double>(values.size());
    double sum = 0.0;
    for (double v : values) sum += v;
    const double mean = sum / count;
    double ss = 0.0;
    for (double v : values) ss += (v - mean) * (v - mean);
    const double var = values.size() > 1 ? ss / (count - 1.0) : 0.0;
    return {mean, std::sqrt(var / count)};
}

double z_score(double mean, double reference, double se) {
    if (se > 0.0) return (mean - reference) / se;
    return mean == reference ? 0.0 : std::copysign(INFINITY, mean - reference);
}

// Trapezoid integral of (a - b)^2 over the fine grid.
double squared_error_integral(std::span<const double> a, std::span<const double> b,
                              double step) {
    double sum = 0.0;
    const std::size_t last = a.size() - 1;
    for (std::size_t i = 0; i <= last; ++i) {
        const double e = a[i] - b[i];
        const double w = (i == 0 || i == last) ? 0.5 : 1.0;
        sum += w * e * e;
    }
    return sum * step;
}

std::vector<double> interpolate(std::span<const double> samples, std::size_t m) {
    const std::size_t intervals = samples.size() - 1;
    std::vector<double> out(intervals * m + 1);
    for (std::size_t n = 0; n < intervals; ++n) {
        const double a = samples[n];
        const double b = samples[n + 1];
        for (std::size_t j = 0; j < m; ++j) {
            const double frac = static_cast<double>(j) / static_cast<double>(m);
            out[n * m + j] = a + (b - a) * frac;
        }
    }
    out.back() = samples.back();
    return out;
}

std::size_t fine_index(const ProcessParams &params, const SimConfig &config, double t,
                       const char *who) {
    const double step = config.fine_step(params);
    const double pos = t / step;
    const double rounded = std::round(pos);
    const double last = static_cast<double>(config.intervals(params) * config.oversample());
    if (!(rounded >= 0.0 && rounded <= last) || std::abs(pos - rounded) > 1e-9 * std::max(1.0, pos)) {
        throw DomainError(std::string(who) + ": time is not a fine-grid point in the horizon");
    }
    return static_cast<std::size_t>(rounded);
}

// Row-major n x n matrix u[k][m] of the sorted eigenvectors.
std::vector<double> eigenvector_matrix(const EigenSystem &system) {
    const std::size_t n = system.size();
    std::vector<double> u(n * n);
    for (std::size_t k = 0; k < n; ++k) {
        for (std::size_t m = 0; m < n; ++m) {
            u[k * n + m] = system.vector_entry(k + 1, m + 1);
        }
    }
    return u;
}

void check_rbar(double rbar, const char *who) {
    if (!(rbar > 0.0 && std::isfinite(rbar))) {
        throw DomainError(std::string(who) + ": rbar must be positive and finite");
    }
}

} // namespace

std::mt19937_64 make_engine(std::uint64_t seed, std::uint64_t trial, Stream stream) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(trial), static_cast<std::uint32_t>(trial >> 32),
                      static_cast<std::uint32_t>(stream)};
    return std::mt19937_64(seq);
}

SimConfig::SimConfig(double horizon, std::size_t oversample, std::size_t trials,
                     std::uint64_t seed, std::size_t workers)
    : horizon_(horizon), oversample_(oversample), trials_(trials), seed_(seed), workers_(workers) {
    if (!(horizon > 0.0 && std::isfinite(horizon))) {
        throw DomainError("SimConfig: horizon must be positive and finite");
    }
    if (oversample < 1) throw DomainError("SimConfig: oversample must be >= 1");
    if (trials < 1) throw DomainError("SimConfig: trials must be >= 1");
    if (workers < 1) throw DomainError("SimConfig: workers must be >= 1");
}

std::size_t SimConfig::intervals(const ProcessParams &params) const {
    const double exact = horizon_ * params.fs();
    const double rounded = std::round(exact);
    // Absorb roundoff in T fs before rounding up.
    const double count = std::abs(exact - rounded) <= 1e-9 * std::max(1.0, exact)
                             ? rounded
                             : std::ceil(exact);
    return std::max<std::size_t>(1, static_cast<std::size_t>(count));
}

double SimConfig::effective_horizon(const ProcessParams &params) const {
    return static_cast<double>(intervals(params)) * params.ts();
}

double SimConfig::fine_step(const ProcessParams &params) const noexcept {
    return params.ts() / static_cast<double>(oversample_);
}

PathBundle simulate_path(const ProcessParams &params, const SimConfig &config,
                         std::uint64_t trial) {
    const std::size_t intervals = config.intervals(params);
    const std::size_t m = config.oversample();
    const double step = config.fine_step(params);
    auto engine = make_engine(config.seed(), trial, Stream::Path);
    std::normal_distribution<double> normal;

    PathBundle bundle;
    bundle.samples.resize(intervals + 1);
    bundle.fine_path.assign(intervals * m + 1, 0.0);
    const double coarse_sd = std::sqrt(params.sigma2() * params.ts());
    for (std::size_t n = 1; n <= intervals; ++n) {
        bundle.samples[n] = bundle.samples[n - 1] + coarse_sd * normal(engine);
        bundle.fine_path[n * m] = bundle.samples[n];
    }

    static thread_local std::size_t cached_m = 0;
    static thread_local std::vector<std::vector<Triple>> levels;
    if (cached_m != m) {
        levels = refinement_levels(m);
        cached_m = m;
    }
    double *w = bundle.fine_path.data();
    for (const auto &level : levels) {
        for (std::size_t n = 0; n < intervals; ++n) {
            const std::size_t base = n * m;
            for (const Triple &tr : level) {
                const double left = static_cast<double>(tr.mid - tr.lo);
                const double right = static_cast<double>(tr.hi - tr.mid);
                const double span = left + right;
                const double mean = (w[base + tr.lo] * right + w[base + tr.hi] * left) / span;
                const double sd = std::sqrt(params.sigma2() * step * left * right / span);
                w[base + tr.mid] = mean + sd * normal(engine);
            }
        }
    }
    bundle.interpolant = interpolate(bundle.samples, m);
    return bundle;
}

PathStream::PathStream(ProcessParams params, SimConfig config)
    : params_(params), config_(config) {}

bool PathStream::next(PathBundle &bundle) {
    if (next_ >= config_.trials()) return false;
    bundle = simulate_path(params_, config_, next_);
    ++next_;
    return true;
}

std::vector<double> run_trials(const SimConfig &config,
                               const std::function<double(std::uint64_t)> &fn) {
    const std::size_t trials = config.trials();
    std::vector<double> out(trials);
    const std::size_t workers = std::min(config.workers(), trials);
    if (workers <= 1) {
        for (std::size_t i = 0; i < trials; ++i) out[i] = fn(i);
        return out;
    }
    std::vector<std::exception_ptr> errors(workers);
    std::vector<std::thread> threads;
    threads.reserve(workers);
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t begin = trials * w / workers;
        const std::size_t end = trials * (w + 1) / workers;
        threads.emplace_back([&, w, begin, end] {
            try {
                for (std::size_t i = begin; i < end; ++i) out[i] = fn(i);
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto &t : threads) t.join();
    for (auto &e : errors) {
        if (e) std::rethrow_exception(e);
    }
    return out;
}

Estimate empirical_mmse(const ProcessParams &params, const SimConfig &config) {
    const double horizon = config.effective_horizon(params);
    const double step = config.fine_step(params);
    Estimate est;
    est.per_trial = run_trials(config, [&](std::uint64_t trial) {
        const PathBundle path = simulate_path(params, config, trial);
        return squared_error_integral(path.fine_path, path.interpolant, step) / horizon;
    });
    const Summary s = summarize(est.per_trial);
    const double m = static_cast<double>(config.oversample());
    est.mean = s.mean;
    est.standard_error = s.standard_error;
    est.analytic = params.sigma2() / (6.0 * params.fs());
    est.reference = est.analytic * (1.0 - 1.0 / (m * m));
    est.bias = est.reference - est.analytic;
    est.z = z_score(est.mean, est.reference, est.standard_error);
    return est;
}

CovariancePair bridge_covariance_check(const ProcessParams &params, const SimConfig &config,
                                       double t, double s) {
    const std::size_t i = fine_index(params, config, t, "bridge_covariance_check");
    const std::size_t j = fine_index(params, config, s, "bridge_covariance_check");
    const std::vector<double> products = run_trials(config, [&](std::uint64_t trial) {
        const PathBundle path = simulate_path(params, config, trial);
        return (path.fine_path[i] - path.interpolant[i]) * (path.fine_path[j] - path.interpolant[j]);
    });
    const Summary sum = summarize(products);
    const double step = config.fine_step(params);
    const double ti = static_cast<double>(i) * step;
    const double tj = static_cast<double>(j) * step;
    return {sum.mean, sum.standard_error, bridge_covariance(params, ti, tj)};
}

KlWeights kl_weights(const std::function<double(double)> &g, const ProcessParams &params,
                     std::size_t intervals) {
    const double ts = params.ts();
    KlWeights w;
    w.x.resize(intervals);
    w.y.resize(intervals);
    for (std::size_t n = 0; n < intervals; ++n) {
        const double a = static_cast<double>(n) * ts;
        const double b = a + ts;
        w.x[n] = quad::integrate([&](double u) { return g(u) * (b - u) / ts; }, a, b, {},
                                 quad::Strategy::PlainAdaptive)
                     .value;
        w.y[n] = quad::integrate([&](double u) { return g(u) * (u - a) / ts; }, a, b, {},
                                 quad::Strategy::PlainAdaptive)
                     .value;
    }
    return w;
}

double kl_coeff_from_samples(std::span<const double> samples, const KlWeights &weights) {
    if (samples.size() < 2) {
        throw DomainError("kl_coeff_from_samples: need at least two samples");
    }
    const std::size_t intervals = samples.size() - 1;
    if (weights.x.size() != intervals || weights.y.size() != intervals) {
        throw DomainError("kl_coeff_from_samples: weights do not match the sample count");
    }
    double sum = 0.0;
    for (std::size_t n = 0; n < intervals; ++n) {
        sum += samples[n] * weights.x[n] + samples[n + 1] * weights.y[n];
    }
    return sum;
}

double kl_coeff_from_samples(std::span<const double> samples,
                             const std::function<double(double)> &g,
                             const ProcessParams &params) {
    if (samples.size() < 2) {
        throw DomainError("kl_coeff_from_samples: need at least two samples");
    }
    return kl_coeff_from_samples(samples, kl_weights(g, params, samples.size() - 1));
}

LemmaBounds lemma_bounds(const ErrorMoments &moments, const ProcessParams &params) {
    const std::size_t count = moments.second.size();
    if (count < 2) throw DomainError("lemma_bounds: need at least two indices");
    if (moments.cross.size() != count - 1) {
        throw DomainError("lemma_bounds: cross moments must have one entry fewer than second moments");
    }
    const double m = static_cast<double>(count);
    double inner = 0.0;
    for (std::size_t i = 0; i + 1 < count; ++i) inner += moments.second[i];
    double cross = 0.0;
    for (double c : moments.cross) cross += c;
    const double last = moments.second.back();
    const double base = params.sigma2() / (6.0 * params.fs()) + cross / (3.0 * m);
    LemmaBounds out;
    out.lower = base + 2.0 * inner / (3.0 * m);
    out.upper = base + 2.0 * (inner + last) / (3.0 * m);
    out.exact = out.lower + last / (3.0 * m);
    return out;
}

ErrorMoments ce_moment_oracle(const ProcessParams &params, std::size_t n, double rbar) {
    if (n < 2) throw DomainError("ce_moment_oracle: blocklength must be >= 2");
    check_rbar(rbar, "ce_moment_oracle");
    const EigenSystem system = discrete_wiener_eigensystem(params, n);
    const auto lambda = system.eigenvalues();
    const double theta = waterfill::finite_waterfill(lambda, rbar).theta;
    const std::vector<double> u = eigenvector_matrix(system);

    ErrorMoments out;
    out.second.assign(n, 0.0);
    out.cross.assign(n - 1, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        const double d = std::min(theta, lambda[k]);
        const double *row = &u[k * n];
        for (std::size_t m = 0; m < n; ++m) {
            out.second[m] += row[m] * row[m] * d;
            if (m + 1 < n) out.cross[m] += row[m] * row[m + 1] * d;
        }
    }
    return out;
}

double normalized_mean_cross(const ErrorMoments &moments, const ProcessParams &params) {
    if (moments.cross.empty()) throw DomainError("normalized_mean_cross: no cross moments");
    double sum = 0.0;
    for (double c : moments.cross) sum += c;
    return sum / static_cast<double>(moments.cross.size()) / params.sample_variance();
}

CeEstimate ce_distortion_estimate(const ProcessParams &params, std::size_t n, double rbar) {
    const LemmaBounds b = lemma_bounds(ce_moment_oracle(params, n, rbar), params);
    return {b.lower, b.upper, 0.5 * (b.lower + b.upper), b.upper - b.lower, b.exact};
}

Estimate mc_test_channel_run(const ProcessParams &params, const SimConfig &config, double rbar) {
    check_rbar(rbar, "mc_test_channel_run");
    const std::size_t n = config.intervals(params);
    if (n < 2) throw DomainError("mc_test_channel_run: a block needs at least two samples");
    const std::size_t m = config.oversample();
    const double horizon = config.effective_horizon(params);
    const double step = config.fine_step(params);

    const EigenSystem system = discrete_wiener_eigensystem(params, n);
    const auto lambda = system.eigenvalues();
    const double theta = waterfill::finite_waterfill(lambda, rbar).theta;
    const std::vector<double> u = eigenvector_matrix(system);
    std::vector<double> gain(n, 0.0);
    std::vector<double> noise_sd(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) {
        if (lambda[k] > theta) {
            gain[k] = 1.0 - theta / lambda[k];
            noise_sd[k] = std::sqrt(theta * lambda[k] / (lambda[k] - theta));
        }
    }

    Estimate est;
    est.per_trial = run_trials(config, [&](std::uint64_t trial) {
        PathBundle path = simulate_path(params, config, trial);
        auto start_engine = make_engine(config.seed(), trial, Stream::BlockStart);
        auto channel_engine = make_engine(config.seed(), trial, Stream::Channel);
        std::normal_distribution<double> normal;
        const double start = std::sqrt(params.sigma2() * static_cast<double>(trial) * horizon) *
                             normal(start_engine);
        for (double &v : path.fine_path) v += start;
        for (double &v : path.samples) v += start;

        std::vector<double> coeff(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            if (gain[k] == 0.0) continue;
            const double *row = &u[k * n];
            double y = 0.0;
            for (std::size_t j = 0; j < n; ++j) y += row[j] * (path.samples[j + 1] - start);
            coeff[k] = gain[k] * (y + noise_sd[k] * normal(channel_engine));
        }
        std::vector<double> recon(n + 1, start);
        for (std::size_t k = 0; k < n; ++k) {
            if (coeff[k] == 0.0) continue;
            const double *row = &u[k * n];
            for (std::size_t j = 0; j < n; ++j) recon[j + 1] += row[j] * coeff[k];
        }
        const std::vector<double> estimate = interpolate(recon, m);
        return squared_error_integral(path.fine_path, estimate, step) / horizon;
    });

    const ErrorMoments moments = ce_moment_oracle(params, n, rbar);
    const LemmaBounds bounds = lemma_bounds(moments, params);
    // Trapezoid weights of the affine ramps on m sub-steps.
    const double mm = static_cast<double>(m) * static_cast<double>(m);
    const double square = 1.0 / 3.0 + 1.0 / (6.0 * mm);
    const double product = 1.0 / 6.0 - 1.0 / (6.0 * mm);
    double ramps = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double left = i == 0 ? 0.0 : moments.second[i - 1];
        const double right = moments.second[i];
        const double cross = i == 0 ? 0.0 : moments.cross[i - 1];
        ramps += (left + right) * square + 2.0 * cross * product;
    }
    const double mmse = params.sigma2() / (6.0 * params.fs());
    const Summary s = summarize(est.per_trial);
    est.mean = s.mean;
    est.standard_error = s.standard_error;
    est.analytic = bounds.exact;
    est.reference = mmse * (1.0 - 1.0 / mm) + ramps * params.ts() / horizon;
    est.bias = est.reference - est.analytic;
    est.z = z_score(est.mean, est.reference, est.standard_error);
    return est;
}

} // namespace wiener::mc
