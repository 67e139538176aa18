#include "cli.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <sstream>
#include <stdexcept>
#include <system_error>

#include "CLI11.hpp"
#include "json.hpp"
#include "wiener/drf.hpp"
#include "wiener/errors.hpp"
#include "wiener/mc.hpp"
#include "wiener/spectral.hpp"

#ifndef WIENER_DRF_VERSION
#define WIENER_DRF_VERSION "unknown"
#endif

namespace wiener::cli {

namespace {

using nlohmann::ordered_json;

struct Options {
    double sigma2 = 1.0;
    double fs = 1.0;
    double rate = 1.0;
    double rbar = 2.0;
    double min = 0.0;
    double max = 0.0;
    std::size_t points = 0;
    bool log = false;
    std::string sweep = "rate";
    std::size_t n = 16;
    std::string kind = "discrete";
    double horizon = 8.0;
    std::size_t oversample = 64;
    std::size_t trials = 2000;
    std::uint64_t seed = 1;
    std::string scheme = "mmse-only";
    std::size_t workers = 1;
    bool normalized = false;
    std::string out;
};

class UsageError : public std::runtime_error {
    using std::runtime_error::runtime_error;
};

void require(bool ok, const std::string &message) {
    if (!ok) throw UsageError(message);
}

struct Sweep {
    double min;
    double max;
    std::size_t points;
};

Sweep resolve_sweep(const Options &o, const CLI::App &cmd, double def_min, double def_max,
                    std::size_t def_points) {
    Sweep s{cmd.count("--min") ? o.min : def_min, cmd.count("--max") ? o.max : def_max,
            cmd.count("--points") ? o.points : def_points};
    require(std::isfinite(s.min) && s.min > 0.0, "--min must be positive");
    require(std::isfinite(s.max) && s.max > s.min, "--max must exceed --min");
    require(s.points >= 2, "--points must be at least 2");
    return s;
}

std::vector<double> sweep_values(const Sweep &s, bool logarithmic) {
    std::vector<double> xs(s.points);
    const double last = static_cast<double>(s.points - 1);
    for (std::size_t i = 0; i < s.points; ++i) {
        const double f = static_cast<double>(i) / last;
        xs[i] = logarithmic ? std::exp(std::log(s.min) + f * (std::log(s.max) - std::log(s.min)))
                            : s.min + f * (s.max - s.min);
    }
    xs.front() = s.min;
    xs.back() = s.max;
    return xs;
}

void remove_quietly(const std::string &path) {
    std::error_code ec;
    std::filesystem::remove(path, ec);
}

void write_file(const std::string &path, const std::string &content) {
    std::ofstream f(path, std::ios::binary | std::ios::trunc);
    if (!f) throw UsageError("cannot open " + path + " for writing");
    f << content;
    f.close();
    if (!f) {
        remove_quietly(path);
        throw UsageError("failed writing " + path);
    }
}

// Writes the CSV and its manifest when --out is given, else the CSV to out.
// Both go to temporary files first so a failure leaves neither behind.
void emit(const Options &o, const std::string &csv, const ordered_json &manifest,
          std::ostream &out) {
    if (o.out.empty()) {
        out << csv;
        return;
    }
    const std::string manifest_path = o.out + ".manifest.json";
    const std::string csv_tmp = o.out + ".tmp";
    const std::string manifest_tmp = manifest_path + ".tmp";
    try {
        write_file(csv_tmp, csv);
        write_file(manifest_tmp, manifest.dump(2) + "\n");
        std::filesystem::rename(manifest_tmp, manifest_path);
        std::filesystem::rename(csv_tmp, o.out);
    } catch (const std::filesystem::filesystem_error &e) {
        remove_quietly(csv_tmp);
        remove_quietly(manifest_tmp);
        remove_quietly(manifest_path);
        throw UsageError(std::string("cannot write ") + o.out + ": " + e.what());
    } catch (...) {
        remove_quietly(csv_tmp);
        remove_quietly(manifest_tmp);
        throw;
    }
}

ordered_json manifest_base(const std::string &command, const Options &o) {
    ordered_json m;
    m["command"] = command;
    m["version"] = WIENER_DRF_VERSION;
    m["flags"] = ordered_json::object();
    m["flags"]["sigma2"] = o.sigma2;
    m["flags"]["normalized"] = o.normalized;
    m["flags"]["out"] = o.out;
    return m;
}

class CsvWriter {
  public:
    explicit CsvWriter(std::initializer_list<const char *> header) {
        bool first = true;
        for (const char *h : header) {
            if (!first) buf_ << ',';
            buf_ << h;
            first = false;
        }
        buf_ << '\n';
    }

    void row(std::initializer_list<double> values) {
        bool first = true;
        for (double v : values) {
            if (!first) buf_ << ',';
            buf_ << format_double(v);
            first = false;
        }
        buf_ << '\n';
    }

    void row_indexed(std::size_t index, std::initializer_list<double> values) {
        buf_ << index;
        for (double v : values) buf_ << ',' << format_double(v);
        buf_ << '\n';
    }

    std::string str() const { return buf_.str(); }

  private:
    std::ostringstream buf_;
};

int cmd_curve(const Options &o, const CLI::App &cmd, std::ostream &out) {
    require(o.sweep == "rate" || o.sweep == "fs", "--sweep must be rate or fs");
    const bool by_rate = o.sweep == "rate";
    const Sweep s = by_rate ? resolve_sweep(o, cmd, 0.25, 5.0, 50)
                            : resolve_sweep(o, cmd, 0.25, 10.0, 50);
    require(o.sigma2 > 0.0 && std::isfinite(o.sigma2), "--sigma2 must be positive");
    require(o.fs > 0.0 && std::isfinite(o.fs), "--fs must be positive");
    require(o.rate > 0.0 && std::isfinite(o.rate), "--rate must be positive");
    const std::vector<double> xs = sweep_values(s, o.log);
    for (double x : xs) {
        const double rbar = by_rate ? x / o.fs : o.rate / x;
        require(rbar >= drf::kMinBitsPerSample,
                "bits per sample R/fs must be at least 1e-4 at every sweep point");
    }

    CsvWriter csv{"x", "d_opt", "d_ce", "d_upper", "d_w", "d_bar", "mmse", "theta_opt", "theta_ce"};
    for (double x : xs) {
        const ProcessParams params(o.sigma2, by_rate ? o.fs : x);
        const drf::RateSpec rate(by_rate ? x : o.rate);
        const drf::DistortionBundle b = drf::bundle(params, rate);
        const double scale = o.normalized ? 1.0 / params.sample_variance() : 1.0;
        csv.row({x, b.d_opt * scale, b.d_ce * scale, b.d_upper * scale, b.d_w * scale,
                 b.d_bar * scale, b.mmse * scale, b.theta_opt, b.theta_ce});
    }

    ordered_json m = manifest_base("curve", o);
    m["flags"]["sweep"] = o.sweep;
    m["flags"][by_rate ? "fs" : "rate"] = by_rate ? o.fs : o.rate;
    m["flags"]["min"] = s.min;
    m["flags"]["max"] = s.max;
    m["flags"]["points"] = s.points;
    m["flags"]["log"] = o.log;
    emit(o, csv.str(), m, out);
    return kExitOk;
}

int cmd_eigen(const Options &o, std::ostream &out) {
    require(o.kind == "discrete" || o.kind == "interp", "--kind must be discrete or interp");
    require(o.n >= 1, "--n must be at least 1");
    require(o.sigma2 > 0.0 && std::isfinite(o.sigma2), "--sigma2 must be positive");
    require(o.fs > 0.0 && std::isfinite(o.fs), "--fs must be positive");
    const ProcessParams params(o.sigma2, o.fs);
    const bool discrete = o.kind == "discrete";
    const EigenSystem system = discrete ? discrete_wiener_eigensystem(params, o.n)
                                        : interp_kernel_eigensystem(params, o.n);
    // Eigenvalue unit: sigma^2/fs (discrete) or sigma^2 Ts^2 (interpolated kernel).
    const double unit = discrete ? params.sample_variance()
                                 : params.sigma2() * params.ts() * params.ts();
    const double scale = o.normalized ? 1.0 : unit;

    CsvWriter csv{"k", "lambda", "density_limit"};
    for (std::size_t k = 1; k <= system.size(); ++k) {
        const double phi = (static_cast<double>(k) - 0.5) / static_cast<double>(o.n);
        const double density = discrete ? s_bar(phi) : s_tilde_density(phi);
        csv.row_indexed(k, {system.eigenvalue(k) / unit * scale, density * scale});
    }

    ordered_json m = manifest_base("eigen", o);
    m["flags"]["fs"] = o.fs;
    m["flags"]["kind"] = o.kind;
    m["flags"]["n"] = o.n;
    emit(o, csv.str(), m, out);
    return kExitOk;
}

int cmd_ratio(const Options &o, const CLI::App &cmd, std::ostream &out) {
    const Sweep s = resolve_sweep(o, cmd, 0.05, 8.0, 100);
    require(s.min >= drf::kMinBitsPerSample, "--min must be at least 1e-4 bits per sample");
    const std::vector<double> xs = sweep_values(s, o.log);

    CsvWriter csv{"rbar", "d_tilde", "ratio_smp", "ratio_qnt", "ce_penalty"};
    for (double rbar : xs) {
        const double dt = drf::d_tilde(rbar);
        const double smp = drf::ratio_smp(rbar);
        const double qnt = drf::ratio_qnt(rbar);
        const double penalty = drf::ce_penalty(rbar);
        csv.row({rbar, dt, smp, qnt, penalty});
    }

    ordered_json m = manifest_base("ratio", o);
    m["flags"]["min"] = s.min;
    m["flags"]["max"] = s.max;
    m["flags"]["points"] = s.points;
    m["flags"]["log"] = o.log;
    emit(o, csv.str(), m, out);
    return kExitOk;
}

int cmd_simulate(const Options &o, std::ostream &out) {
    require(o.scheme == "mmse-only" || o.scheme == "test-channel",
            "--scheme must be mmse-only or test-channel");
    require(o.sigma2 > 0.0 && std::isfinite(o.sigma2), "--sigma2 must be positive");
    require(o.fs > 0.0 && std::isfinite(o.fs), "--fs must be positive");
    require(o.horizon > 0.0 && std::isfinite(o.horizon), "--horizon must be positive");
    require(o.oversample >= 1, "--oversample must be at least 1");
    require(o.trials >= 1, "--trials must be at least 1");
    require(o.workers >= 1, "--workers must be at least 1");
    const bool channel = o.scheme == "test-channel";
    if (channel) require(o.rbar > 0.0 && std::isfinite(o.rbar), "--rbar must be positive");

    const ProcessParams params(o.sigma2, o.fs);
    const mc::SimConfig config(o.horizon, o.oversample, o.trials, o.seed, o.workers);
    if (channel) {
        require(config.intervals(params) >= 2, "test-channel needs horizon * fs >= 2");
    }
    const mc::Estimate est = channel ? mc::mc_test_channel_run(params, config, o.rbar)
                                     : mc::empirical_mmse(params, config);
    const double scale = o.normalized ? 1.0 / params.sample_variance() : 1.0;

    CsvWriter csv{"trial", "distortion"};
    for (std::size_t i = 0; i < est.per_trial.size(); ++i) {
        csv.row_indexed(i, {est.per_trial[i] * scale});
    }

    ordered_json m = manifest_base("simulate", o);
    m["flags"]["scheme"] = o.scheme;
    m["flags"]["fs"] = o.fs;
    m["flags"]["horizon"] = o.horizon;
    m["flags"]["effective_horizon"] = config.effective_horizon(params);
    m["flags"]["oversample"] = o.oversample;
    m["flags"]["trials"] = o.trials;
    m["flags"]["workers"] = o.workers;
    if (channel) m["flags"]["rbar"] = o.rbar;
    m["seed"] = o.seed;
    m["summary"] = {{"estimate", est.mean * scale},
                    {"standard_error", est.standard_error * scale},
                    {"reference", est.reference * scale},
                    {"analytic", est.analytic * scale},
                    {"bias", est.bias * scale},
                    {"z", est.z}};
    if (!o.out.empty()) emit(o, csv.str(), m, out);

    out << "scheme=" << o.scheme << " estimate=" << format_double(est.mean * scale)
        << " standard_error=" << format_double(est.standard_error * scale)
        << " reference=" << format_double(est.reference * scale)
        << " analytic=" << format_double(est.analytic * scale)
        << " bias=" << format_double(est.bias * scale) << " z=" << format_double(est.z) << '\n';
    return kExitOk;
}

} // namespace

std::string format_double(double value) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, value);
    return std::string(buf, res.ptr);
}

int run(const std::vector<std::string> &args, std::ostream &out, std::ostream &err) {
    Options o;
    CLI::App app{"Distortion-rate curves, eigen-systems and simulations for the sampled Wiener process",
                 "wiener-drf"};
    app.require_subcommand(1);
    app.set_version_flag("--version", WIENER_DRF_VERSION);

    auto common = [&](CLI::App *cmd) {
        cmd->add_option("--sigma2", o.sigma2, "process variance per unit time")->capture_default_str();
        cmd->add_option("--out", o.out, "output CSV path (stdout when absent)");
        cmd->add_flag("--normalized", o.normalized, "report distortions in units of sigma^2/fs");
    };
    auto sweep = [&](CLI::App *cmd) {
        cmd->add_option("--min", o.min, "sweep lower bound");
        cmd->add_option("--max", o.max, "sweep upper bound");
        cmd->add_option("--points", o.points, "number of sweep points");
        cmd->add_flag("--log", o.log, "logarithmic spacing");
    };

    CLI::App *curve = app.add_subcommand("curve", "distortion curves versus R or fs");
    common(curve);
    sweep(curve);
    curve->add_option("--sweep", o.sweep, "abscissa: rate or fs")->capture_default_str();
    curve->add_option("--fs", o.fs, "sampling rate for a rate sweep")->capture_default_str();
    curve->add_option("--rate", o.rate, "bitrate for an fs sweep")->capture_default_str();

    CLI::App *eigen = app.add_subcommand("eigen", "finite-n eigenvalues");
    common(eigen);
    eigen->add_option("--kind", o.kind, "discrete or interp")->capture_default_str();
    eigen->add_option("--n", o.n, "number of samples or intervals")->capture_default_str();
    eigen->add_option("--fs", o.fs, "sampling rate")->capture_default_str();

    CLI::App *ratio = app.add_subcommand("ratio", "excess-distortion ratios versus bits per sample");
    common(ratio);
    sweep(ratio);

    CLI::App *simulate = app.add_subcommand("simulate", "Monte-Carlo experiments");
    common(simulate);
    simulate->add_option("--scheme", o.scheme, "mmse-only or test-channel")->capture_default_str();
    simulate->add_option("--fs", o.fs, "sampling rate")->capture_default_str();
    simulate->add_option("--rbar", o.rbar, "bits per sample (test-channel)")->capture_default_str();
    simulate->add_option("--horizon", o.horizon, "horizon T")->capture_default_str();
    simulate->add_option("--oversample", o.oversample, "fine points per interval")->capture_default_str();
    simulate->add_option("--trials", o.trials, "number of trials")->capture_default_str();
    simulate->add_option("--seed", o.seed, "random seed")->capture_default_str();
    simulate->add_option("--workers", o.workers, "worker threads")->capture_default_str();

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp &) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForVersion &) {
        out << WIENER_DRF_VERSION << '\n';
        return kExitOk;
    } catch (const CLI::ParseError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (curve->parsed()) return cmd_curve(o, *curve, out);
        if (eigen->parsed()) return cmd_eigen(o, out);
        if (ratio->parsed()) return cmd_ratio(o, *ratio, out);
        return cmd_simulate(o, out);
    } catch (const UsageError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const DomainError &e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const NumericalError &e) {
        err << "numerical failure: " << e.what() << '\n';
        return kExitNumerical;
    }
}

} // namespace wiener::cli
