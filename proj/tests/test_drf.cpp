#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <numbers>

#include "generators.hpp"
#include "wiener/drf.hpp"
#include "wiener/errors.hpp"

namespace {

using namespace wiener;
using namespace wiener::drf;
using wiener::testing::Gen;
using wiener::testing::rel_diff;

constexpr double kPi = std::numbers::pi;
constexpr double kLn2 = std::numbers::ln2;

ProcessParams unit_params(double fs = 1.0) { return ProcessParams(1.0, fs); }

TEST(RateSpec, Validation) {
    EXPECT_THROW(RateSpec(0.0), DomainError);
    EXPECT_THROW(RateSpec(-1.0), DomainError);
    EXPECT_THROW(RateSpec{INFINITY}, DomainError);
    EXPECT_DOUBLE_EQ(RateSpec(3.0).bits_per_sample(unit_params(2.0)), 1.5);
}

TEST(Distortion, RejectsVanishingBitsPerSample) {
    EXPECT_THROW(d_tilde(5e-5), DomainError);
    EXPECT_THROW(d_opt(unit_params(1e5), RateSpec(1.0)), DomainError);
}

TEST(Distortion, ShannonWienerValue) {
    EXPECT_NEAR(d_w(RateSpec(1.0), 1.0), 0.29235113835560139, 1e-15);
    EXPECT_NEAR(d_w(RateSpec(2.0), 3.0), 1.5 * 0.29235113835560139, 1e-15);
}

TEST(Distortion, MmseIsSixthOfSampleVariance) {
    EXPECT_DOUBLE_EQ(mmse_fs(ProcessParams(3.0, 2.0)), 0.25);
}

TEST(Distortion, FrozenNormalizedValues) {
    // High-precision reference values (independent quadrature).
    EXPECT_LT(rel_diff(d_tilde(0.25), 1.0123208406473412), 1e-11);
    EXPECT_LT(rel_diff(d_tilde(0.5), 0.43694360042954909), 1e-11);
    EXPECT_LT(rel_diff(d_tilde(1.0), 0.16159648360251676), 1e-11);
    EXPECT_LT(rel_diff(d_bar_tilde(0.5), 0.56507270710263287), 1e-11);
    EXPECT_LT(rel_diff(g_fun(0.5), 0.76568653063452401), 1e-11);
    EXPECT_LT(rel_diff(d_ce_tilde(0.5), 0.4374582853302122), 1e-11);
    EXPECT_LT(rel_diff(d_ce_tilde(0.05), 5.6822816615905836), 1e-11);
    EXPECT_LT(rel_diff(cross_moment_limit(0.5), 0.18222944178537086), 1e-10);
    EXPECT_LT(rel_diff(ce_penalty(1.25), 1.026666440625134), 1e-11);
}

TEST(Distortion, RatiosAtOneBitPerSample) {
    const double dt = 0.16159648360251676;
    EXPECT_LT(rel_diff(ratio_qnt(1.0), 1.0 + 6.0 * dt), 1e-11);
    EXPECT_LT(rel_diff(ratio_smp(1.0), 0.5 * kPi * kPi * kLn2 * (1.0 / 6.0 + dt)), 1e-11);
    EXPECT_NEAR(ratio_smp(1.0), 1.12284, 1e-5);
    EXPECT_NEAR(ratio_qnt(1.0), 1.96958, 1e-5);
}

TEST(Distortion, RatioOverloadsAgree) {
    const ProcessParams p(2.0, 3.0);
    const RateSpec r(4.5);
    EXPECT_DOUBLE_EQ(ratio_smp(p, r), ratio_smp(1.5));
    EXPECT_DOUBLE_EQ(ratio_qnt(p, r), ratio_qnt(1.5));
    EXPECT_DOUBLE_EQ(ce_penalty(p, r), ce_penalty(1.5));
    EXPECT_LT(rel_diff(ratio_smp(p, r), d_opt(p, r).distortion / d_w(r, 2.0)), 1e-13);
}

TEST(Distortion, EquilibriumPoint) {
    const double r0 = equilibrium_rbar();
    EXPECT_NEAR(r0, 0.98099521325292536, 1e-9);
    EXPECT_NEAR(d_tilde(r0), 1.0 / 6.0, 1e-10);
    EXPECT_NEAR(ratio_smp(r0), 1.1185125060806066, 1e-8);
}

TEST(Distortion, BorderPoint) {
    const double rb = border_rbar();
    EXPECT_NEAR(rb, 1.4499843134764958, 1e-15);
    const DistortionPoint at = d_opt(unit_params(2.0), RateSpec(2.0 * rb));
    EXPECT_NEAR(at.point.theta, 1.0 / 12.0, 1e-9);
    EXPECT_NEAR(at.distortion, 1.0 / 8.0, 1e-8);
}

TEST(Distortion, ClosedFormsInTheirRegimes) {
    const ProcessParams p(1.3, 0.7);
    for (double rbar : {1.46, 2.0, 3.3, 6.0}) {
        const RateSpec r(rbar * p.fs());
        EXPECT_NEAR(d_opt(p, r).distortion, idrf_low_rate(p, r), 1e-10);
    }
    for (double rbar : {1.0, 1.2, 2.5, 6.0}) {
        const RateSpec r(rbar * p.fs());
        EXPECT_NEAR(d_ce(p, r).distortion, d_ce_low_rate(p, r), 1e-10);
        EXPECT_NEAR(d_upper(p, r), d_upper_low_rate(p, r), 1e-10);
    }
    // Below the border some components fall under water and the all-active
    // closed form drops below the waterfilled value.
    const RateSpec low(0.8 * p.fs());
    EXPECT_GT(d_opt(p, low).distortion, idrf_low_rate(p, low));
}

TEST(Distortion, CompressEstimateAssemblyMatchesDirectIntegral) {
    Gen gen(13);
    for (int i = 0; i < 30; ++i) {
        const ProcessParams p(gen.log_uniform(0.1, 10.0), gen.log_uniform(0.1, 10.0));
        const RateSpec r(p.fs() * gen.log_uniform(0.01, 8.0));
        EXPECT_LT(rel_diff(d_ce(p, r).distortion, d_ce_assembled(p, r)), 1e-10);
    }
}

TEST(Distortion, CrossMomentLimitVanishesAboveOneBit) {
    for (double rbar : {1.0, 1.5, 2.0, 5.0}) EXPECT_NEAR(cross_moment_limit(rbar), 0.0, 1e-12);
    EXPECT_GT(cross_moment_limit(0.5), 0.1);
}

TEST(Distortion, OrderingOverRandomOperatingPoints) {
    Gen gen(17);
    for (int i = 0; i < 60; ++i) {
        const ProcessParams p(gen.log_uniform(0.2, 5.0), gen.log_uniform(0.25, 16.0));
        const RateSpec r(gen.log_uniform(std::max(0.25, 1e-3 * p.fs()), 8.0));
        const DistortionBundle b = bundle(p, r);
        EXPECT_GE(b.d_opt, std::max(b.mmse, b.d_w) - 1e-9 * p.sigma2());
        EXPECT_LE(b.d_opt, b.d_ce * (1.0 + 1e-12));
        EXPECT_LE(b.d_ce, b.d_upper * (1.0 + 1e-12));
        EXPECT_LE(b.d_bar, b.d_w * (1.0 + 1e-12));
    }
}

TEST(Distortion, BundleMatchesIndividualFunctions) {
    const ProcessParams p(2.0, 1.5);
    const RateSpec r(1.1);
    const DistortionBundle b = bundle(p, r);
    EXPECT_DOUBLE_EQ(b.d_opt, d_opt(p, r).distortion);
    EXPECT_DOUBLE_EQ(b.d_ce, d_ce(p, r).distortion);
    EXPECT_DOUBLE_EQ(b.d_upper, d_upper(p, r));
    EXPECT_DOUBLE_EQ(b.d_bar, d_bar(p, r).distortion);
    EXPECT_DOUBLE_EQ(b.d_w, d_w(r, 2.0));
    EXPECT_DOUBLE_EQ(b.mmse, mmse_fs(p));
    EXPECT_DOUBLE_EQ(b.theta_opt, d_opt(p, r).point.theta);
    EXPECT_DOUBLE_EQ(b.theta_ce, d_bar(p, r).point.theta);
}

TEST(Distortion, DecreasingInRateIncreasingInDistortionFloor) {
    const ProcessParams p(1.0, 1.0);
    double prev = INFINITY;
    for (double r = 0.25; r <= 5.0; r *= 1.3) {
        const double d = d_opt(p, RateSpec(r)).distortion;
        EXPECT_LT(d, prev);
        prev = d;
    }
    // d_bar grows with fs towards d_w at fixed R.
    double last = 0.0;
    for (double fs = 0.25; fs <= 10.0; fs *= 1.5) {
        const double d = d_bar(ProcessParams(1.0, fs), RateSpec(1.0)).distortion;
        EXPECT_GT(d, last);
        last = d;
    }
    EXPECT_LT(last, d_w(RateSpec(1.0), 1.0));
}

// Second-order coefficient c in D = sigma^2 (first/R + c R/fs^2) from three
// sampling rates, eliminating the fs^-2 and fs^-4 corrections.
double richardson(const std::function<double(const ProcessParams &, const RateSpec &)> &curve) {
    const RateSpec r(1.0);
    auto scaled = [&](double fs) {
        const ProcessParams p(1.0, fs);
        return (curve(p, r) - d_w(r, 1.0)) * fs * fs;
    };
    const double f50 = scaled(50.0), f100 = scaled(100.0), f200 = scaled(200.0);
    const double r1 = (4.0 * f100 - f50) / 3.0;
    const double r2 = (4.0 * f200 - f100) / 3.0;
    return (16.0 * r2 - r1) / 15.0;
}

TEST(HighRate, FirstOrderCoefficientIsShannon) {
    for (Curve c : {Curve::DiscreteWiener, Curve::Optimal, Curve::CompressEstimate}) {
        EXPECT_DOUBLE_EQ(high_rate_coefficients(c).first, 2.0 / (kPi * kPi * kLn2));
    }
}

TEST(HighRate, SecondOrderCoefficientsMatchExtrapolation) {
    const double opt = richardson([](auto &p, auto &r) { return d_opt(p, r).distortion; });
    const double ce = richardson([](auto &p, auto &r) { return d_ce(p, r).distortion; });
    const double bar = richardson([](auto &p, auto &r) { return d_bar(p, r).distortion; });
    EXPECT_NEAR(opt, high_rate_coefficients(Curve::Optimal).second, 1e-4);
    EXPECT_NEAR(ce, high_rate_coefficients(Curve::CompressEstimate).second, 1e-4);
    EXPECT_NEAR(bar, high_rate_coefficients(Curve::DiscreteWiener).second, 1e-4);
    EXPECT_NEAR(high_rate_coefficients(Curve::Optimal).second, kLn2 / 18.0, 1e-16);
}

TEST(CePenalty, BoundedOverLogGrid) {
    double worst = 0.0;
    for (int i = 0; i < 80; ++i) {
        const double rbar = 0.05 * std::pow(160.0, i / 79.0);
        const double pen = ce_penalty(rbar);
        EXPECT_GE(pen, 1.0 - 1e-12);
        worst = std::max(worst, pen);
    }
    EXPECT_LT(worst, 1.027);
    EXPECT_GT(worst, 1.026);
}

} // namespace
