#include "wiener/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "wiener/errors.hpp"

namespace wiener::quad {

namespace {

struct Rule {
    std::array<double, 32> nodes;
    std::array<double, 32> weights;
};

// Gauss-Legendre nodes on [-1,1] by Newton iteration on P_32.
Rule make_gauss_legendre_32() {
    constexpr int n = 32;
    Rule rule{};
    for (int i = 0; i < n; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int it = 0; it < 100; ++it) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            dp = n * (x * p1 - p0) / (x * x - 1.0);
        }
        rule.nodes[i] = x;
        rule.weights[i] = 2.0 / ((1.0 - x * x) * dp * dp);
    }
    return rule;
}

const Rule &gauss_legendre_32() {
    static const Rule rule = make_gauss_legendre_32();
    return rule;
}

// QUADPACK qk15 abscissae and weights.
constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
    double lo;
    double hi;
    int depth;
};

double gauss_panel(const std::function<double(double)> &g, double lo, double hi) {
    const Rule &rule = gauss_legendre_32();
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    double sum = 0.0;
    for (int i = 0; i < 32; ++i) sum += rule.weights[i] * g(mid + half * rule.nodes[i]);
    return half * sum;
}

// Returns (kronrod, |kronrod - gauss|).
std::pair<double, double> kronrod_panel(const std::function<double(double)> &g, double lo,
                                        double hi) {
    const double half = 0.5 * (hi - lo);
    const double mid = 0.5 * (hi + lo);
    const double fc = g(mid);
    double kronrod = fc * kWgk[7];
    double gauss = fc * kWg[3];
    for (int j = 0; j < 7; ++j) {
        const double dx = half * kXgk[j];
        const double sum = g(mid - dx) + g(mid + dx);
        kronrod += kWgk[j] * sum;
        if (j % 2 == 1) gauss += kWg[j / 2] * sum;
    }
    return {kronrod * half, std::abs((kronrod - gauss) * half)};
}

// Adaptive bisection driver. `estimate` returns (value, error) for a panel;
// panels are accepted when their error is within their share of the tolerance.
template <typename Estimate>
Result adapt(const Estimate &estimate, const std::vector<double> &edges, const Options &options,
             const char *who) {
    const double total_width = edges.back() - edges.front();
    Result result;
    double magnitude = 0.0;
    struct Pending {
        Panel panel;
        double value;
        double error;
    };
    std::vector<Pending> stack;
    for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
        const auto [v, e] = estimate(edges[i], edges[i + 1]);
        stack.push_back({{edges[i], edges[i + 1], 0}, v, e});
        magnitude += std::abs(v);
    }
    std::reverse(stack.begin(), stack.end());
    while (!stack.empty()) {
        const Pending item = stack.back();
        stack.pop_back();
        const double width = item.panel.hi - item.panel.lo;
        const double share = std::max(options.abs_tol * width / total_width,
                                      options.rel_tol * std::abs(item.value));
        const double relative_share = options.rel_tol * magnitude * width / total_width;
        if (item.error <= std::max(share, relative_share) || item.panel.depth >= options.max_depth) {
            result.value += item.value;
            result.error += item.error;
            ++result.panels;
            continue;
        }
        const double mid = 0.5 * (item.panel.lo + item.panel.hi);
        const auto [vl, el] = estimate(item.panel.lo, mid);
        const auto [vr, er] = estimate(mid, item.panel.hi);
        // Push right first so the left half is processed next (fixed order).
        stack.push_back({{mid, item.panel.hi, item.panel.depth + 1}, vr, er});
        stack.push_back({{item.panel.lo, mid, item.panel.depth + 1}, vl, el});
    }
    if (result.error > std::max(options.fail_abs, options.fail_rel * std::abs(result.value))) {
        throw QuadratureError(std::string(who) + ": tolerance not reached", result.error);
    }
    return result;
}

std::vector<double> panel_edges(double a, double b, std::span<const double> breakpoints,
                                int initial_panels) {
    std::vector<double> cuts{a, b};
    for (double p : breakpoints) {
        if (p > a && p < b) cuts.push_back(p);
    }
    std::sort(cuts.begin(), cuts.end());
    cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());
    std::vector<double> edges;
    for (std::size_t i = 0; i + 1 < cuts.size(); ++i) {
        for (int j = 0; j < initial_panels; ++j) {
            edges.push_back(cuts[i] + (cuts[i + 1] - cuts[i]) * j / initial_panels);
        }
    }
    edges.push_back(b);
    return edges;
}

} // namespace

Result integrate(const std::function<double(double)> &f, double a, double b,
                 std::span<const double> breakpoints, Strategy strategy, const Options &options) {
    if (!(a >= 0.0 && b > a && std::isfinite(b))) {
        throw DomainError("quad::integrate: need 0 <= a < b");
    }
    if (strategy == Strategy::GradedGaussLegendre) {
        // phi = u^2, d phi = 2u du
        const std::function<double(double)> g = [&f](double u) { return 2.0 * u * f(u * u); };
        std::vector<double> mapped;
        mapped.reserve(breakpoints.size());
        for (double p : breakpoints) mapped.push_back(p > 0.0 ? std::sqrt(p) : 0.0);
        const auto edges = panel_edges(std::sqrt(a), std::sqrt(b), mapped, 2);
        const auto estimate = [&g](double lo, double hi) {
            const double whole = gauss_panel(g, lo, hi);
            const double mid = 0.5 * (lo + hi);
            const double split = gauss_panel(g, lo, mid) + gauss_panel(g, mid, hi);
            return std::pair{split, std::abs(split - whole)};
        };
        return adapt(estimate, edges, options, "graded Gauss-Legendre");
    }
    const auto edges = panel_edges(a, b, breakpoints, 4);
    const auto estimate = [&f](double lo, double hi) { return kronrod_panel(f, lo, hi); };
    return adapt(estimate, edges, options, "adaptive Gauss-Kronrod");
}

} // namespace wiener::quad
