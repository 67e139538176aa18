#include "wiener/oracles.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include <Eigen/Dense>

#include "wiener/errors.hpp"

namespace wiener::oracle {

namespace {

std::vector<double> decreasing(const Eigen::VectorXd &values) {
    std::vector<double> out(values.data(), values.data() + values.size());
    std::sort(out.begin(), out.end(), std::greater<>());
    return out;
}

} // namespace

DenseEigen min_covariance_eigen(const ProcessParams &params, std::size_t n) {
    if (n == 0) throw DomainError("min_covariance_eigen: n must be >= 1");
    const auto dim = static_cast<Eigen::Index>(n);
    Eigen::MatrixXd cov(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j < dim; ++j) {
            cov(i, j) = params.sample_variance() * static_cast<double>(std::min(i, j) + 1);
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("min_covariance_eigen: eigensolver failed");
    }
    DenseEigen out;
    out.n = n;
    out.eigenvalues.resize(n);
    out.eigenvectors.resize(n * n);
    // Eigen returns ascending order.
    for (std::size_t c = 0; c < n; ++c) {
        const auto src = static_cast<Eigen::Index>(n - 1 - c);
        out.eigenvalues[c] = solver.eigenvalues()(src);
        for (std::size_t r = 0; r < n; ++r) {
            out.eigenvectors[c * n + r] = solver.eigenvectors()(static_cast<Eigen::Index>(r), src);
        }
    }
    return out;
}

std::vector<double> nystrom_dense_eigenvalues(const ProcessParams &params, std::size_t intervals,
                                              std::size_t points_per_interval) {
    const KernelGrid grid(params, intervals, points_per_interval);
    const auto dim = static_cast<Eigen::Index>(grid.size());
    const auto nodes = grid.nodes();
    const auto weights = grid.weights();
    Eigen::MatrixXd a(dim, dim);
    for (Eigen::Index i = 0; i < dim; ++i) {
        for (Eigen::Index j = 0; j <= i; ++j) {
            const auto ui = static_cast<std::size_t>(i);
            const auto uj = static_cast<std::size_t>(j);
            const double v = std::sqrt(weights[ui] * weights[uj]) *
                             interp_kernel(params, nodes[ui], nodes[uj]);
            a(i, j) = v;
            a(j, i) = v;
        }
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(a, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("nystrom_dense_eigenvalues: eigensolver failed");
    }
    return decreasing(solver.eigenvalues());
}

std::vector<double> nystrom_subspace_eigenvalues(const ProcessParams &params,
                                                 std::size_t intervals,
                                                 std::size_t points_per_interval,
                                                 std::size_t block, int power_iterations,
                                                 std::uint64_t seed) {
    const KernelGrid grid(params, intervals, points_per_interval);
    const std::size_t dim = grid.size();
    block = std::min(block, dim);
    const auto rows = static_cast<Eigen::Index>(dim);
    const auto cols = static_cast<Eigen::Index>(block);

    Eigen::VectorXd sqrt_w(rows);
    for (std::size_t i = 0; i < dim; ++i) sqrt_w(static_cast<Eigen::Index>(i)) = std::sqrt(grid.weights()[i]);

    // apply() already carries the weights: W^{1/2} K W^{1/2} x = W^{1/2} apply(W^{-1/2} x).
    std::vector<double> in(dim), out(dim);
    auto apply_block = [&](const Eigen::MatrixXd &x) {
        Eigen::MatrixXd y(rows, cols);
        for (Eigen::Index c = 0; c < cols; ++c) {
            for (Eigen::Index i = 0; i < rows; ++i) in[static_cast<std::size_t>(i)] = x(i, c) / sqrt_w(i);
            grid.apply(in, out);
            for (Eigen::Index i = 0; i < rows; ++i) y(i, c) = sqrt_w(i) * out[static_cast<std::size_t>(i)];
        }
        return y;
    };
    auto orthonormalize = [&](const Eigen::MatrixXd &x) {
        Eigen::HouseholderQR<Eigen::MatrixXd> qr(x);
        return Eigen::MatrixXd(qr.householderQ() * Eigen::MatrixXd::Identity(rows, cols));
    };

    std::mt19937_64 engine(seed);
    std::normal_distribution<double> normal;
    Eigen::MatrixXd q(rows, cols);
    for (Eigen::Index c = 0; c < cols; ++c)
        for (Eigen::Index i = 0; i < rows; ++i) q(i, c) = normal(engine);
    q = orthonormalize(q);
    for (int it = 0; it < power_iterations; ++it) q = orthonormalize(apply_block(q));

    const Eigen::MatrixXd aq = apply_block(q);
    Eigen::MatrixXd projected = q.transpose() * aq;
    projected = 0.5 * (projected + projected.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(projected, Eigen::EigenvaluesOnly);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("nystrom_subspace_eigenvalues: eigensolver failed");
    }
    return decreasing(solver.eigenvalues());
}

} // namespace wiener::oracle
