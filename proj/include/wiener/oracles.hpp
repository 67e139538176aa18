// Brute-force eigen-decomposition oracles. These never touch the closed-form
// eigenvalue formulas and exist to validate them.
#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "wiener/spectral.hpp"

namespace wiener::oracle {

struct DenseEigen {
    std::vector<double> eigenvalues;  ///< decreasing
    std::vector<double> eigenvectors; ///< column-major n x n, column i pairs with eigenvalues[i]
    std::size_t n = 0;

    double vector_entry(std::size_t column, std::size_t row) const {
        return eigenvectors[column * n + row];
    }
};

/// Dense symmetric eigen-decomposition of (sigma^2/fs) min{i,j}, i,j = 1..n.
DenseEigen min_covariance_eigen(const ProcessParams &params, std::size_t n);

/// Eigenvalues of the symmetrized Nystrom matrix W^{1/2} K W^{1/2}, with K
/// evaluated pointwise from interp_kernel() on a uniform trapezoid grid.
/// Dense solve; intended for grids up to a few thousand points.
std::vector<double> nystrom_dense_eigenvalues(const ProcessParams &params, std::size_t intervals,
                                              std::size_t points_per_interval);

/// Leading Ritz values of the same Nystrom matrix by randomized subspace
/// iteration with the matrix-free KernelGrid::apply. Returns `block` values
/// (decreasing); the first `intervals` carry the spectrum, the rest measure
/// the numerical rank deficiency.
std::vector<double> nystrom_subspace_eigenvalues(const ProcessParams &params,
                                                 std::size_t intervals,
                                                 std::size_t points_per_interval,
                                                 std::size_t block, int power_iterations = 3,
                                                 std::uint64_t seed = 20170514);

} // namespace wiener::oracle
