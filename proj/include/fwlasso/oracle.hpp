#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fwlasso/sparse_matrix.hpp"

namespace fwlasso {

/// Dense row-major matrix for the reference path. Deliberately separate from
/// the sparse kernels so the two routes share no arithmetic.
struct DenseMatrix {
    std::size_t rows = 0;
    std::size_t cols = 0;
    std::vector<double> data;  // rows * cols, row-major

    static DenseMatrix from_sparse(const SparseColumnMatrix& X);

    double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
    double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }

    std::vector<double> multiply(std::span<const double> v) const;
    std::vector<double> multiply_transpose(std::span<const double> v) const;
};

struct OracleResult {
    std::vector<double> alpha;   // dense, length p
    double f_star = 0.0;         // 0.5*||X*alpha - y||^2
    double certified_gap = 0.0;  // duality gap at alpha
    std::uint64_t iterations = 0;
};

/// Euclidean projection of v onto the l1 ball of radius delta (sort-based).
/// Returns v unchanged when it is already inside.
std::vector<double> project_l1_ball(std::span<const double> v, double delta);

/// High-precision reference for the constrained Lasso, used by tests and
/// verification runs only: accelerated projected gradient with adaptive
/// restart, a KKT refinement on the detected support, and a duality-gap
/// certificate. Throws OracleFailure if the gap cannot be driven to tol.
/// Densifies: keep it away from anything performance-sensitive.
OracleResult solve_constrained_reference(const DenseMatrix& X, std::span<const double> y,
                                         double delta, double tol = 1e-10,
                                         std::uint64_t max_iter = 2000000);

/// Least-squares solution used to size test instances: minimum-norm when the
/// system is underdetermined (p > m), the normal-equations solution
/// otherwise.
std::vector<double> least_squares(const DenseMatrix& X, std::span<const double> y);

}  // namespace fwlasso
