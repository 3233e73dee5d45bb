#pragma once

#include <cstdint>
#include <memory>
#include <span>
#include <vector>

#include "fwlasso/rng.hpp"
#include "fwlasso/solution.hpp"
#include "fwlasso/sparse_matrix.hpp"

namespace fwlasso {

/// Penalized Lasso instance: min 0.5*||X*alpha - y||^2 + lambda*||alpha||_1.
/// Shares the precomputed sigma and column norms the same way FwProblem
/// does; with_lambda() rebinds the penalty without copying.
class CdProblem {
public:
    static CdProblem build(const SparseColumnMatrix& X, std::span<const double> y,
                           double lambda, OpCounter& ctr);

    CdProblem with_lambda(double lambda) const;

    const SparseColumnMatrix& X() const { return *X_; }
    std::span<const double> y() const { return y_span_; }
    double lambda() const { return lambda_; }
    std::span<const double> sigma() const { return *sigma_; }
    std::span<const double> col_norms_sq() const { return *col_norms_sq_; }
    double yty() const { return yty_; }
    std::size_t num_features() const { return X_->cols(); }
    std::size_t num_rows() const { return X_->rows(); }

private:
    CdProblem() = default;

    const SparseColumnMatrix* X_ = nullptr;
    std::span<const double> y_span_;
    double lambda_ = 0.0;
    std::shared_ptr<const std::vector<double>> sigma_;
    std::shared_ptr<const std::vector<double>> col_norms_sq_;
    double yty_ = 0.0;
};

/// Coordinate-descent iterate: dense coefficients plus the cached residual
/// R = y - X*alpha, updated one column at a time.
struct CdState {
    std::vector<double> alpha;
    std::vector<double> residual;
    std::uint64_t epoch = 0;

    CdState(const CdProblem& problem,
            std::span<const std::pair<std::size_t, double>> warm_start, OpCounter& ctr);

    std::size_t nnz() const;
    double l1_norm() const;

    /// 0.5*||R||^2, the least-squares part of the objective.
    double objective() const;

    /// Recomputes the residual from scratch and throws NumericError if the
    /// cache drifted beyond 1e-8*(1+||y||_inf).
    void audit(const CdProblem& problem) const;
};

enum class CdOrder { cyclic, random_permutation, iid_uniform };

/// sign(x) * max(|x| - t, 0).
double soft_threshold(double x, double t);

/// One epoch = p single-coordinate updates. cyclic and random_permutation
/// visit every coordinate once; iid_uniform draws p coordinates with
/// replacement (the iteration-equivalence convention: one epoch matches one
/// full pass). Returns the largest coefficient change seen. Zero-norm
/// columns are skipped.
double cd_epoch(CdState& state, const CdProblem& problem, CdOrder order, Rng& rng,
                OpCounter& ctr);

struct CdOptions {
    double epsilon = 1e-3;
    std::uint64_t max_epochs = 100000;
    CdOrder order = CdOrder::cyclic;
    std::uint64_t seed = 0;
    std::uint64_t check_interval = 100;  // epochs between residual audits; 0 disables
    std::uint64_t trace_every = 0;       // epochs between trace rows
    bool active_set_cycling = false;     // Glmnet-style speed trick; off for
                                         // counting clarity
};

struct CdResult {
    Solution solution;
    Trace trace;
};

/// Epochs until the largest coefficient change falls to epsilon or
/// max_epochs runs out. Solution.iterations counts epochs.
CdResult solve_penalized(const CdProblem& problem, const CdOptions& options,
                         std::span<const std::pair<std::size_t, double>> warm_start = {});

}  // namespace fwlasso
