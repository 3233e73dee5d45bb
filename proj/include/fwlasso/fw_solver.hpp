#pragma once

#include <memory>
#include <span>
#include <unordered_map>
#include <vector>

#include "fwlasso/sampling.hpp"
#include "fwlasso/solution.hpp"
#include "fwlasso/sparse_matrix.hpp"

namespace fwlasso {

/// Immutable description of one constrained Lasso instance
/// min 0.5*||X*alpha - y||^2 s.t. ||alpha||_1 <= delta, with the
/// per-predictor quantities the iteration needs precomputed:
/// sigma_i = z_i'y and ||z_i||^2. Shareable across concurrent solves;
/// with_delta() rebinds the radius without copying the vectors.
class FwProblem {
public:
    static FwProblem build(const SparseColumnMatrix& X, std::span<const double> y,
                           double delta, OpCounter& ctr);

    FwProblem with_delta(double delta) const;

    const SparseColumnMatrix& X() const { return *X_; }
    std::span<const double> y() const { return y_span_; }
    double delta() const { return delta_; }
    std::span<const double> sigma() const { return *sigma_; }
    std::span<const double> col_norms_sq() const { return *col_norms_sq_; }
    double yty() const { return yty_; }
    double sigma_inf() const { return sigma_inf_; }
    std::size_t num_features() const { return X_->cols(); }
    std::size_t num_rows() const { return X_->rows(); }

private:
    FwProblem() = default;

    const SparseColumnMatrix* X_ = nullptr;
    std::span<const double> y_span_;
    double delta_ = 0.0;
    std::shared_ptr<const std::vector<double>> sigma_;
    std::shared_ptr<const std::vector<double>> col_norms_sq_;
    double yty_ = 0.0;
    double sigma_inf_ = 0.0;
};

/// Solver iterate: sparse coefficients, the cached product p = X*alpha, and
/// the two recursion scalars S = ||X*alpha||^2 and F = y'X*alpha.
///
/// p is stored as scale * q so that a step only rescales one scalar and
/// touches one column, keeping the per-iteration cost independent of m.
class FwState {
public:
    /// Zero start, or a warm start recomputing p, S, F from scratch in
    /// O(nnz(alpha0)) column operations. Throws ContractViolation when the
    /// warm start is infeasible (||alpha0||_1 > delta*(1+1e-9)).
    FwState(const FwProblem& problem,
            std::span<const std::pair<std::size_t, double>> warm_start, OpCounter& ctr);

    std::uint64_t iteration() const { return k_; }
    std::size_t nnz() const { return idx_.size(); }
    std::size_t initial_nnz() const { return nnz0_; }
    double l1_norm() const { return l1_norm_; }
    double S() const { return S_; }
    double F() const { return F_; }
    double coefficient(std::size_t i) const;
    double last_max_coord_change() const { return last_max_coord_change_; }

    /// 0.5*y'y + 0.5*S - F, tracked recursively.
    double objective(const FwProblem& problem) const {
        return 0.5 * problem.yty() + 0.5 * S_ - F_;
    }

    /// Coefficients sorted by index.
    std::vector<std::pair<std::size_t, double>> sorted_coefficients() const;

    /// Materializes p = X*alpha from the scaled cache (O(m)).
    std::vector<double> materialize_p() const;

    /// z_i' p through the cache; one dot product on the ledger.
    double column_dot_p(const FwProblem& problem, std::size_t i, OpCounter& ctr) const;

    /// Recomputes X*alpha, S and F from scratch and checks the caches and
    /// the feasibility/sparsity invariants; throws NumericError with
    /// diagnostics on drift. Diagnostic work is not charged to any ledger.
    void audit(const FwProblem& problem) const;

    /// Advances the iteration counter without changing the iterate (used
    /// when a sampled gradient is numerically zero).
    void skip_iteration() {
        ++k_;
        last_max_coord_change_ = 0.0;
    }

private:
    friend void apply_step(FwState&, const FwProblem&, std::size_t, double, double,
                           double, OpCounter&);

    void prune_slot(std::size_t slot);

    std::vector<std::size_t> idx_;
    std::vector<double> val_;
    std::unordered_map<std::size_t, std::size_t> pos_;
    std::vector<double> q_;      // p = p_scale_ * q_
    double p_scale_ = 1.0;
    double S_ = 0.0;
    double F_ = 0.0;
    double l1_norm_ = 0.0;
    std::uint64_t k_ = 0;
    std::size_t nnz0_ = 0;
    double last_max_coord_change_ = 0.0;
};

enum class FwStopRule { coordinate_change, duality_gap };

struct FwOptions {
    double epsilon = 1e-3;        // stopping tolerance
    std::uint64_t max_iter = 100000;
    SamplingPlan sampling;
    std::uint64_t check_interval = 100;  // state audits; 0 disables
    std::uint64_t trace_every = 0;       // 0 = no trace
    std::uint64_t audit_gap_every = 0;   // adds a gap column to traced rows
    FwStopRule stop_rule = FwStopRule::coordinate_change;
    std::uint64_t gap_check_every = 1;   // cadence of the duality-gap stop
};

struct FwChoice {
    std::size_t index = 0;     // i*
    double delta_tilde = 0.0;  // -delta * sign(gradient at i*)
    double gradient = 0.0;     // gradient coordinate at i*
};

struct LineSearchResult {
    double lambda = 0.0;
    bool stationary = false;
};

/// Evaluates the gradient on the sampled coordinates only (|sample| dot
/// products) and picks the one largest in magnitude; ties break to the
/// lowest index, sign(0) counts as +1.
FwChoice select_vertex(const FwState& state, const FwProblem& problem,
                       std::span<const std::size_t> sample, OpCounter& ctr);

/// Closed-form exact line search along the segment to the chosen vertex,
/// clamped to [0,1]. The denominator is ||X*alpha - delta_tilde*z||^2; when
/// it vanishes the step is degenerate and the result is flagged stationary.
LineSearchResult line_search(const FwState& state, const FwProblem& problem,
                             std::size_t index, double delta_tilde, double gradient);

/// alpha <- (1-lambda)*alpha + delta_tilde*lambda*e_index, with the p cache
/// and the S, F recursions updated in O(nnz) and entries below 1e-14 pruned.
void apply_step(FwState& state, const FwProblem& problem, std::size_t index,
                double delta_tilde, double lambda, double gradient, OpCounter& ctr);

/// Duality gap on the l1 ball: alpha'grad + delta*||grad||_inf. Diagnostic;
/// costs p dot products.
double duality_gap(const FwState& state, const FwProblem& problem, OpCounter& ctr);

struct FwResult {
    Solution solution;
    Trace trace;
};

/// Full randomized Frank-Wolfe loop. Stops when the largest coordinate
/// change falls to epsilon (or, under the duality_gap rule, when the gap
/// does), or at max_iter.
FwResult solve(const FwProblem& problem, const FwOptions& options,
               std::span<const std::pair<std::size_t, double>> warm_start = {});

}  // namespace fwlasso
