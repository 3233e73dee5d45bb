#include "fwlasso/cd_solver.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <sstream>

#include "fwlasso/errors.hpp"

namespace fwlasso {

CdProblem CdProblem::build(const SparseColumnMatrix& X, std::span<const double> y,
                           double lambda, OpCounter& ctr) {
    if (lambda < 0.0) throw ContractViolation("CdProblem: lambda must be >= 0");
    if (y.size() != X.rows()) throw DimensionError("CdProblem: y length != m");

    CdProblem problem;
    problem.X_ = &X;
    problem.y_span_ = y;
    problem.lambda_ = lambda;

    auto sigma = std::make_shared<std::vector<double>>(X.cols());
    for (std::size_t i = 0; i < X.cols(); ++i)
        (*sigma)[i] = col_dot_dense(X, i, y, ctr);
    problem.sigma_ = std::move(sigma);
    problem.col_norms_sq_ =
        std::make_shared<const std::vector<double>>(col_norms_sq(X, ctr));

    double yty = 0.0;
    for (double v : y) yty += v * v;
    problem.yty_ = yty;
    return problem;
}

CdProblem CdProblem::with_lambda(double lambda) const {
    if (lambda < 0.0) throw ContractViolation("CdProblem: lambda must be >= 0");
    CdProblem copy = *this;
    copy.lambda_ = lambda;
    return copy;
}

CdState::CdState(const CdProblem& problem,
                 std::span<const std::pair<std::size_t, double>> warm_start,
                 OpCounter& ctr)
    : alpha(problem.num_features(), 0.0),
      residual(problem.y().begin(), problem.y().end()) {
    for (const auto& [i, a] : warm_start) {
        if (i >= alpha.size()) throw ContractViolation("warm start index out of range");
        alpha[i] = a;
        if (a != 0.0) col_axpy(problem.X(), i, -a, residual, ctr);
    }
}

std::size_t CdState::nnz() const {
    std::size_t count = 0;
    for (double v : alpha)
        if (v != 0.0) ++count;
    return count;
}

double CdState::l1_norm() const {
    double l1 = 0.0;
    for (double v : alpha) l1 += std::abs(v);
    return l1;
}

double CdState::objective() const {
    double sum = 0.0;
    for (double v : residual) sum += v * v;
    return 0.5 * sum;
}

void CdState::audit(const CdProblem& problem) const {
    OpCounter scratch;
    std::vector<double> ref(problem.y().begin(), problem.y().end());
    for (std::size_t j = 0; j < alpha.size(); ++j)
        if (alpha[j] != 0.0) col_axpy(problem.X(), j, -alpha[j], ref, scratch);
    double y_inf = 0.0;
    for (double v : problem.y()) y_inf = std::max(y_inf, std::abs(v));
    double err = 0.0;
    for (std::size_t r = 0; r < ref.size(); ++r)
        err = std::max(err, std::abs(residual[r] - ref[r]));
    if (err > 1e-8 * (1.0 + y_inf)) {
        std::ostringstream os;
        os << "CD residual cache drifted by " << err << " at epoch " << epoch;
        throw NumericError(os.str());
    }
}

double soft_threshold(double x, double t) {
    if (t < 0.0) throw ContractViolation("soft_threshold: t must be >= 0");
    const double shrunk = std::abs(x) - t;
    if (shrunk <= 0.0) return 0.0;
    return x < 0.0 ? -shrunk : shrunk;
}

namespace {

// Exact single-coordinate minimizer; returns |change|.
double update_coordinate(CdState& state, const CdProblem& problem, std::size_t j,
                         OpCounter& ctr) {
    const double norm_sq = problem.col_norms_sq()[j];
    if (norm_sq == 0.0) return 0.0;
    ++ctr.coordinate_touches;
    const double rho =
        col_dot_dense(problem.X(), j, state.residual, ctr) + state.alpha[j] * norm_sq;
    const double next = soft_threshold(rho, problem.lambda()) / norm_sq;
    const double change = next - state.alpha[j];
    if (change != 0.0) {
        state.alpha[j] = next;
        col_axpy(problem.X(), j, -change, state.residual, ctr);
    }
    return std::abs(change);
}

}  // namespace

double cd_epoch(CdState& state, const CdProblem& problem, CdOrder order, Rng& rng,
                OpCounter& ctr) {
    const std::size_t p = problem.num_features();
    double max_delta = 0.0;
    switch (order) {
        case CdOrder::cyclic:
            for (std::size_t j = 0; j < p; ++j)
                max_delta = std::max(max_delta, update_coordinate(state, problem, j, ctr));
            break;
        case CdOrder::random_permutation: {
            std::vector<std::size_t> perm(p);
            std::iota(perm.begin(), perm.end(), std::size_t{0});
            for (std::size_t i = p; i > 1; --i)
                std::swap(perm[i - 1], perm[rng.below(i)]);
            for (const std::size_t j : perm)
                max_delta = std::max(max_delta, update_coordinate(state, problem, j, ctr));
            break;
        }
        case CdOrder::iid_uniform:
            for (std::size_t n = 0; n < p; ++n) {
                const auto j = static_cast<std::size_t>(rng.below(p));
                max_delta = std::max(max_delta, update_coordinate(state, problem, j, ctr));
            }
            break;
    }
    ++state.epoch;
    return max_delta;
}

CdResult solve_penalized(const CdProblem& problem, const CdOptions& options,
                         std::span<const std::pair<std::size_t, double>> warm_start) {
    if (!(options.epsilon > 0.0)) throw ContractViolation("CdOptions: epsilon must be > 0");
    if (options.max_epochs < 1) throw ContractViolation("CdOptions: max_epochs must be >= 1");

    OpCounter ctr;
    CdState state(problem, warm_start, ctr);
    Rng rng(options.seed);

    CdResult result;
    auto record = [&]() {
        result.trace.push_back(
            {state.epoch, state.objective(), state.nnz(), ctr.dot_products, {}});
    };
    if (options.trace_every > 0) record();

    StopReason reason = StopReason::max_iter;
    while (state.epoch < options.max_epochs) {
        const double max_delta = cd_epoch(state, problem, options.order, rng, ctr);

        if (options.active_set_cycling && max_delta > options.epsilon) {
            // Converge on the current support, then fall through to the next
            // full pass to pick up newly relevant coordinates. Each inner
            // sweep counts as an epoch.
            std::vector<std::size_t> active;
            for (std::size_t j = 0; j < state.alpha.size(); ++j)
                if (state.alpha[j] != 0.0) active.push_back(j);
            double inner_delta = options.epsilon + 1.0;
            while (inner_delta > options.epsilon && state.epoch < options.max_epochs &&
                   !active.empty()) {
                inner_delta = 0.0;
                for (const std::size_t j : active)
                    inner_delta =
                        std::max(inner_delta, update_coordinate(state, problem, j, ctr));
                ++state.epoch;
            }
        }

        if (options.check_interval > 0 && state.epoch % options.check_interval == 0)
            state.audit(problem);
        if (options.trace_every > 0 && state.epoch % options.trace_every == 0) record();

        if (max_delta <= options.epsilon) {
            reason = StopReason::tolerance;
            break;
        }
    }

    if (options.check_interval > 0) state.audit(problem);
    if (options.trace_every > 0 &&
        (result.trace.empty() || result.trace.back().k != state.epoch))
        record();

    Solution& sol = result.solution;
    for (std::size_t j = 0; j < state.alpha.size(); ++j)
        if (state.alpha[j] != 0.0) sol.alpha.emplace_back(j, state.alpha[j]);
    sol.objective = state.objective();
    sol.iterations = state.epoch;
    sol.stop_reason = reason;
    sol.counters = ctr;
    sol.l1_norm = state.l1_norm();
    return result;
}

}  // namespace fwlasso
