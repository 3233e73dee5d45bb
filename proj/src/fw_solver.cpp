#include "fwlasso/fw_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fwlasso/errors.hpp"

namespace fwlasso {

namespace {
constexpr double kPruneThreshold = 1e-14;
constexpr double kStationaryGradientScale = 1e-14;
constexpr double kDegenerateDenominator = 1e-30;
constexpr double kWarmStartSlack = 1e-9;
constexpr double kFeasibilitySlack = 1e-10;
constexpr double kCacheTolerance = 1e-8;
}  // namespace

std::string to_string(StopReason reason) {
    switch (reason) {
        case StopReason::tolerance: return "tolerance";
        case StopReason::max_iter: return "max_iter";
        case StopReason::stationary: return "stationary";
    }
    return "?";
}

FwProblem FwProblem::build(const SparseColumnMatrix& X, std::span<const double> y,
                           double delta, OpCounter& ctr) {
    if (!(delta > 0.0)) throw ContractViolation("FwProblem: delta must be > 0");
    if (y.size() != X.rows()) throw DimensionError("FwProblem: y length != m");

    FwProblem problem;
    problem.X_ = &X;
    problem.y_span_ = y;
    problem.delta_ = delta;

    auto sigma = std::make_shared<std::vector<double>>(X.cols());
    double sigma_inf = 0.0;
    for (std::size_t i = 0; i < X.cols(); ++i) {
        (*sigma)[i] = col_dot_dense(X, i, y, ctr);
        sigma_inf = std::max(sigma_inf, std::abs((*sigma)[i]));
    }
    problem.sigma_ = std::move(sigma);
    problem.sigma_inf_ = sigma_inf;
    problem.col_norms_sq_ =
        std::make_shared<const std::vector<double>>(col_norms_sq(X, ctr));

    double yty = 0.0;
    for (double v : y) yty += v * v;
    problem.yty_ = yty;
    return problem;
}

FwProblem FwProblem::with_delta(double delta) const {
    if (!(delta > 0.0)) throw ContractViolation("FwProblem: delta must be > 0");
    FwProblem copy = *this;
    copy.delta_ = delta;
    return copy;
}

FwState::FwState(const FwProblem& problem,
                 std::span<const std::pair<std::size_t, double>> warm_start,
                 OpCounter& ctr)
    : q_(problem.num_rows(), 0.0) {
    double l1 = 0.0;
    for (const auto& [i, a] : warm_start) {
        if (i >= problem.num_features())
            throw ContractViolation("warm start index out of range");
        if (a == 0.0) continue;
        if (pos_.contains(i)) throw ContractViolation("duplicate warm start index");
        pos_.emplace(i, idx_.size());
        idx_.push_back(i);
        val_.push_back(a);
        l1 += std::abs(a);
    }
    if (l1 > problem.delta() * (1.0 + kWarmStartSlack))
        throw ContractViolation("warm start violates the l1 constraint");
    l1_norm_ = l1;
    nnz0_ = idx_.size();

    // Recursions only compose within one run: rebuild p, S, F from scratch.
    for (std::size_t s = 0; s < idx_.size(); ++s)
        col_axpy(problem.X(), idx_[s], val_[s], q_, ctr);
    double S = 0.0;
    for (double v : q_) S += v * v;
    S_ = S;
    double F = 0.0;
    const auto sigma = problem.sigma();
    for (std::size_t s = 0; s < idx_.size(); ++s) F += val_[s] * sigma[idx_[s]];
    F_ = F;
}

double FwState::coefficient(std::size_t i) const {
    const auto it = pos_.find(i);
    return it == pos_.end() ? 0.0 : val_[it->second];
}

std::vector<std::pair<std::size_t, double>> FwState::sorted_coefficients() const {
    std::vector<std::pair<std::size_t, double>> out;
    out.reserve(idx_.size());
    for (std::size_t s = 0; s < idx_.size(); ++s) out.emplace_back(idx_[s], val_[s]);
    std::sort(out.begin(), out.end());
    return out;
}

std::vector<double> FwState::materialize_p() const {
    std::vector<double> p(q_.size());
    for (std::size_t r = 0; r < q_.size(); ++r) p[r] = p_scale_ * q_[r];
    return p;
}

double FwState::column_dot_p(const FwProblem& problem, std::size_t i,
                             OpCounter& ctr) const {
    return p_scale_ * col_dot_dense(problem.X(), i, q_, ctr);
}

void FwState::audit(const FwProblem& problem) const {
    OpCounter scratch;  // diagnostics are not solver work
    std::vector<double> p_ref(q_.size(), 0.0);
    for (std::size_t s = 0; s < idx_.size(); ++s)
        col_axpy(problem.X(), idx_[s], val_[s], p_ref, scratch);

    const auto y = problem.y();
    double y_inf = 0.0;
    for (double v : y) y_inf = std::max(y_inf, std::abs(v));

    double cache_err = 0.0;
    for (std::size_t r = 0; r < q_.size(); ++r)
        cache_err = std::max(cache_err, std::abs(p_scale_ * q_[r] - p_ref[r]));

    double S_direct = 0.0, F_direct = 0.0;
    for (std::size_t r = 0; r < p_ref.size(); ++r) {
        S_direct += p_ref[r] * p_ref[r];
        F_direct += y[r] * p_ref[r];
    }

    double l1 = 0.0;
    for (double v : val_) l1 += std::abs(v);

    std::ostringstream why;
    if (cache_err > kCacheTolerance * (1.0 + y_inf))
        why << "p cache drift " << cache_err << "; ";
    if (std::abs(S_ - S_direct) > kCacheTolerance * (1.0 + std::abs(S_direct)))
        why << "S recursion drift " << std::abs(S_ - S_direct) << "; ";
    if (std::abs(F_ - F_direct) > kCacheTolerance * (1.0 + std::abs(F_direct)))
        why << "F recursion drift " << std::abs(F_ - F_direct) << "; ";
    if (l1 > problem.delta() * (1.0 + kFeasibilitySlack))
        why << "l1 norm " << l1 << " exceeds delta " << problem.delta() << "; ";
    if (idx_.size() > k_ + nnz0_)
        why << "nnz " << idx_.size() << " exceeds k + nnz0 = " << k_ + nnz0_ << "; ";

    const std::string message = why.str();
    if (!message.empty()) {
        std::ostringstream os;
        os << "FW state audit failed at k=" << k_ << ": " << message << "(S=" << S_
           << ", F=" << F_ << ", nnz=" << idx_.size() << ", p_scale=" << p_scale_ << ")";
        throw NumericError(os.str());
    }
}

void FwState::prune_slot(std::size_t slot) {
    pos_.erase(idx_[slot]);
    const std::size_t last = idx_.size() - 1;
    if (slot != last) {
        idx_[slot] = idx_[last];
        val_[slot] = val_[last];
        pos_[idx_[slot]] = slot;
    }
    idx_.pop_back();
    val_.pop_back();
}

FwChoice select_vertex(const FwState& state, const FwProblem& problem,
                       std::span<const std::size_t> sample, OpCounter& ctr) {
    if (sample.empty()) throw ContractViolation("select_vertex: empty sample");
    const auto sigma = problem.sigma();
    // Ascending scan with a strict comparison: ties go to the lowest index.
    double best_abs = -1.0;
    FwChoice choice;
    for (const std::size_t i : sample) {
        ++ctr.coordinate_touches;
        const double g = -sigma[i] + state.column_dot_p(problem, i, ctr);
        if (std::abs(g) > best_abs) {
            best_abs = std::abs(g);
            choice.index = i;
            choice.gradient = g;
        }
    }
    choice.delta_tilde = choice.gradient < 0.0 ? problem.delta() : -problem.delta();
    return choice;
}

LineSearchResult line_search(const FwState& state, const FwProblem& problem,
                             std::size_t index, double delta_tilde, double gradient) {
    const double G = gradient + problem.sigma()[index];  // = z_i' p
    const double denom = state.S() - 2.0 * delta_tilde * G +
                         delta_tilde * delta_tilde * problem.col_norms_sq()[index];
    const double num = state.S() - delta_tilde * gradient - state.F();
    if (!std::isfinite(num) || !std::isfinite(denom)) {
        std::ostringstream os;
        os << "line_search: non-finite step at k=" << state.iteration() << " (S="
           << state.S() << ", F=" << state.F() << ", g=" << gradient << ", i=" << index
           << ", denom=" << denom << ")";
        throw NumericError(os.str());
    }
    if (denom <= kDegenerateDenominator) return {0.0, true};
    return {std::clamp(num / denom, 0.0, 1.0), false};
}

void apply_step(FwState& state, const FwProblem& problem, std::size_t index,
                double delta_tilde, double lambda, double gradient, OpCounter& ctr) {
    if (!(lambda >= 0.0 && lambda <= 1.0))
        throw ContractViolation("apply_step: lambda must lie in [0,1]");
    if (lambda == 0.0) {
        state.skip_iteration();
        return;
    }
    const double keep = 1.0 - lambda;

    // Make sure the target slot exists so the rescale pass covers it too.
    auto it = state.pos_.find(index);
    if (it == state.pos_.end()) {
        state.pos_.emplace(index, state.idx_.size());
        state.idx_.push_back(index);
        state.val_.push_back(0.0);
    }

    double max_change = 0.0;
    for (std::size_t s = 0; s < state.idx_.size(); ++s) {
        const double old = state.val_[s];
        double next = keep * old;
        if (state.idx_[s] == index) next += delta_tilde * lambda;
        state.val_[s] = next;
        max_change = std::max(max_change, std::abs(next - old));
    }

    double l1 = 0.0;
    for (std::size_t s = 0; s < state.idx_.size();) {
        if (std::abs(state.val_[s]) < kPruneThreshold) {
            state.prune_slot(s);
        } else {
            l1 += std::abs(state.val_[s]);
            ++s;
        }
    }
    state.l1_norm_ = l1;
    state.last_max_coord_change_ = max_change;

    if (keep == 0.0) {
        std::fill(state.q_.begin(), state.q_.end(), 0.0);
        state.p_scale_ = 1.0;
        col_axpy(problem.X(), index, delta_tilde, state.q_, ctr);
    } else {
        state.p_scale_ *= keep;
        col_axpy(problem.X(), index, delta_tilde * lambda / state.p_scale_, state.q_,
                 ctr);
        if (state.p_scale_ < 1e-150) {
            for (double& v : state.q_) v *= state.p_scale_;
            state.p_scale_ = 1.0;
        }
    }

    const double G = gradient + problem.sigma()[index];
    state.S_ = keep * keep * state.S_ + 2.0 * delta_tilde * lambda * keep * G +
               delta_tilde * delta_tilde * lambda * lambda *
                   problem.col_norms_sq()[index];
    state.F_ = keep * state.F_ + delta_tilde * lambda * problem.sigma()[index];
    ++state.k_;
}

double duality_gap(const FwState& state, const FwProblem& problem, OpCounter& ctr) {
    const std::vector<double> p_vec = state.materialize_p();
    const std::vector<double> grad =
        full_gradient(problem.X(), p_vec, problem.sigma(), ctr);
    double grad_inf = 0.0;
    for (double g : grad) grad_inf = std::max(grad_inf, std::abs(g));
    double alpha_dot_grad = 0.0;
    for (const auto& [i, a] : state.sorted_coefficients()) alpha_dot_grad += a * grad[i];
    return alpha_dot_grad + problem.delta() * grad_inf;
}

FwResult solve(const FwProblem& problem, const FwOptions& options,
               std::span<const std::pair<std::size_t, double>> warm_start) {
    if (!(options.epsilon > 0.0)) throw ContractViolation("FwOptions: epsilon must be > 0");
    if (options.max_iter < 1) throw ContractViolation("FwOptions: max_iter must be >= 1");

    OpCounter ctr;
    FwState state(problem, warm_start, ctr);
    Rng rng(options.sampling.seed);
    const std::size_t p = problem.num_features();

    std::vector<std::size_t> full_scan;  // built lazily for kappa = p
    const double stationary_threshold =
        kStationaryGradientScale * (1.0 + problem.sigma_inf());

    FwResult result;
    auto record = [&](std::uint64_t k) {
        TraceRow row;
        row.k = k;
        row.objective = state.objective(problem);
        row.nnz = state.nnz();
        if (options.audit_gap_every > 0 &&
            (k == 0 || k % options.audit_gap_every == 0))
            row.gap = duality_gap(state, problem, ctr);
        row.dot_products = ctr.dot_products;
        result.trace.push_back(row);
    };
    if (options.trace_every > 0) record(0);

    StopReason reason = StopReason::max_iter;
    while (state.iteration() < options.max_iter) {
        const std::size_t kappa =
            options.sampling.resolve_kappa(p, state.nnz());
        std::vector<std::size_t> subset;
        std::span<const std::size_t> sample;
        if (kappa == p) {
            if (full_scan.empty()) {
                full_scan.resize(p);
                for (std::size_t i = 0; i < p; ++i) full_scan[i] = i;
            }
            sample = full_scan;
        } else {
            subset = draw_subset(p, kappa, rng);
            sample = subset;
        }
        const bool deterministic = kappa == p;

        const FwChoice choice = select_vertex(state, problem, sample, ctr);
        bool degenerate = std::abs(choice.gradient) <= stationary_threshold;
        double lambda = 0.0;
        if (!degenerate) {
            const LineSearchResult ls =
                line_search(state, problem, choice.index, choice.delta_tilde,
                            choice.gradient);
            lambda = ls.lambda;
            degenerate = ls.stationary;
        }

        if (degenerate) {
            // No usable direction in this sample. A full scan certifies
            // global stationarity; a random sample only yields a zero step.
            state.skip_iteration();
            if (deterministic) {
                reason = StopReason::stationary;
                if (options.trace_every > 0) record(state.iteration());
                break;
            }
        } else {
            apply_step(state, problem, choice.index, choice.delta_tilde, lambda,
                       choice.gradient, ctr);
        }

        const std::uint64_t k = state.iteration();
        if (options.check_interval > 0 && k % options.check_interval == 0)
            state.audit(problem);
        if (options.trace_every > 0 && k % options.trace_every == 0) record(k);

        if (options.stop_rule == FwStopRule::coordinate_change) {
            if (state.last_max_coord_change() <= options.epsilon) {
                reason = StopReason::tolerance;
                break;
            }
        } else if (k % options.gap_check_every == 0) {
            if (duality_gap(state, problem, ctr) <= options.epsilon) {
                reason = StopReason::tolerance;
                break;
            }
        }
    }

    if (options.check_interval > 0) state.audit(problem);
    if (options.trace_every > 0 &&
        (result.trace.empty() || result.trace.back().k != state.iteration()))
        record(state.iteration());

    Solution& sol = result.solution;
    sol.alpha = state.sorted_coefficients();
    sol.objective = state.objective(problem);
    sol.iterations = state.iteration();
    sol.stop_reason = reason;
    sol.counters = ctr;
    sol.l1_norm = state.l1_norm();
    return result;
}

}  // namespace fwlasso
