#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fwlasso/op_counter.hpp"

namespace fwlasso {

enum class StopReason { tolerance, max_iter, stationary };

std::string to_string(StopReason reason);

/// One monitoring sample of a running solve. dot_products is cumulative for
/// the owning solve's private counter.
struct TraceRow {
    std::uint64_t k = 0;
    double objective = 0.0;
    std::size_t nnz = 0;
    std::uint64_t dot_products = 0;
    std::optional<double> gap;
};

using Trace = std::vector<TraceRow>;

/// Converged (or stopped) solver output, shared by the FW and CD families.
/// objective is the least-squares part 0.5*||X*alpha - y||^2.
struct Solution {
    std::vector<std::pair<std::size_t, double>> alpha;  // sorted by index
    double objective = 0.0;
    std::uint64_t iterations = 0;
    StopReason stop_reason = StopReason::max_iter;
    OpCounter counters;
    double l1_norm = 0.0;
};

}  // namespace fwlasso
