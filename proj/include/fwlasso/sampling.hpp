#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fwlasso/rng.hpp"

namespace fwlasso {

/// How each iteration's candidate index set is drawn and sized.
///
/// Subsets are always drawn uniformly over all C(p, kappa) kappa-subsets
/// (without replacement); no with-replacement mode exists, so the sampling
/// expectation identity the solver relies on stays testable as stated.
struct SamplingPlan {
    enum class Mode {
        fixed_size,             // kappa given directly
        fraction_of_p,          // kappa = max(1, ceil(fraction * p))
        confidence_top_fraction,// kappa from (rho, top_fraction)
        confidence_active_set,  // kappa from (rho, running nonzero count)
        full_deterministic,     // kappa = p
    };

    Mode mode = Mode::full_deterministic;
    std::size_t fixed_kappa = 0;
    double fraction = 0.0;
    double rho = 0.0;            // confidence in (0,1)
    double top_fraction = 0.0;   // q in (0,1)
    std::size_t active_estimate = 0;  // s; confidence_active_set re-estimates per iteration
    std::uint64_t seed = 0;

    /// Resolves kappa for a problem with p features. For
    /// confidence_active_set, current_nnz is the running nonzero count
    /// (clamped below by 1 and by the static active_estimate if given).
    std::size_t resolve_kappa(std::size_t p, std::size_t current_nnz = 0) const;

    std::string describe() const;
};

/// kappa distinct indices from {0,...,p-1}, uniform over all C(p, kappa)
/// subsets, returned sorted ascending. Deterministic given the generator
/// state.
std::vector<std::size_t> draw_subset(std::size_t p, std::size_t kappa, Rng& rng);

/// Smallest kappa such that the best sampled gradient coordinate lands in
/// the top q fraction with probability at least rho:
/// kappa = ceil(ln(1-rho)/ln(1-q)), at least 1.
std::size_t size_for_top_fraction(double rho, double q);

/// Sampling size that hits at least one of s active features among p with
/// probability at least rho: nearest integer to ln(1-rho)/ln(1-s/p), clamped
/// to [1, p]. s = p needs a single draw. Evaluated with log1p to avoid
/// cancellation at small s/p.
std::size_t size_for_active_hit(double rho, std::size_t s, std::size_t p);

/// Exact probability that a uniform kappa-subset misses all s marked
/// indices: prod_{j=0}^{kappa-1} (1 - s/(p-j)).
double miss_probability_exact(std::size_t p, std::size_t s, std::size_t kappa);

}  // namespace fwlasso
