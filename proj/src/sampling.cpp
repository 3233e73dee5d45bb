#include "fwlasso/sampling.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <unordered_set>

#include "fwlasso/errors.hpp"

namespace fwlasso {

std::size_t SamplingPlan::resolve_kappa(std::size_t p, std::size_t current_nnz) const {
    if (p == 0) throw ContractViolation("resolve_kappa: p must be >= 1");
    std::size_t kappa = p;
    switch (mode) {
        case Mode::full_deterministic:
            kappa = p;
            break;
        case Mode::fixed_size:
            if (fixed_kappa < 1 || fixed_kappa > p)
                throw ContractViolation("sample size must lie in [1, p]");
            kappa = fixed_kappa;
            break;
        case Mode::fraction_of_p: {
            if (!(fraction > 0.0) || fraction > 1.0)
                throw ContractViolation("sample fraction must lie in (0, 1]");
            const auto raw = static_cast<std::size_t>(
                std::ceil(fraction * static_cast<double>(p)));
            kappa = std::min(p, std::max<std::size_t>(1, raw));
            break;
        }
        case Mode::confidence_top_fraction:
            kappa = std::min(p, size_for_top_fraction(rho, top_fraction));
            break;
        case Mode::confidence_active_set: {
            std::size_t s = std::max<std::size_t>(1, std::max(current_nnz, active_estimate));
            s = std::min(s, p);
            kappa = size_for_active_hit(rho, s, p);
            break;
        }
    }
    return kappa;
}

std::string SamplingPlan::describe() const {
    std::ostringstream os;
    switch (mode) {
        case Mode::full_deterministic: os << "full"; break;
        case Mode::fixed_size: os << "size=" << fixed_kappa; break;
        case Mode::fraction_of_p: os << "frac=" << fraction; break;
        case Mode::confidence_top_fraction:
            os << "confidence=" << rho << ",top=" << top_fraction;
            break;
        case Mode::confidence_active_set:
            os << "confidence=" << rho << ",active-est=" << active_estimate;
            break;
    }
    return os.str();
}

std::vector<std::size_t> draw_subset(std::size_t p, std::size_t kappa, Rng& rng) {
    if (kappa < 1 || kappa > p)
        throw ContractViolation("draw_subset: kappa must lie in [1, p]");
    std::vector<std::size_t> sample;
    sample.reserve(kappa);
    if (kappa == p) {
        for (std::size_t i = 0; i < p; ++i) sample.push_back(i);
        return sample;
    }
    // Floyd's algorithm: O(kappa) draws, uniform over all C(p, kappa)
    // subsets.
    std::unordered_set<std::size_t> chosen;
    chosen.reserve(kappa * 2);
    for (std::size_t j = p - kappa; j < p; ++j) {
        const std::size_t t = static_cast<std::size_t>(rng.below(j + 1));
        chosen.insert(chosen.contains(t) ? j : t);
    }
    sample.assign(chosen.begin(), chosen.end());
    std::sort(sample.begin(), sample.end());
    return sample;
}

std::size_t size_for_top_fraction(double rho, double q) {
    if (!(rho > 0.0 && rho < 1.0 && q > 0.0 && q < 1.0))
        throw ContractViolation("size_for_top_fraction: rho and q must lie in (0,1)");
    const double ratio = std::log1p(-rho) / std::log1p(-q);
    const auto kappa = static_cast<std::size_t>(std::ceil(ratio));
    return std::max<std::size_t>(1, kappa);
}

std::size_t size_for_active_hit(double rho, std::size_t s, std::size_t p) {
    if (!(rho > 0.0 && rho < 1.0))
        throw ContractViolation("size_for_active_hit: rho must lie in (0,1)");
    if (s < 1 || s > p)
        throw ContractViolation("size_for_active_hit: need 1 <= s <= p");
    if (s == p) return 1;
    const double ratio =
        std::log1p(-rho) / std::log1p(-static_cast<double>(s) / static_cast<double>(p));
    const auto kappa = static_cast<std::size_t>(std::llround(ratio));
    return std::min(p, std::max<std::size_t>(1, kappa));
}

double miss_probability_exact(std::size_t p, std::size_t s, std::size_t kappa) {
    if (s > p || kappa > p)
        throw ContractViolation("miss_probability_exact: need s <= p and kappa <= p");
    double prob = 1.0;
    for (std::size_t j = 0; j < kappa; ++j)
        prob *= 1.0 - static_cast<double>(s) / static_cast<double>(p - j);
    return prob;
}

}  // namespace fwlasso
