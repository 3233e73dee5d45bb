#pragma once

#include <cstdint>

namespace fwlasso {

/// Machine-independent cost ledger. Counts kernel invocations, not scalar
/// multiplies: one predictor/vector inner product is one dot product no
/// matter how many nonzeros the column holds. Dense vector-vector products
/// (y'y, ||p||^2) are not predictor dot products and are not counted.
struct OpCounter {
    std::uint64_t dot_products = 0;
    std::uint64_t axpy_ops = 0;
    std::uint64_t coordinate_touches = 0;

    OpCounter& operator+=(const OpCounter& other) {
        dot_products += other.dot_products;
        axpy_ops += other.axpy_ops;
        coordinate_touches += other.coordinate_touches;
        return *this;
    }

    friend OpCounter operator+(OpCounter a, const OpCounter& b) { return a += b; }

    friend bool operator==(const OpCounter&, const OpCounter&) = default;
};

}  // namespace fwlasso
