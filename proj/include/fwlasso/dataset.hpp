#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "fwlasso/sparse_matrix.hpp"

namespace fwlasso {

/// A regression problem: m x p design matrix plus m responses. Immutable
/// after construction and safe to share across threads.
struct Dataset {
    SparseColumnMatrix X;
    std::vector<double> y;
    std::optional<std::vector<std::string>> feature_names;

    std::size_t num_rows() const { return X.rows(); }
    std::size_t num_features() const { return X.cols(); }
};

enum class StandardizeMode { unit_norm_columns, center_and_unit_norm, none };

std::string to_string(StandardizeMode mode);

/// What a standardization pass did, with enough information to replay the
/// same transform on held-out data.
struct StandardizationReport {
    double y_mean = 0.0;                // amount subtracted from y (0 when mode=none)
    std::vector<double> column_means;   // all zero when centering was skipped
    std::vector<double> column_norms;   // divisor per column; 0 flags a zero column
    StandardizeMode mode = StandardizeMode::none;

    bool is_zero_column(std::size_t j) const { return column_norms[j] == 0.0; }
};

struct SyntheticSpec {
    std::size_t m_train = 0;
    std::size_t m_test = 0;
    std::size_t p = 0;
    std::size_t n_informative = 0;
    double noise_sd = 0.0;
    double coef_scale = 1.0;
    std::uint64_t seed = 0;
};

struct SyntheticData {
    Dataset train;
    Dataset test;
    std::vector<double> true_coef;
};

/// Reads LIBSVM/SVMLight text: `<label> <idx>:<val> ...` with 1-based,
/// strictly increasing indices per line; `#` starts a comment. p defaults to
/// the largest index seen; a positive p_override fixes it instead (indices
/// beyond it are a dimension error). Explicitly stored zeros are dropped.
Dataset parse_libsvm(std::istream& in, std::size_t p_override = 0);

/// Writes the dataset back out in LIBSVM format, shortest round-trip digits.
void write_libsvm(std::ostream& out, const Dataset& ds);

/// Reads CSV with a header row; the last column is the response.
Dataset parse_csv(std::istream& in);

/// Dense Gaussian design, linear response from exactly n_informative nonzero
/// coefficients, additive Gaussian noise. Train and test are drawn from the
/// same model; identical seeds give bit-identical output.
SyntheticData generate_synthetic(const SyntheticSpec& spec);

/// Standardizes in the requested mode. y is centered in every mode except
/// none. Zero columns are never divided by; they keep norm 0 in the report.
/// center_and_unit_norm materializes one dense column at a time (transient
/// O(m) scratch) and generally destroys sparsity in the output.
std::pair<Dataset, StandardizationReport> standardize(Dataset ds, StandardizeMode mode);

/// Applies a training-set transform to held-out data (same column divisors,
/// same means, same y shift).
Dataset apply_standardization(Dataset ds, const StandardizationReport& report);

}  // namespace fwlasso
