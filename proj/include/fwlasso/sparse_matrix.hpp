#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "fwlasso/errors.hpp"
#include "fwlasso/op_counter.hpp"

namespace fwlasso {

/// Design matrix stored column-wise: every hot operation in the solvers
/// touches one predictor column at a time, so each column keeps its own
/// sorted (row, value) arrays. Immutable after construction and safe to
/// share across concurrent solves.
class SparseColumnMatrix {
public:
    SparseColumnMatrix() = default;
    SparseColumnMatrix(std::size_t rows, std::size_t cols)
        : rows_(rows), row_idx_(cols), values_(cols) {}

    std::size_t rows() const { return rows_; }
    std::size_t cols() const { return row_idx_.size(); }

    std::span<const std::uint32_t> column_rows(std::size_t j) const {
        return row_idx_[j];
    }
    std::span<const double> column_values(std::size_t j) const {
        return values_[j];
    }
    std::size_t column_nnz(std::size_t j) const { return row_idx_[j].size(); }

    std::uint64_t nnz() const {
        std::uint64_t total = 0;
        for (const auto& col : row_idx_) total += col.size();
        return total;
    }

    /// Appends an entry to column j. Entries must arrive in strictly
    /// increasing row order per column; zeros are dropped.
    void push_entry(std::size_t j, std::uint32_t row, double value) {
        if (j >= cols()) throw DimensionError("column index out of range");
        if (row >= rows_) throw DimensionError("row index out of range");
        auto& rows_j = row_idx_[j];
        if (!rows_j.empty() && row <= rows_j.back())
            throw DimensionError("row indices within a column must be strictly increasing");
        if (value == 0.0) return;
        rows_j.push_back(row);
        values_[j].push_back(value);
    }

    /// In-place scale of one column (used by standardization, which owns the
    /// matrix exclusively while transforming it).
    void scale_column(std::size_t j, double factor) {
        for (double& v : values_[j]) v *= factor;
    }

    void set_column(std::size_t j, std::vector<std::uint32_t> rows,
                    std::vector<double> vals) {
        if (rows.size() != vals.size())
            throw DimensionError("index/value arrays differ in length");
        row_idx_[j] = std::move(rows);
        values_[j] = std::move(vals);
    }

private:
    std::size_t rows_ = 0;
    std::vector<std::vector<std::uint32_t>> row_idx_;
    std::vector<std::vector<double>> values_;
};

/// Debug aid: route kernel accumulations through Kahan summation to diagnose
/// argmax ties. Off by default; not meant to be toggled mid-solve.
void set_kahan_summation(bool enabled);
bool kahan_summation_enabled();

/// z_j' v for a dense v of length m. One dot product on the ledger.
double col_dot_dense(const SparseColumnMatrix& a, std::size_t j,
                     std::span<const double> v, OpCounter& ctr);

/// v += scale * z_j, touching stored entries only. One axpy on the ledger.
void col_axpy(const SparseColumnMatrix& a, std::size_t j, double scale,
              std::span<double> v, OpCounter& ctr);

/// Squared Euclidean norm of every column; costs p dot products.
std::vector<double> col_norms_sq(const SparseColumnMatrix& a, OpCounter& ctr);

/// Full gradient of 0.5*||X*alpha - y||^2 given the cached product
/// p = X*alpha and the precomputed sigma_i = z_i' y:
/// entry i = -sigma_i + z_i' p. Diagnostic-only full pass, p dot products.
std::vector<double> full_gradient(const SparseColumnMatrix& a,
                                  std::span<const double> p_vec,
                                  std::span<const double> sigma, OpCounter& ctr);

}  // namespace fwlasso
