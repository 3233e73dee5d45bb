#include "fwlasso/sparse_matrix.hpp"

namespace fwlasso {

namespace {
bool g_kahan = false;
}

void set_kahan_summation(bool enabled) { g_kahan = enabled; }
bool kahan_summation_enabled() { return g_kahan; }

double col_dot_dense(const SparseColumnMatrix& a, std::size_t j,
                     std::span<const double> v, OpCounter& ctr) {
    if (j >= a.cols()) throw ContractViolation("col_dot_dense: column out of range");
    if (v.size() != a.rows()) throw ContractViolation("col_dot_dense: vector length != m");
    ++ctr.dot_products;
    const auto rows = a.column_rows(j);
    const auto vals = a.column_values(j);
    if (g_kahan) {
        double sum = 0.0, comp = 0.0;
        for (std::size_t k = 0; k < rows.size(); ++k) {
            const double term = vals[k] * v[rows[k]] - comp;
            const double next = sum + term;
            comp = (next - sum) - term;
            sum = next;
        }
        return sum;
    }
    double sum = 0.0;
    for (std::size_t k = 0; k < rows.size(); ++k) sum += vals[k] * v[rows[k]];
    return sum;
}

void col_axpy(const SparseColumnMatrix& a, std::size_t j, double scale,
              std::span<double> v, OpCounter& ctr) {
    if (j >= a.cols()) throw ContractViolation("col_axpy: column out of range");
    if (v.size() != a.rows()) throw ContractViolation("col_axpy: vector length != m");
    ++ctr.axpy_ops;
    const auto rows = a.column_rows(j);
    const auto vals = a.column_values(j);
    for (std::size_t k = 0; k < rows.size(); ++k) v[rows[k]] += scale * vals[k];
}

std::vector<double> col_norms_sq(const SparseColumnMatrix& a, OpCounter& ctr) {
    std::vector<double> norms(a.cols(), 0.0);
    for (std::size_t j = 0; j < a.cols(); ++j) {
        ++ctr.dot_products;
        double sum = 0.0;
        for (double v : a.column_values(j)) sum += v * v;
        norms[j] = sum;
    }
    return norms;
}

std::vector<double> full_gradient(const SparseColumnMatrix& a,
                                  std::span<const double> p_vec,
                                  std::span<const double> sigma, OpCounter& ctr) {
    if (sigma.size() != a.cols())
        throw ContractViolation("full_gradient: sigma length != p");
    std::vector<double> grad(a.cols());
    for (std::size_t i = 0; i < a.cols(); ++i)
        grad[i] = -sigma[i] + col_dot_dense(a, i, p_vec, ctr);
    return grad;
}

}  // namespace fwlasso
