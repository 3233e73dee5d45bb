#include "fwlasso/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "fwlasso/errors.hpp"

namespace fwlasso {

DenseMatrix DenseMatrix::from_sparse(const SparseColumnMatrix& X) {
    DenseMatrix out;
    out.rows = X.rows();
    out.cols = X.cols();
    out.data.assign(out.rows * out.cols, 0.0);
    for (std::size_t j = 0; j < X.cols(); ++j) {
        const auto rows = X.column_rows(j);
        const auto vals = X.column_values(j);
        for (std::size_t k = 0; k < rows.size(); ++k) out.at(rows[k], j) = vals[k];
    }
    return out;
}

std::vector<double> DenseMatrix::multiply(std::span<const double> v) const {
    std::vector<double> out(rows, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        double sum = 0.0;
        const double* row = data.data() + r * cols;
        for (std::size_t c = 0; c < cols; ++c) sum += row[c] * v[c];
        out[r] = sum;
    }
    return out;
}

std::vector<double> DenseMatrix::multiply_transpose(std::span<const double> v) const {
    std::vector<double> out(cols, 0.0);
    for (std::size_t r = 0; r < rows; ++r) {
        const double* row = data.data() + r * cols;
        const double vr = v[r];
        for (std::size_t c = 0; c < cols; ++c) out[c] += row[c] * vr;
    }
    return out;
}

std::vector<double> project_l1_ball(std::span<const double> v, double delta) {
    if (delta < 0.0) throw ContractViolation("project_l1_ball: delta must be >= 0");
    double l1 = 0.0;
    for (double x : v) l1 += std::abs(x);
    std::vector<double> out(v.begin(), v.end());
    if (l1 <= delta) return out;

    // Duchi et al. threshold: sort magnitudes, find the pivot, shrink.
    std::vector<double> mags(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) mags[i] = std::abs(v[i]);
    std::sort(mags.begin(), mags.end(), std::greater<>());
    double cumulative = 0.0;
    double theta = 0.0;
    for (std::size_t j = 0; j < mags.size(); ++j) {
        cumulative += mags[j];
        const double candidate = (cumulative - delta) / static_cast<double>(j + 1);
        if (mags[j] - candidate > 0.0)
            theta = candidate;
        else
            break;
    }
    for (double& x : out) {
        const double shrunk = std::abs(x) - theta;
        x = shrunk > 0.0 ? (x < 0.0 ? -shrunk : shrunk) : 0.0;
    }
    return out;
}

namespace {

// Gaussian elimination with partial pivoting; A is n x n row-major,
// overwritten. Returns false if the pivot collapses.
bool solve_linear(std::vector<double>& A, std::vector<double>& b, std::size_t n) {
    for (std::size_t col = 0; col < n; ++col) {
        std::size_t pivot = col;
        double best = std::abs(A[col * n + col]);
        for (std::size_t r = col + 1; r < n; ++r) {
            const double mag = std::abs(A[r * n + col]);
            if (mag > best) {
                best = mag;
                pivot = r;
            }
        }
        if (best < 1e-300) return false;
        if (pivot != col) {
            for (std::size_t c = 0; c < n; ++c) std::swap(A[col * n + c], A[pivot * n + c]);
            std::swap(b[col], b[pivot]);
        }
        const double inv = 1.0 / A[col * n + col];
        for (std::size_t r = col + 1; r < n; ++r) {
            const double factor = A[r * n + col] * inv;
            if (factor == 0.0) continue;
            for (std::size_t c = col; c < n; ++c) A[r * n + c] -= factor * A[col * n + c];
            b[r] -= factor * b[col];
        }
    }
    for (std::size_t r = n; r-- > 0;) {
        double sum = b[r];
        for (std::size_t c = r + 1; c < n; ++c) sum -= A[r * n + c] * b[c];
        b[r] = sum / A[r * n + r];
    }
    return true;
}

struct GapInfo {
    double f = 0.0;
    double gap = 0.0;
    std::vector<double> grad;
};

GapInfo evaluate(const DenseMatrix& X, std::span<const double> y,
                 std::span<const double> alpha, double delta) {
    GapInfo info;
    std::vector<double> r = X.multiply(alpha);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
    for (double v : r) info.f += v * v;
    info.f *= 0.5;
    info.grad = X.multiply_transpose(r);
    double grad_inf = 0.0, alpha_dot = 0.0;
    for (std::size_t i = 0; i < info.grad.size(); ++i) {
        grad_inf = std::max(grad_inf, std::abs(info.grad[i]));
        alpha_dot += alpha[i] * info.grad[i];
    }
    info.gap = alpha_dot + delta * grad_inf;
    return info;
}

// Solves the problem restricted to the detected support with the l1 norm
// pinned to the boundary (KKT system), then checks global optimality. On
// success the refined point is optimal to machine precision.
bool polish_on_support(const DenseMatrix& X, std::span<const double> y, double delta,
                       std::vector<double>& alpha) {
    std::vector<std::size_t> support;
    for (std::size_t i = 0; i < alpha.size(); ++i)
        if (alpha[i] != 0.0) support.push_back(i);
    const std::size_t a = support.size();
    if (a == 0 || a > X.rows() + 1) return false;

    const std::size_t n = a + 1;
    std::vector<double> kkt(n * n, 0.0);
    std::vector<double> rhs(n, 0.0);
    for (std::size_t i = 0; i < a; ++i) {
        for (std::size_t j = i; j < a; ++j) {
            double dot = 0.0;
            for (std::size_t r = 0; r < X.rows(); ++r)
                dot += X.at(r, support[i]) * X.at(r, support[j]);
            kkt[i * n + j] = dot;
            kkt[j * n + i] = dot;
        }
        double xy = 0.0;
        for (std::size_t r = 0; r < X.rows(); ++r) xy += X.at(r, support[i]) * y[r];
        rhs[i] = xy;
        const double sign = alpha[support[i]] < 0.0 ? -1.0 : 1.0;
        kkt[i * n + a] = sign;
        kkt[a * n + i] = sign;
    }
    rhs[a] = delta;

    if (!solve_linear(kkt, rhs, n)) return false;
    const double nu = rhs[a];
    if (nu < -1e-12) return false;
    for (std::size_t i = 0; i < a; ++i) {
        const double sign = alpha[support[i]] < 0.0 ? -1.0 : 1.0;
        if (rhs[i] * sign < 0.0) return false;  // support sign flipped; not converged yet
    }

    std::vector<double> candidate(alpha.size(), 0.0);
    for (std::size_t i = 0; i < a; ++i) candidate[support[i]] = rhs[i];

    // Global KKT check: off-support gradient magnitudes may not exceed nu.
    std::vector<double> r = X.multiply(candidate);
    for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
    const std::vector<double> grad = X.multiply_transpose(r);
    double scale = std::abs(nu);
    for (double g : grad) scale = std::max(scale, std::abs(g));
    const double slack = 1e-9 * (1.0 + scale);
    for (std::size_t i = 0; i < grad.size(); ++i)
        if (candidate[i] == 0.0 && std::abs(grad[i]) > nu + slack) return false;

    alpha = std::move(candidate);
    return true;
}

double spectral_norm_sq(const DenseMatrix& X) {
    // Power iteration on X'X; a few dozen rounds are plenty for a step size.
    std::vector<double> v(X.cols(), 1.0 / std::sqrt(static_cast<double>(X.cols())));
    double lambda = 0.0;
    for (int it = 0; it < 60; ++it) {
        std::vector<double> w = X.multiply_transpose(X.multiply(v));
        double norm = 0.0;
        for (double x : w) norm += x * x;
        norm = std::sqrt(norm);
        if (norm == 0.0) return 0.0;
        lambda = norm;
        for (std::size_t i = 0; i < w.size(); ++i) v[i] = w[i] / norm;
    }
    return lambda;
}

}  // namespace

OracleResult solve_constrained_reference(const DenseMatrix& X, std::span<const double> y,
                                         double delta, double tol,
                                         std::uint64_t max_iter) {
    if (y.size() != X.rows()) throw DimensionError("oracle: y length != m");
    if (delta < 0.0) throw ContractViolation("oracle: delta must be >= 0");

    OracleResult result;
    result.alpha.assign(X.cols(), 0.0);
    if (delta == 0.0) {
        double f = 0.0;
        for (double v : y) f += v * v;
        result.f_star = 0.5 * f;
        result.certified_gap = 0.0;
        return result;
    }

    const double L = std::max(spectral_norm_sq(X), 1e-300);
    const double step = 1.0 / (1.02 * L);

    std::vector<double> alpha(X.cols(), 0.0);
    std::vector<double> momentum = alpha;
    double t = 1.0;

    for (std::uint64_t iter = 1; iter <= max_iter; ++iter) {
        std::vector<double> r = X.multiply(momentum);
        for (std::size_t i = 0; i < r.size(); ++i) r[i] -= y[i];
        std::vector<double> grad = X.multiply_transpose(r);

        std::vector<double> point(X.cols());
        for (std::size_t i = 0; i < point.size(); ++i)
            point[i] = momentum[i] - step * grad[i];
        std::vector<double> next = project_l1_ball(point, delta);

        // Adaptive restart on momentum reversal.
        double reversal = 0.0;
        for (std::size_t i = 0; i < next.size(); ++i)
            reversal += (momentum[i] - next[i]) * (next[i] - alpha[i]);
        if (reversal > 0.0) t = 1.0;

        const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
        const double mix = (t - 1.0) / t_next;
        for (std::size_t i = 0; i < next.size(); ++i)
            momentum[i] = next[i] + mix * (next[i] - alpha[i]);
        alpha = std::move(next);
        t = t_next;

        if (iter % 25 == 0 || iter == max_iter) {
            std::vector<double> refined = alpha;
            if (polish_on_support(X, y, delta, refined)) {
                const GapInfo polished = evaluate(X, y, refined, delta);
                if (polished.gap <= tol) {
                    result.alpha = std::move(refined);
                    result.f_star = polished.f;
                    result.certified_gap = polished.gap;
                    result.iterations = iter;
                    return result;
                }
            }
            const GapInfo info = evaluate(X, y, alpha, delta);
            if (info.gap <= tol) {
                result.alpha = alpha;
                result.f_star = info.f;
                result.certified_gap = info.gap;
                result.iterations = iter;
                return result;
            }
        }
    }
    throw OracleFailure("reference solver could not certify the requested gap");
}

std::vector<double> least_squares(const DenseMatrix& X, std::span<const double> y) {
    const std::size_t m = X.rows();
    const std::size_t p = X.cols();
    if (p > m) {
        // Minimum-norm solution alpha = X'(XX')^{-1} y.
        std::vector<double> gram(m * m, 0.0);
        for (std::size_t r = 0; r < m; ++r)
            for (std::size_t s = r; s < m; ++s) {
                double dot = 0.0;
                for (std::size_t c = 0; c < p; ++c) dot += X.at(r, c) * X.at(s, c);
                gram[r * m + s] = dot;
                gram[s * m + r] = dot;
            }
        std::vector<double> w(y.begin(), y.end());
        if (!solve_linear(gram, w, m))
            throw OracleFailure("least_squares: singular Gram matrix");
        return X.multiply_transpose(w);
    }
    std::vector<double> gram(p * p, 0.0);
    for (std::size_t i = 0; i < p; ++i)
        for (std::size_t j = i; j < p; ++j) {
            double dot = 0.0;
            for (std::size_t r = 0; r < m; ++r) dot += X.at(r, i) * X.at(r, j);
            gram[i * p + j] = dot;
            gram[j * p + i] = dot;
        }
    std::vector<double> rhs = X.multiply_transpose(y);
    if (!solve_linear(gram, rhs, p))
        throw OracleFailure("least_squares: singular normal equations");
    return rhs;
}

}  // namespace fwlasso
