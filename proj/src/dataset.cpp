#include "fwlasso/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include "fwlasso/rng.hpp"

namespace fwlasso {

namespace {

struct Entry {
    std::uint32_t row;
    std::uint32_t col;
    double value;
};

std::string_view strip(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

double parse_double(std::string_view tok, std::size_t line) {
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError("malformed number '" + std::string(tok) + "'", line);
    return value;
}

std::uint64_t parse_index(std::string_view tok, std::size_t line) {
    std::uint64_t value = 0;
    const auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), value);
    if (ec != std::errc{} || ptr != tok.data() + tok.size())
        throw ParseError("malformed index '" + std::string(tok) + "'", line);
    return value;
}

SparseColumnMatrix build_from_entries(std::size_t m, std::size_t p,
                                      const std::vector<Entry>& entries) {
    // Entries already arrive row-major (rows in file order, indices
    // increasing within a row), so a count-and-fill pass keeps each column's
    // row order strictly increasing.
    std::vector<std::uint32_t> counts(p, 0);
    for (const Entry& e : entries) ++counts[e.col];
    std::vector<std::vector<std::uint32_t>> rows(p);
    std::vector<std::vector<double>> vals(p);
    for (std::size_t j = 0; j < p; ++j) {
        rows[j].reserve(counts[j]);
        vals[j].reserve(counts[j]);
    }
    for (const Entry& e : entries) {
        rows[e.col].push_back(e.row);
        vals[e.col].push_back(e.value);
    }
    SparseColumnMatrix X(m, p);
    for (std::size_t j = 0; j < p; ++j)
        X.set_column(j, std::move(rows[j]), std::move(vals[j]));
    return X;
}

void write_double(std::ostream& out, double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out.write(buf, res.ptr - buf);
}

}  // namespace

std::string to_string(StandardizeMode mode) {
    switch (mode) {
        case StandardizeMode::unit_norm_columns: return "unit_norm_columns";
        case StandardizeMode::center_and_unit_norm: return "center_and_unit_norm";
        case StandardizeMode::none: return "none";
    }
    return "?";
}

Dataset parse_libsvm(std::istream& in, std::size_t p_override) {
    std::vector<Entry> entries;
    std::vector<double> y;
    std::size_t max_index = 0;  // 1-based
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view sv = line;
        if (const auto hash = sv.find('#'); hash != std::string_view::npos)
            sv = sv.substr(0, hash);
        sv = strip(sv);
        if (sv.empty()) continue;

        const std::uint32_t row = static_cast<std::uint32_t>(y.size());
        std::size_t pos = sv.find_first_of(" \t");
        const std::string_view label_tok = sv.substr(0, pos);
        y.push_back(parse_double(label_tok, line_no));
        sv = pos == std::string_view::npos ? std::string_view{} : strip(sv.substr(pos));

        std::uint64_t prev_index = 0;
        while (!sv.empty()) {
            pos = sv.find_first_of(" \t");
            const std::string_view tok = sv.substr(0, pos);
            sv = pos == std::string_view::npos ? std::string_view{} : strip(sv.substr(pos));

            const auto colon = tok.find(':');
            if (colon == std::string_view::npos)
                throw ParseError("expected idx:value, got '" + std::string(tok) + "'", line_no);
            const std::uint64_t idx = parse_index(tok.substr(0, colon), line_no);
            const double value = parse_double(tok.substr(colon + 1), line_no);
            if (idx == 0)
                throw ParseError("indices are 1-based; got 0", line_no);
            if (idx <= prev_index)
                throw ParseError("indices must be strictly increasing; got " +
                                     std::to_string(idx) + " after " +
                                     std::to_string(prev_index),
                                 line_no);
            if (p_override > 0 && idx > p_override)
                throw DimensionError("index " + std::to_string(idx) + " at line " +
                                     std::to_string(line_no) + " exceeds feature count " +
                                     std::to_string(p_override));
            prev_index = idx;
            max_index = std::max<std::size_t>(max_index, idx);
            if (value != 0.0)
                entries.push_back({row, static_cast<std::uint32_t>(idx - 1), value});
        }
    }
    if (y.empty()) throw ParseError("empty dataset", line_no);

    const std::size_t p = p_override > 0 ? p_override : max_index;
    Dataset ds;
    ds.X = build_from_entries(y.size(), p, entries);
    ds.y = std::move(y);
    return ds;
}

void write_libsvm(std::ostream& out, const Dataset& ds) {
    const std::size_t m = ds.num_rows();
    // Gather rows from the column store; columns ascend, so per-row feature
    // lists come out sorted.
    std::vector<std::vector<std::pair<std::uint32_t, double>>> rows(m);
    for (std::size_t j = 0; j < ds.num_features(); ++j) {
        const auto ridx = ds.X.column_rows(j);
        const auto vals = ds.X.column_values(j);
        for (std::size_t k = 0; k < ridx.size(); ++k)
            rows[ridx[k]].emplace_back(static_cast<std::uint32_t>(j + 1), vals[k]);
    }
    for (std::size_t r = 0; r < m; ++r) {
        write_double(out, ds.y[r]);
        for (const auto& [idx, value] : rows[r]) {
            out << ' ' << idx << ':';
            write_double(out, value);
        }
        out << '\n';
    }
}

Dataset parse_csv(std::istream& in) {
    std::string line;
    std::size_t line_no = 0;
    if (!std::getline(in, line)) throw ParseError("empty dataset", 1);
    ++line_no;

    auto split = [](std::string_view sv) {
        std::vector<std::string_view> cells;
        while (true) {
            const auto comma = sv.find(',');
            cells.push_back(strip(sv.substr(0, comma)));
            if (comma == std::string_view::npos) break;
            sv = sv.substr(comma + 1);
        }
        return cells;
    };

    const auto header = split(strip(std::string_view(line)));
    if (header.size() < 2)
        throw ParseError("need at least one feature column and a response column", 1);
    const std::size_t p = header.size() - 1;
    std::vector<std::string> names(header.begin(), header.end() - 1);

    std::vector<Entry> entries;
    std::vector<double> y;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view sv = strip(std::string_view(line));
        if (sv.empty()) continue;
        const auto cells = split(sv);
        if (cells.size() != p + 1)
            throw ParseError("expected " + std::to_string(p + 1) + " cells, got " +
                                 std::to_string(cells.size()),
                             line_no);
        const std::uint32_t row = static_cast<std::uint32_t>(y.size());
        for (std::size_t j = 0; j < p; ++j) {
            const double value = parse_double(cells[j], line_no);
            if (value != 0.0)
                entries.push_back({row, static_cast<std::uint32_t>(j), value});
        }
        y.push_back(parse_double(cells[p], line_no));
    }
    if (y.empty()) throw ParseError("empty dataset", line_no);

    Dataset ds;
    ds.X = build_from_entries(y.size(), p, entries);
    ds.y = std::move(y);
    ds.feature_names = std::move(names);
    return ds;
}

SyntheticData generate_synthetic(const SyntheticSpec& spec) {
    if (spec.p == 0 || spec.m_train == 0 || spec.m_test == 0)
        throw ContractViolation("generate_synthetic: m_train, m_test, p must be >= 1");
    if (spec.n_informative > spec.p)
        throw ContractViolation("generate_synthetic: n_informative > p");
    if (spec.noise_sd < 0.0 || spec.coef_scale <= 0.0)
        throw ContractViolation("generate_synthetic: bad noise_sd or coef_scale");

    Rng rng(spec.seed);

    // Draw order is fixed: coefficient support, coefficient values, train
    // matrix (column by column), train noise, test matrix, test noise.
    std::vector<double> coef(spec.p, 0.0);
    {
        std::vector<std::uint32_t> perm(spec.p);
        for (std::size_t i = 0; i < spec.p; ++i) perm[i] = static_cast<std::uint32_t>(i);
        for (std::size_t i = 0; i < spec.n_informative; ++i) {
            const std::size_t j = i + static_cast<std::size_t>(rng.below(spec.p - i));
            std::swap(perm[i], perm[j]);
        }
        for (std::size_t i = 0; i < spec.n_informative; ++i) {
            double c = 0.0;
            while (c == 0.0) c = spec.coef_scale * rng.gaussian();
            coef[perm[i]] = c;
        }
    }

    auto draw_split = [&](std::size_t m) {
        Dataset ds;
        ds.X = SparseColumnMatrix(m, spec.p);
        ds.y.assign(m, 0.0);
        std::vector<std::uint32_t> rows(m);
        for (std::size_t r = 0; r < m; ++r) rows[r] = static_cast<std::uint32_t>(r);
        std::vector<double> col(m);
        for (std::size_t j = 0; j < spec.p; ++j) {
            for (std::size_t r = 0; r < m; ++r) col[r] = rng.gaussian();
            if (coef[j] != 0.0)
                for (std::size_t r = 0; r < m; ++r) ds.y[r] += coef[j] * col[r];
            ds.X.set_column(j, rows, col);
        }
        if (spec.noise_sd > 0.0)
            for (std::size_t r = 0; r < m; ++r) ds.y[r] += spec.noise_sd * rng.gaussian();
        else
            for (std::size_t r = 0; r < m; ++r) rng.gaussian();  // keep streams aligned
        return ds;
    };

    SyntheticData data;
    data.train = draw_split(spec.m_train);
    data.test = draw_split(spec.m_test);
    data.true_coef = std::move(coef);
    return data;
}

std::pair<Dataset, StandardizationReport> standardize(Dataset ds, StandardizeMode mode) {
    const std::size_t m = ds.num_rows();
    const std::size_t p = ds.num_features();

    StandardizationReport report;
    report.mode = mode;
    report.column_means.assign(p, 0.0);
    report.column_norms.assign(p, 0.0);

    if (mode == StandardizeMode::center_and_unit_norm) {
        std::vector<double> dense(m);
        std::vector<std::uint32_t> all_rows(m);
        for (std::size_t r = 0; r < m; ++r) all_rows[r] = static_cast<std::uint32_t>(r);
        for (std::size_t j = 0; j < p; ++j) {
            std::fill(dense.begin(), dense.end(), 0.0);
            const auto rows = ds.X.column_rows(j);
            const auto vals = ds.X.column_values(j);
            double sum = 0.0;
            for (std::size_t k = 0; k < rows.size(); ++k) {
                dense[rows[k]] = vals[k];
                sum += vals[k];
            }
            const double mean = sum / static_cast<double>(m);
            report.column_means[j] = mean;
            double norm_sq = 0.0;
            for (double& v : dense) {
                v -= mean;
                norm_sq += v * v;
            }
            const double norm = std::sqrt(norm_sq);
            report.column_norms[j] = norm;
            if (norm == 0.0) {
                ds.X.set_column(j, {}, {});
                continue;
            }
            std::vector<std::uint32_t> new_rows;
            std::vector<double> new_vals;
            new_rows.reserve(m);
            new_vals.reserve(m);
            for (std::size_t r = 0; r < m; ++r) {
                const double v = dense[r] / norm;
                if (v != 0.0) {
                    new_rows.push_back(all_rows[r]);
                    new_vals.push_back(v);
                }
            }
            ds.X.set_column(j, std::move(new_rows), std::move(new_vals));
        }
    } else {
        for (std::size_t j = 0; j < p; ++j) {
            double norm_sq = 0.0;
            for (double v : ds.X.column_values(j)) norm_sq += v * v;
            const double norm = std::sqrt(norm_sq);
            report.column_norms[j] = norm;
            if (mode == StandardizeMode::unit_norm_columns && norm > 0.0)
                ds.X.scale_column(j, 1.0 / norm);
        }
    }

    if (mode != StandardizeMode::none) {
        double sum = 0.0;
        for (double v : ds.y) sum += v;
        report.y_mean = sum / static_cast<double>(m);
        for (double& v : ds.y) v -= report.y_mean;
    }
    return {std::move(ds), std::move(report)};
}

Dataset apply_standardization(Dataset ds, const StandardizationReport& report) {
    const std::size_t p = ds.num_features();
    if (report.column_norms.size() != p)
        throw DimensionError("standardization report is for a different feature count");
    if (report.mode == StandardizeMode::center_and_unit_norm) {
        const std::size_t m = ds.num_rows();
        std::vector<double> dense(m);
        for (std::size_t j = 0; j < p; ++j) {
            if (report.column_norms[j] == 0.0) {
                ds.X.set_column(j, {}, {});
                continue;
            }
            std::fill(dense.begin(), dense.end(), 0.0);
            const auto rows = ds.X.column_rows(j);
            const auto vals = ds.X.column_values(j);
            for (std::size_t k = 0; k < rows.size(); ++k) dense[rows[k]] = vals[k];
            std::vector<std::uint32_t> new_rows;
            std::vector<double> new_vals;
            for (std::size_t r = 0; r < m; ++r) {
                const double v = (dense[r] - report.column_means[j]) / report.column_norms[j];
                if (v != 0.0) {
                    new_rows.push_back(static_cast<std::uint32_t>(r));
                    new_vals.push_back(v);
                }
            }
            ds.X.set_column(j, std::move(new_rows), std::move(new_vals));
        }
    } else if (report.mode == StandardizeMode::unit_norm_columns) {
        for (std::size_t j = 0; j < p; ++j)
            if (report.column_norms[j] > 0.0)
                ds.X.scale_column(j, 1.0 / report.column_norms[j]);
    }
    if (report.mode != StandardizeMode::none)
        for (double& v : ds.y) v -= report.y_mean;
    return ds;
}

}  // namespace fwlasso
