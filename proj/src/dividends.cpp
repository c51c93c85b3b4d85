#include "fbk/dividends.hpp"

#include <algorithm>
#include <cmath>

#include "fbk/errors.hpp"

namespace fbk {

DenseMatrix SparseRows::to_dense() const {
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [col, w] : rows[i]) m(i, col) += w;
    return m;
}

void SparseRows::apply(std::span<const double> x, std::span<double> y) const {
    for (std::size_t i = 0; i < n; ++i) {
        double acc = 0.0;
        for (const auto& [col, w] : rows[i]) acc += w * x[col];
        y[i] = acc;
    }
}

void SparseRows::apply_transposed(std::span<const double> x, std::span<double> y) const {
    std::fill(y.begin(), y.end(), 0.0);
    for (std::size_t i = 0; i < n; ++i)
        for (const auto& [col, w] : rows[i]) y[col] += w * x[i];
}

DenseMatrix DividendOperator::effective_dense() const {
    return applies_transposed() ? matrix.to_dense().transposed() : matrix.to_dense();
}

namespace {

// Interpolation row for evaluating a nodal field at `target`. The
// single-cell cases express both weights through the one quotient d/h so the
// backward and transposed forward constructions match bitwise on uniform
// grids.
std::vector<std::pair<std::size_t, double>> interp_row(const std::vector<double>& s, double target,
                                                       std::size_t own, double d) {
    const std::size_t n = s.size();
    if (target <= s.front()) return {{0, 1.0}};
    if (target >= s.back()) return {{n - 1, 1.0}};
    auto it = std::upper_bound(s.begin(), s.end(), target);
    auto k = static_cast<std::size_t>(it - s.begin()) - 1;
    if (s[k] == target) return {{k, 1.0}};
    const double h = s[k + 1] - s[k];
    if (k + 1 == own) {  // shift up by less than one cell
        const double f = d / h;
        return {{k, f}, {k + 1, 1.0 - f}};
    }
    if (k == own) {  // shift down by less than one cell
        const double f = d / h;
        return {{k, 1.0 - f}, {k + 1, f}};
    }
    const double w_hi = (target - s[k]) / h;
    return {{k, 1.0 - w_hi}, {k + 1, w_hi}};
}

}  // namespace

DividendOperator build_backward_dividend_op(const Grid2D& grid, double d) {
    FBK_REQUIRE(d >= 0.0, "dividend: amount must be >= 0, got " << d);
    const auto& s = grid.s_nodes();
    DividendOperator op;
    op.direction = Direction::Backward;
    op.amount = d;
    op.matrix.n = s.size();
    op.matrix.rows.resize(s.size());
    for (std::size_t j = 0; j < s.size(); ++j)
        op.matrix.rows[j] = interp_row(s, std::max(s[j] - d, 0.0), j, d);
    return op;
}

DividendOperator build_forward_dividend_op(const Grid2D& grid, double d, DividendMode mode) {
    FBK_REQUIRE(d >= 0.0, "dividend: amount must be >= 0, got " << d);
    DividendOperator op;
    op.direction = Direction::Forward;
    op.mode = mode;
    op.amount = d;
    if (mode == DividendMode::Transpose) {
        op.matrix = build_backward_dividend_op(grid, d).matrix;
        return op;
    }
    // Shift-down interpolation; the first and last rows are taken from B^T so
    // both constructions agree exactly on uniform grids.
    const auto& s = grid.s_nodes();
    const std::size_t n = s.size();
    const SparseRows b = build_backward_dividend_op(grid, d).matrix;
    op.matrix.n = n;
    op.matrix.rows.resize(n);
    for (std::size_t j = 1; j + 1 < n; ++j)
        op.matrix.rows[j] = interp_row(s, s[j] + d, j, d);
    for (std::size_t i = 0; i < n; ++i) {
        for (const auto& [col, w] : b.rows[i]) {
            if (col == 0) op.matrix.rows[0].emplace_back(i, w);
            if (col == n - 1) op.matrix.rows[n - 1].emplace_back(i, w);
        }
    }
    return op;
}

Field apply_dividend(const DividendOperator& op, const Field& field, const Grid2D& grid) {
    FBK_REQUIRE(op.matrix.n == grid.ns(), "dividend: operator does not match grid");
    FBK_REQUIRE(field.values.size() == grid.size(), "dividend: field does not match grid");
    Field out = field;
    const std::size_t ns = grid.ns();
    const std::size_t nv = grid.nv();
    std::vector<double> slice(ns), res(ns);
    for (std::size_t j = 0; j < nv; ++j) {
        for (std::size_t i = 0; i < ns; ++i) slice[i] = field.values[i * nv + j];
        if (op.applies_transposed())
            op.matrix.apply_transposed(slice, res);
        else
            op.matrix.apply(slice, res);
        for (std::size_t i = 0; i < ns; ++i) out.values[i * nv + j] = res[i];
    }
    return out;
}

double dividend_consistency_gap(const Grid2D& grid, double d) {
    const DenseMatrix bt = build_backward_dividend_op(grid, d).matrix.to_dense().transposed();
    const DenseMatrix f =
        build_forward_dividend_op(grid, d, DividendMode::Interpolate).matrix.to_dense();
    return max_abs_diff(f, bt);
}

}  // namespace fbk
