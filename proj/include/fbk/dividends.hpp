#pragma once

#include <cstddef>
#include <utility>
#include <vector>

#include "fbk/grid.hpp"
#include "fbk/jumps.hpp"
#include "fbk/linalg.hpp"

namespace fbk {

// How the forward adjustment is built on nonuniform grids: the exact
// transpose of the backward interpolation (keeps the adjoint identity), or
// the re-derived shift-down interpolation whose gap to B^T is a diagnostic.
enum class DividendMode { Transpose, Interpolate };

// Sparse row-wise matrix over the spot axis; interior rows are interpolation
// weights and sum to one.
struct SparseRows {
    std::size_t n = 0;
    std::vector<std::vector<std::pair<std::size_t, double>>> rows;

    DenseMatrix to_dense() const;
    void apply(std::span<const double> x, std::span<double> y) const;
    void apply_transposed(std::span<const double> x, std::span<double> y) const;
};

struct DividendOperator {
    SparseRows matrix;
    Direction direction = Direction::Backward;
    DividendMode mode = DividendMode::Transpose;
    double amount = 0.0;

    // Forward-direction operators in Transpose mode hold the backward rows
    // and apply them scattered.
    bool applies_transposed() const {
        return direction == Direction::Forward && mode == DividendMode::Transpose;
    }
    DenseMatrix effective_dense() const;
};

// Shift-up value interpolation: row j evaluates the field at max(S_j - d, 0).
// Bi-diagonal whenever d is below the local step; larger d widens the offset.
DividendOperator build_backward_dividend_op(const Grid2D& grid, double d);

DividendOperator build_forward_dividend_op(const Grid2D& grid, double d,
                                           DividendMode mode = DividendMode::Transpose);

// Applies the operator along the spot axis of every v-row.
Field apply_dividend(const DividendOperator& op, const Field& field, const Grid2D& grid);

// max |F - B^T| between the two forward constructions; zero on uniform grids.
double dividend_consistency_gap(const Grid2D& grid, double d);

}  // namespace fbk
