#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "fbk/grid.hpp"
#include "fbk/linalg.hpp"
#include "fbk/model.hpp"

namespace fbk {

enum class Direction { Backward, Forward };

// Discretized jump generator on a uniform log-spot axis. Rows hold the
// quadrature masses of the Levy measure shifted to the node, minus lambda on
// the diagonal, plus the compensator drift. Off-grid mass is lumped into the
// edge nodes so every row sum carries only the truncation tail.
struct JumpOperator {
    DenseMatrix j;
    std::vector<double> x_nodes;
    double compensator = 0.0;  // integral((e^y - 1) nu(dy)), embedded in j
    bool metzler = true;       // all off-diagonal entries nonnegative
};

JumpOperator build_jump_operator(const JumpSpec& jumps, const std::vector<double>& x_nodes);

// e^{dt J} via scaling-and-squaring.
DenseMatrix jump_exponential(const JumpOperator& op, double dt);

// Applies e (backward) or e^T (forward) along the spot axis of every v-row.
void apply_jump_matrix(const DenseMatrix& e, std::span<double> field, std::size_t ns,
                       std::size_t nv, Direction direction);

// One-shot convenience wrapper over the two functions above.
Field apply_jump_exponential(const JumpOperator& op, double dt, const Field& field,
                             const Grid2D& grid, Direction direction);

// Symmetric three-stage composition: half diffusion, full jump, half diffusion.
Field strang_composite_step(const std::function<Field(const Field&)>& diffusion_half,
                            const std::function<Field(const Field&)>& jump_full, const Field& v);

}  // namespace fbk
