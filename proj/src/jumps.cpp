#include "fbk/jumps.hpp"

#include <algorithm>
#include <cmath>

#include "fbk/errors.hpp"

namespace fbk {

JumpOperator build_jump_operator(const JumpSpec& jumps, const std::vector<double>& x_nodes) {
    jumps.validate();
    const std::size_t n = x_nodes.size();
    FBK_REQUIRE(n >= 2, "jump operator: need at least two x-nodes");
    const double h = x_nodes[1] - x_nodes[0];
    FBK_REQUIRE(h > 0.0, "jump operator: x-nodes must increase");
    for (std::size_t i = 1; i + 1 < n; ++i)
        FBK_REQUIRE(std::abs(x_nodes[i + 1] - x_nodes[i] - h) <= 1e-9 * h,
                    "jump operator: x-grid must be uniform (node " << i << ")");
    FBK_REQUIRE(jumps.truncation >= 8.0 * jumps.sigma_j,
                "jump operator: truncation must cover at least 8 sigma_j");

    JumpOperator op;
    op.x_nodes = x_nodes;
    op.j = DenseMatrix(n, n);
    if (jumps.lambda == 0.0) return op;

    const double trunc = jumps.truncation;
    const auto m_max = static_cast<std::ptrdiff_t>(std::floor(trunc / h + 0.5));
    for (std::size_t i = 0; i < n; ++i) {
        for (std::ptrdiff_t m = -m_max; m <= m_max; ++m) {
            const double a = std::max(-trunc, (static_cast<double>(m) - 0.5) * h);
            const double b = std::min(trunc, (static_cast<double>(m) + 0.5) * h);
            if (b <= a) continue;
            const double mass = 0.5 * (jumps.levy_density(a) + jumps.levy_density(b)) * (b - a);
            const auto tgt = std::clamp<std::ptrdiff_t>(static_cast<std::ptrdiff_t>(i) + m, 0,
                                                        static_cast<std::ptrdiff_t>(n) - 1);
            op.j(i, static_cast<std::size_t>(tgt)) += mass;
        }
        op.j(i, i) -= jumps.lambda;
    }

    // Compensator drift -c d/dx, central in the interior. At the two edge
    // rows the one-sided difference is used only where its off-diagonal sign
    // stays nonnegative; otherwise the term is dropped there (it annihilates
    // constants either way, so row sums are unaffected).
    ModelParams dummy;
    const double c = levy_drift(dummy, jumps);
    op.compensator = c;
    if (c != 0.0) {
        for (std::size_t i = 1; i + 1 < n; ++i) {
            op.j(i, i - 1) += c / (2.0 * h);
            op.j(i, i + 1) -= c / (2.0 * h);
        }
        if (c > 0.0) {
            op.j(n - 1, n - 2) += c / h;
            op.j(n - 1, n - 1) -= c / h;
        } else {
            op.j(0, 1) -= c / h;
            op.j(0, 0) += c / h;
        }
    }

    for (std::size_t i = 0; i < n && op.metzler; ++i)
        for (std::size_t k = 0; k < n; ++k)
            if (i != k && op.j(i, k) < -1e-14 * jumps.lambda) {
                op.metzler = false;
                break;
            }
    return op;
}

DenseMatrix jump_exponential(const JumpOperator& op, double dt) {
    FBK_REQUIRE(dt >= 0.0, "jump exponential: dt must be >= 0");
    return expm(dt * op.j);
}

void apply_jump_matrix(const DenseMatrix& e, std::span<double> field, std::size_t ns,
                       std::size_t nv, Direction direction) {
    FBK_REQUIRE(e.rows() == ns && e.cols() == ns, "jump apply: matrix size does not match spot axis");
    FBK_REQUIRE(field.size() == ns * nv, "jump apply: field size mismatch");
    std::vector<double> slice(ns), out(ns);
    for (std::size_t j = 0; j < nv; ++j) {
        for (std::size_t i = 0; i < ns; ++i) slice[i] = field[i * nv + j];
        out = (direction == Direction::Backward) ? e.matvec(slice) : e.matvec_transposed(slice);
        for (std::size_t i = 0; i < ns; ++i) field[i * nv + j] = out[i];
    }
}

Field apply_jump_exponential(const JumpOperator& op, double dt, const Field& field,
                             const Grid2D& grid, Direction direction) {
    FBK_REQUIRE(op.x_nodes.size() == grid.ns(), "jump apply: operator grid does not match");
    Field out = field;
    const DenseMatrix e = jump_exponential(op, dt);
    apply_jump_matrix(e, out.values, grid.ns(), grid.nv(), direction);
    return out;
}

Field strang_composite_step(const std::function<Field(const Field&)>& diffusion_half,
                            const std::function<Field(const Field&)>& jump_full, const Field& v) {
    return diffusion_half(jump_full(diffusion_half(v)));
}

}  // namespace fbk
