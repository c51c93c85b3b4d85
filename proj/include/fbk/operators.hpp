#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <vector>

#include "fbk/grid.hpp"
#include "fbk/linalg.hpp"
#include "fbk/model.hpp"

namespace fbk {

enum class Axis { Spot, Variance };

// Tridiagonal-per-line operator: couples (i,j) to its neighbours along one
// axis only. Coefficient arrays are indexed like fields, i*nv + j.
struct DirectionalOperator {
    Axis axis = Axis::Spot;
    std::size_t ns = 0, nv = 0;
    std::vector<double> sub, diag, sup;

    static DirectionalOperator zero(Axis axis, std::size_t ns, std::size_t nv);

    void apply(std::span<const double> x, std::span<double> y, bool accumulate) const;
    void apply_transposed(std::span<const double> x, std::span<double> y, bool accumulate) const;
    DirectionalOperator transposed() const;
    // Tridiagonal of the line: row j of spot-axis operators, column i otherwise.
    Tridiagonal line(std::size_t fixed) const;
};

// 3x3 stencil operator for the mixed derivative. w[a][b] holds the coupling
// of (i,j) to (i+a-1, j+b-1).
struct MixedOperator {
    std::size_t ns = 0, nv = 0;
    std::array<std::array<std::vector<double>, 3>, 3> w;

    static MixedOperator zero(std::size_t ns, std::size_t nv);

    void apply(std::span<const double> x, std::span<double> y, bool accumulate) const;
    void apply_transposed(std::span<const double> x, std::span<double> y, bool accumulate) const;
    MixedOperator transposed() const;
};

// Boundary rows of the semi-discretized generator.
//  PayoffClosure: S=0 frozen; one-sided first-order closures at S_max and
//    v_max; degenerate drift-only row at v=0. For backward inductions.
//  ZeroDirichlet: homogeneous Dirichlet at S=0, S_max and v_max (rows and
//    the couplings into them dropped); v=0 keeps the degenerate drift row,
//    where the diffusion vanishes and mass only flows inward. Forward
//    density inductions use this; passing it to both directions gives the
//    shared-boundary setup in which forward and backward prices coincide to
//    rounding.
enum class BoundaryPolicy { PayoffClosure, ZeroDirichlet };

struct OperatorSet {
    MixedOperator f0;
    DirectionalOperator f1, f2;
    double t_label = 0.0;
    // Interior off-diagonals of F0+F1+F2 all nonnegative (the grid-step
    // requirement of the sign-adapted mixed stencil).
    bool positivity_constraint_ok = true;

    std::size_t ns() const { return f1.ns; }
    std::size_t nv() const { return f1.nv; }
    std::size_t size() const { return f1.ns * f1.nv; }

    // y = (F0 + F1 + F2) x, or its transpose.
    void apply_full(std::span<const double> x, std::span<double> y, bool transposed = false) const;

    DenseMatrix dense_f0() const;
    DenseMatrix dense_f1() const;
    DenseMatrix dense_f2() const;
    DenseMatrix dense_full() const;
};

OperatorSet assemble(const Grid2D& grid, const ModelParams& model, double t, BoundaryPolicy policy);

// Exact elementwise transpose of all three matrices.
OperatorSet transpose(const OperatorSet& ops);

// Seven-point approximation of coeff * d2/dSdv on local steps
// (h_w, h_e) in S and (h_s, h_n) in v. The corner pair follows the sign of
// coeff so the corner entries are always nonnegative.
struct MixedStencil {
    std::array<std::array<double, 3>, 3> w{};  // w[a][b]: offset (a-1, b-1)
};
MixedStencil mixed_stencil_weights(double coeff, double h_w, double h_e, double h_s, double h_n);

struct MMatrixReport {
    bool diag_positive = true;
    bool offdiag_nonpositive = true;
    bool weakly_diagonally_dominant = true;
    std::size_t strictly_dominant_rows = 0;
    double max_positive_offdiag = 0.0;
    bool verdict = false;
};
MMatrixReport check_m_matrix(const DenseMatrix& m, double tol = 1e-13);

// Coordinate text dump (row, col, value), one entry per line.
void write_coo(const DenseMatrix& m, std::ostream& os, double drop_tol = 0.0);

}  // namespace fbk
