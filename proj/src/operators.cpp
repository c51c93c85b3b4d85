#include "fbk/operators.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <ostream>

#include "fbk/errors.hpp"

namespace fbk {

DirectionalOperator DirectionalOperator::zero(Axis axis, std::size_t ns, std::size_t nv) {
    DirectionalOperator op;
    op.axis = axis;
    op.ns = ns;
    op.nv = nv;
    op.sub.assign(ns * nv, 0.0);
    op.diag.assign(ns * nv, 0.0);
    op.sup.assign(ns * nv, 0.0);
    return op;
}

void DirectionalOperator::apply(std::span<const double> x, std::span<double> y, bool accumulate) const {
    const std::size_t stride = (axis == Axis::Spot) ? nv : 1;
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < nv; ++j) {
            const std::size_t k = i * nv + j;
            const std::size_t pos = (axis == Axis::Spot) ? i : j;
            const std::size_t len = (axis == Axis::Spot) ? ns : nv;
            double acc = diag[k] * x[k];
            if (pos > 0) acc += sub[k] * x[k - stride];
            if (pos + 1 < len) acc += sup[k] * x[k + stride];
            y[k] = accumulate ? y[k] + acc : acc;
        }
    }
}

void DirectionalOperator::apply_transposed(std::span<const double> x, std::span<double> y,
                                           bool accumulate) const {
    const std::size_t stride = (axis == Axis::Spot) ? nv : 1;
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < nv; ++j) {
            const std::size_t k = i * nv + j;
            const std::size_t pos = (axis == Axis::Spot) ? i : j;
            const std::size_t len = (axis == Axis::Spot) ? ns : nv;
            double acc = diag[k] * x[k];
            if (pos > 0) acc += sup[k - stride] * x[k - stride];
            if (pos + 1 < len) acc += sub[k + stride] * x[k + stride];
            y[k] = accumulate ? y[k] + acc : acc;
        }
    }
}

DirectionalOperator DirectionalOperator::transposed() const {
    DirectionalOperator t = zero(axis, ns, nv);
    const std::size_t stride = (axis == Axis::Spot) ? nv : 1;
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < nv; ++j) {
            const std::size_t k = i * nv + j;
            const std::size_t pos = (axis == Axis::Spot) ? i : j;
            const std::size_t len = (axis == Axis::Spot) ? ns : nv;
            t.diag[k] = diag[k];
            if (pos > 0) t.sub[k] = sup[k - stride];
            if (pos + 1 < len) t.sup[k] = sub[k + stride];
        }
    }
    return t;
}

Tridiagonal DirectionalOperator::line(std::size_t fixed) const {
    const std::size_t len = (axis == Axis::Spot) ? ns : nv;
    Tridiagonal t = Tridiagonal::zero(len);
    for (std::size_t m = 0; m < len; ++m) {
        const std::size_t k = (axis == Axis::Spot) ? m * nv + fixed : fixed * nv + m;
        t.sub[m] = sub[k];
        t.diag[m] = diag[k];
        t.sup[m] = sup[k];
    }
    return t;
}

MixedOperator MixedOperator::zero(std::size_t ns, std::size_t nv) {
    MixedOperator op;
    op.ns = ns;
    op.nv = nv;
    for (auto& row : op.w)
        for (auto& vec : row) vec.assign(ns * nv, 0.0);
    return op;
}

void MixedOperator::apply(std::span<const double> x, std::span<double> y, bool accumulate) const {
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < nv; ++j) {
            const std::size_t k = i * nv + j;
            double acc = 0.0;
            for (int a = -1; a <= 1; ++a) {
                if ((a < 0 && i == 0) || (a > 0 && i + 1 == ns)) continue;
                for (int b = -1; b <= 1; ++b) {
                    if ((b < 0 && j == 0) || (b > 0 && j + 1 == nv)) continue;
                    const double c = w[a + 1][b + 1][k];
                    if (c != 0.0) {
                        const auto nb = static_cast<std::size_t>(
                            static_cast<std::ptrdiff_t>(k) + a * static_cast<std::ptrdiff_t>(nv) + b);
                        acc += c * x[nb];
                    }
                }
            }
            y[k] = accumulate ? y[k] + acc : acc;
        }
    }
}

void MixedOperator::apply_transposed(std::span<const double> x, std::span<double> y,
                                     bool accumulate) const {
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < nv; ++j) {
            const std::size_t k = i * nv + j;
            double acc = 0.0;
            for (int a = -1; a <= 1; ++a) {
                if ((a > 0 && i == 0) || (a < 0 && i + 1 == ns)) continue;
                for (int b = -1; b <= 1; ++b) {
                    if ((b > 0 && j == 0) || (b < 0 && j + 1 == nv)) continue;
                    const auto src = static_cast<std::size_t>(
                        static_cast<std::ptrdiff_t>(k) - a * static_cast<std::ptrdiff_t>(nv) - b);
                    const double c = w[a + 1][b + 1][src];
                    if (c != 0.0) acc += c * x[src];
                }
            }
            y[k] = accumulate ? y[k] + acc : acc;
        }
    }
}

MixedOperator MixedOperator::transposed() const {
    // (F^T)(k, k+offset) = F(k+offset, k), the source node's mirrored weight.
    MixedOperator t = zero(ns, nv);
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < nv; ++j) {
            const std::size_t k = i * nv + j;
            for (int a = -1; a <= 1; ++a) {
                if ((a < 0 && i == 0) || (a > 0 && i + 1 == ns)) continue;
                for (int b = -1; b <= 1; ++b) {
                    if ((b < 0 && j == 0) || (b > 0 && j + 1 == nv)) continue;
                    const auto src = static_cast<std::size_t>(
                        static_cast<std::ptrdiff_t>(k) + a * static_cast<std::ptrdiff_t>(nv) + b);
                    t.w[a + 1][b + 1][k] = w[2 - (a + 1)][2 - (b + 1)][src];
                }
            }
        }
    }
    return t;
}

void OperatorSet::apply_full(std::span<const double> x, std::span<double> y, bool transposed) const {
    if (!transposed) {
        f0.apply(x, y, false);
        f1.apply(x, y, true);
        f2.apply(x, y, true);
    } else {
        f0.apply_transposed(x, y, false);
        f1.apply_transposed(x, y, true);
        f2.apply_transposed(x, y, true);
    }
}

namespace {

DenseMatrix densify(std::size_t n, const std::function<void(std::span<const double>, std::span<double>)>& apply) {
    DenseMatrix m(n, n);
    std::vector<double> e(n, 0.0), col(n);
    for (std::size_t k = 0; k < n; ++k) {
        e[k] = 1.0;
        apply(e, col);
        for (std::size_t i = 0; i < n; ++i) m(i, k) = col[i];
        e[k] = 0.0;
    }
    return m;
}

}  // namespace

DenseMatrix OperatorSet::dense_f0() const {
    return densify(size(), [&](auto x, auto y) { f0.apply(x, y, false); });
}
DenseMatrix OperatorSet::dense_f1() const {
    return densify(size(), [&](auto x, auto y) { f1.apply(x, y, false); });
}
DenseMatrix OperatorSet::dense_f2() const {
    return densify(size(), [&](auto x, auto y) { f2.apply(x, y, false); });
}
DenseMatrix OperatorSet::dense_full() const {
    return densify(size(), [&](auto x, auto y) { apply_full(x, y, false); });
}

MixedStencil mixed_stencil_weights(double coeff, double h_w, double h_e, double h_s, double h_n) {
    FBK_REQUIRE(h_w > 0 && h_e > 0 && h_s > 0 && h_n > 0, "mixed stencil: steps must be positive");
    MixedStencil st;
    if (coeff == 0.0) return st;
    if (coeff > 0.0) {
        const double p = coeff / (2.0 * h_w * h_s);
        const double q = coeff / (2.0 * h_e * h_n);
        st.w[0][0] = p;   // (-1,-1)
        st.w[2][2] = q;   // (+1,+1)
        st.w[0][1] = -p;  // (-1, 0)
        st.w[1][0] = -p;  // ( 0,-1)
        st.w[2][1] = -q;  // (+1, 0)
        st.w[1][2] = -q;  // ( 0,+1)
        st.w[1][1] = p + q;
    } else {
        const double p = -coeff / (2.0 * h_w * h_n);
        const double q = -coeff / (2.0 * h_e * h_s);
        st.w[0][2] = p;   // (-1,+1)
        st.w[2][0] = q;   // (+1,-1)
        st.w[0][1] = -p;
        st.w[1][2] = -p;
        st.w[2][1] = -q;
        st.w[1][0] = -q;
        st.w[1][1] = p + q;
    }
    return st;
}

namespace {

struct RowWeights {
    double sub = 0.0, diag = 0.0, sup = 0.0;
};

// Drift + diffusion + reaction on local steps (h_lo, h_hi); central where the
// off-diagonals stay nonnegative, one-sided otherwise.
RowWeights convection_diffusion_row(double drift, double diff, double reaction, double h_lo,
                                    double h_hi) {
    RowWeights rw;
    rw.diag = reaction;
    if (diff != 0.0) {
        rw.sub += 2.0 * diff / (h_lo * (h_lo + h_hi));
        rw.diag += -2.0 * diff / (h_lo * h_hi);
        rw.sup += 2.0 * diff / (h_hi * (h_lo + h_hi));
    }
    if (drift != 0.0) {
        const bool central = 2.0 * diff >= std::abs(drift) * (drift > 0.0 ? h_hi : h_lo);
        if (central) {
            rw.sub += -drift * h_hi / (h_lo * (h_lo + h_hi));
            rw.diag += drift * (h_hi - h_lo) / (h_lo * h_hi);
            rw.sup += drift * h_lo / (h_hi * (h_lo + h_hi));
        } else if (drift > 0.0) {
            rw.diag += -drift / h_hi;
            rw.sup += drift / h_hi;
        } else {
            rw.sub += -drift / h_lo;
            rw.diag += drift / h_lo;
        }
    }
    return rw;
}

}  // namespace

OperatorSet assemble(const Grid2D& grid, const ModelParams& model, double t, BoundaryPolicy policy) {
    model.validate();
    const std::size_t ns = grid.ns();
    const std::size_t nv = grid.nv();
    const auto& s = grid.s_nodes();
    const auto& v = grid.v_nodes();

    OperatorSet ops;
    ops.t_label = t;
    ops.f0 = MixedOperator::zero(ns, nv);
    ops.f1 = DirectionalOperator::zero(Axis::Spot, ns, nv);
    ops.f2 = DirectionalOperator::zero(Axis::Variance, ns, nv);

    const double r = model.r;
    const double half_r = 0.5 * r;

    for (std::size_t i = 0; i < ns; ++i) {
        const bool s_lo = (i == 0);
        const bool s_hi = (i + 1 == ns);
        for (std::size_t j = 0; j < nv; ++j) {
            const bool v_lo = (j == 0);
            const bool v_hi = (j + 1 == nv);
            const std::size_t k = i * nv + j;
            const double phi = model.local_vol(s[i], t);
            const double drift_s = (r - model.q) * s[i];
            const double drift_v = model.kappa * (model.v_inf - v[j]);

            // S=0 column: the spot dynamics degenerate to a frozen value.
            if (s_lo) continue;

            // F1 row.
            if (s_hi) {
                // One-sided closure with the second derivative dropped.
                const double h = s[i] - s[i - 1];
                ops.f1.sub[k] = -drift_s / h;
                ops.f1.diag[k] = drift_s / h - half_r;
            } else {
                const double diff_s = 0.5 * v[j] * phi * phi * s[i] * s[i];
                const RowWeights rw =
                    convection_diffusion_row(drift_s, diff_s, -half_r, s[i] - s[i - 1], s[i + 1] - s[i]);
                ops.f1.sub[k] = rw.sub;
                ops.f1.diag[k] = rw.diag;
                ops.f1.sup[k] = rw.sup;
            }

            // F2 row.
            if (v_lo) {
                // Degenerate row at v=0: diffusion dropped, mean reversion pushes up.
                const double h = v[1] - v[0];
                ops.f2.diag[k] = -drift_v / h - half_r;
                ops.f2.sup[k] = drift_v / h;
            } else if (v_hi) {
                const double h = v[j] - v[j - 1];
                ops.f2.sub[k] = -drift_v / h;
                ops.f2.diag[k] = drift_v / h - half_r;
            } else {
                const double diff_v = 0.5 * model.xi * model.xi * std::pow(v[j], 2.0 * model.beta);
                const RowWeights rw =
                    convection_diffusion_row(drift_v, diff_v, -half_r, v[j] - v[j - 1], v[j + 1] - v[j]);
                ops.f2.sub[k] = rw.sub;
                ops.f2.diag[k] = rw.diag;
                ops.f2.sup[k] = rw.sup;
            }

            // F0 row, interior only.
            if (!s_hi && !v_lo && !v_hi) {
                const double coeff =
                    model.rho * model.xi * phi * s[i] * std::pow(v[j], model.beta + 0.5);
                if (coeff != 0.0) {
                    const MixedStencil st = mixed_stencil_weights(coeff, s[i] - s[i - 1], s[i + 1] - s[i],
                                                                  v[j] - v[j - 1], v[j + 1] - v[j]);
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) ops.f0.w[a][b][k] = st.w[a][b];
                }
            }
        }
    }

    if (policy == BoundaryPolicy::ZeroDirichlet) {
        // Density vanishes at S=0, S_max and v_max; rows there and the
        // couplings into them are dropped. v=0 is not a Dirichlet boundary:
        // the diffusion degenerates and the mean-reversion drift points
        // inward, so the degenerate row assembled above stays.
        auto killed = [&](std::size_t i, std::size_t j) {
            return i == 0 || i + 1 == ns || j + 1 == nv;
        };
        for (std::size_t i = 0; i < ns; ++i) {
            for (std::size_t j = 0; j < nv; ++j) {
                const std::size_t k = i * nv + j;
                if (killed(i, j)) {
                    ops.f1.sub[k] = ops.f1.diag[k] = ops.f1.sup[k] = 0.0;
                    ops.f2.sub[k] = ops.f2.diag[k] = ops.f2.sup[k] = 0.0;
                    for (int a = 0; a < 3; ++a)
                        for (int b = 0; b < 3; ++b) ops.f0.w[a][b][k] = 0.0;
                    continue;
                }
                if (i == 1) ops.f1.sub[k] = 0.0;
                if (i + 2 == ns) ops.f1.sup[k] = 0.0;
                if (j + 2 == nv) ops.f2.sup[k] = 0.0;
                for (int a = -1; a <= 1; ++a)
                    for (int b = -1; b <= 1; ++b)
                        if (killed(i + a, j + b)) ops.f0.w[a + 1][b + 1][k] = 0.0;
            }
        }
    }

    // Grid-step requirement of the sign-adapted stencil: every interior
    // off-diagonal of F0+F1+F2 stays nonnegative.
    bool ok = true;
    for (std::size_t i = 1; i + 1 < ns && ok; ++i) {
        for (std::size_t j = 1; j + 1 < nv && ok; ++j) {
            const std::size_t k = i * nv + j;
            const double tol = -1e-12 * (std::abs(ops.f1.diag[k]) + std::abs(ops.f2.diag[k]) + 1.0);
            if (ops.f1.sub[k] + ops.f0.w[0][1][k] < tol) ok = false;
            if (ops.f1.sup[k] + ops.f0.w[2][1][k] < tol) ok = false;
            if (ops.f2.sub[k] + ops.f0.w[1][0][k] < tol) ok = false;
            if (ops.f2.sup[k] + ops.f0.w[1][2][k] < tol) ok = false;
        }
    }
    ops.positivity_constraint_ok = ok;
    return ops;
}

OperatorSet transpose(const OperatorSet& ops) {
    OperatorSet t;
    t.f0 = ops.f0.transposed();
    t.f1 = ops.f1.transposed();
    t.f2 = ops.f2.transposed();
    t.t_label = ops.t_label;
    t.positivity_constraint_ok = ops.positivity_constraint_ok;
    return t;
}

MMatrixReport check_m_matrix(const DenseMatrix& m, double tol) {
    FBK_REQUIRE(m.rows() == m.cols(), "check_m_matrix: matrix not square");
    MMatrixReport rep;
    for (std::size_t i = 0; i < m.rows(); ++i) {
        if (m(i, i) <= 0.0) rep.diag_positive = false;
        double offsum = 0.0;
        for (std::size_t j = 0; j < m.cols(); ++j) {
            if (i == j) continue;
            if (m(i, j) > tol) {
                rep.offdiag_nonpositive = false;
                rep.max_positive_offdiag = std::max(rep.max_positive_offdiag, m(i, j));
            }
            offsum += std::abs(m(i, j));
        }
        if (m(i, i) < offsum - tol) rep.weakly_diagonally_dominant = false;
        if (m(i, i) > offsum + tol) ++rep.strictly_dominant_rows;
    }
    rep.verdict = rep.diag_positive && rep.offdiag_nonpositive && rep.weakly_diagonally_dominant &&
                  rep.strictly_dominant_rows > 0;
    return rep;
}

void write_coo(const DenseMatrix& m, std::ostream& os, double drop_tol) {
    for (std::size_t i = 0; i < m.rows(); ++i)
        for (std::size_t j = 0; j < m.cols(); ++j)
            if (std::abs(m(i, j)) > drop_tol) os << i << ' ' << j << ' ' << m(i, j) << '\n';
}

}  // namespace fbk
