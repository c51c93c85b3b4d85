#include "fbk/adi.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "fbk/errors.hpp"

namespace fbk {

namespace {

using Part = SchemeBackend::Part;

void axpy(double a, std::span<const double> x, std::span<double> y) {
    for (std::size_t k = 0; k < y.size(); ++k) y[k] += a * x[k];
}

}  // namespace

// ---------------------------------------------------------------------------
// Grid backend

struct GridSchemeBackend::Cache {
    struct FactoredLines {
        double coef;
        std::vector<TridiagonalLU> lines;
    };
    std::vector<FactoredLines> m1, m2;
    std::vector<std::pair<double, BandedLU>> full;
    std::vector<double> scratch;
};

GridSchemeBackend::GridSchemeBackend(const OperatorSet& prev, const OperatorSet& now)
    : prev_(prev), now_(now), cache_(std::make_unique<Cache>()) {
    FBK_REQUIRE(prev.ns() == now.ns() && prev.nv() == now.nv(),
                "scheme backend: operator sets live on different grids");
}

GridSchemeBackend::~GridSchemeBackend() = default;

std::size_t GridSchemeBackend::size() const { return now_.size(); }

void GridSchemeBackend::apply(Part part, bool prev, bool transposed, std::span<const double> x,
                              std::span<double> y) const {
    const OperatorSet& ops = prev ? prev_ : now_;
    switch (part) {
        case Part::Mixed:
            transposed ? ops.f0.apply_transposed(x, y, false) : ops.f0.apply(x, y, false);
            break;
        case Part::Spot:
            transposed ? ops.f1.apply_transposed(x, y, false) : ops.f1.apply(x, y, false);
            break;
        case Part::Variance:
            transposed ? ops.f2.apply_transposed(x, y, false) : ops.f2.apply(x, y, false);
            break;
        case Part::Full:
            ops.apply_full(x, y, transposed);
            break;
    }
}

namespace {

std::vector<TridiagonalLU> factor_lines(const DirectionalOperator& op, double coef) {
    const std::size_t n_lines = (op.axis == Axis::Spot) ? op.nv : op.ns;
    std::vector<TridiagonalLU> lus;
    lus.reserve(n_lines);
    for (std::size_t fixed = 0; fixed < n_lines; ++fixed) {
        Tridiagonal line = op.line(fixed);
        for (std::size_t m = 0; m < line.size(); ++m) {
            line.sub[m] *= -coef;
            line.diag[m] = 1.0 - coef * line.diag[m];
            line.sup[m] *= -coef;
        }
        lus.emplace_back(line);
    }
    return lus;
}

BandedLU factor_full(const OperatorSet& ops, double coef) {
    const std::size_t ns = ops.ns();
    const std::size_t nv = ops.nv();
    BandedMatrix m(ns * nv, nv + 1, nv + 1);
    for (std::size_t i = 0; i < ns; ++i) {
        for (std::size_t j = 0; j < nv; ++j) {
            const std::size_t k = i * nv + j;
            m.at(k, k) = 1.0 - coef * (ops.f0.w[1][1][k] + ops.f1.diag[k] + ops.f2.diag[k]);
            if (i > 0) m.at(k, k - nv) = -coef * (ops.f1.sub[k] + ops.f0.w[0][1][k]);
            if (i + 1 < ns) m.at(k, k + nv) = -coef * (ops.f1.sup[k] + ops.f0.w[2][1][k]);
            if (j > 0) m.at(k, k - 1) = -coef * (ops.f2.sub[k] + ops.f0.w[1][0][k]);
            if (j + 1 < nv) m.at(k, k + 1) = -coef * (ops.f2.sup[k] + ops.f0.w[1][2][k]);
            if (i > 0 && j > 0) m.at(k, k - nv - 1) = -coef * ops.f0.w[0][0][k];
            if (i > 0 && j + 1 < nv) m.at(k, k - nv + 1) = -coef * ops.f0.w[0][2][k];
            if (i + 1 < ns && j > 0) m.at(k, k + nv - 1) = -coef * ops.f0.w[2][0][k];
            if (i + 1 < ns && j + 1 < nv) m.at(k, k + nv + 1) = -coef * ops.f0.w[2][2][k];
        }
    }
    return BandedLU(std::move(m));
}

}  // namespace

void GridSchemeBackend::solve(Part part, bool transposed, double coef, std::span<double> b) const {
    if (part == Part::Full) {
        auto it = std::find_if(cache_->full.begin(), cache_->full.end(),
                               [&](const auto& e) { return e.first == coef; });
        if (it == cache_->full.end()) {
            cache_->full.emplace_back(coef, factor_full(now_, coef));
            it = std::prev(cache_->full.end());
        }
        transposed ? it->second.solve_transposed_inplace(b) : it->second.solve_inplace(b);
        return;
    }
    FBK_REQUIRE(part == Part::Spot || part == Part::Variance, "solve: no solver for the mixed part");
    const bool spot = (part == Part::Spot);
    auto& slot = spot ? cache_->m1 : cache_->m2;
    auto it = std::find_if(slot.begin(), slot.end(), [&](const auto& e) { return e.coef == coef; });
    if (it == slot.end()) {
        slot.push_back({coef, factor_lines(spot ? now_.f1 : now_.f2, coef)});
        it = std::prev(slot.end());
    }
    const std::size_t ns = now_.ns();
    const std::size_t nv = now_.nv();
    if (spot) {
        auto& scratch = cache_->scratch;
        scratch.resize(ns);
        for (std::size_t j = 0; j < nv; ++j) {
            for (std::size_t i = 0; i < ns; ++i) scratch[i] = b[i * nv + j];
            transposed ? it->lines[j].solve_transposed_inplace(scratch)
                       : it->lines[j].solve_inplace(scratch);
            for (std::size_t i = 0; i < ns; ++i) b[i * nv + j] = scratch[i];
        }
    } else {
        for (std::size_t i = 0; i < ns; ++i) {
            std::span<double> line = b.subspan(i * nv, nv);
            transposed ? it->lines[i].solve_transposed_inplace(line)
                       : it->lines[i].solve_inplace(line);
        }
    }
}

DenseMatrix GridSchemeBackend::dense(Part part, bool prev) const {
    const std::size_t n = size();
    DenseMatrix m(n, n);
    std::vector<double> e(n, 0.0), col(n);
    for (std::size_t k = 0; k < n; ++k) {
        e[k] = 1.0;
        apply(part, prev, false, e, col);
        for (std::size_t i = 0; i < n; ++i) m(i, k) = col[i];
        e[k] = 0.0;
    }
    return m;
}

// ---------------------------------------------------------------------------
// Dense backend

struct DenseSchemeBackend::Cache {
    std::map<std::pair<int, double>, DenseLU> lus;  // (part, coef) -> LU(I - coef F)
};

DenseSchemeBackend::DenseSchemeBackend(DenseOperatorTriple prev, DenseOperatorTriple now)
    : prev_(std::move(prev)), now_(std::move(now)), cache_(std::make_unique<Cache>()) {
    FBK_REQUIRE(prev_.f0.rows() == now_.f0.rows(), "dense backend: shape mismatch");
}

DenseSchemeBackend::DenseSchemeBackend(DenseOperatorTriple ops)
    : DenseSchemeBackend(ops, ops) {}

DenseSchemeBackend::~DenseSchemeBackend() = default;

std::size_t DenseSchemeBackend::size() const { return now_.f0.rows(); }

void DenseSchemeBackend::apply(Part part, bool prev, bool transposed, std::span<const double> x,
                               std::span<double> y) const {
    const DenseOperatorTriple& t = prev ? prev_ : now_;
    auto run = [&](const DenseMatrix& m) {
        auto r = transposed ? m.matvec_transposed(x) : m.matvec(x);
        std::copy(r.begin(), r.end(), y.begin());
    };
    switch (part) {
        case Part::Mixed: run(t.f0); return;
        case Part::Spot: run(t.f1); return;
        case Part::Variance: run(t.f2); return;
        case Part::Full: {
            auto r0 = transposed ? t.f0.matvec_transposed(x) : t.f0.matvec(x);
            auto r1 = transposed ? t.f1.matvec_transposed(x) : t.f1.matvec(x);
            auto r2 = transposed ? t.f2.matvec_transposed(x) : t.f2.matvec(x);
            for (std::size_t k = 0; k < r0.size(); ++k) y[k] = r0[k] + r1[k] + r2[k];
            return;
        }
    }
}

void DenseSchemeBackend::solve(Part part, bool transposed, double coef, std::span<double> b) const {
    FBK_REQUIRE(part != Part::Mixed, "solve: no solver for the mixed part");
    const auto key = std::make_pair(static_cast<int>(part), coef);
    auto it = cache_->lus.find(key);
    if (it == cache_->lus.end()) {
        const DenseMatrix& f = (part == Part::Spot)       ? now_.f1
                               : (part == Part::Variance) ? now_.f2
                                                          : now_.full();
        DenseMatrix m = DenseMatrix::identity(size()) - coef * f;
        it = cache_->lus.emplace(key, DenseLU(std::move(m))).first;
    }
    auto x = transposed ? it->second.solve_transposed(b) : it->second.solve(b);
    std::copy(x.begin(), x.end(), b.begin());
}

DenseMatrix DenseSchemeBackend::dense(Part part, bool prev) const {
    const DenseOperatorTriple& t = prev ? prev_ : now_;
    switch (part) {
        case Part::Mixed: return t.f0;
        case Part::Spot: return t.f1;
        case Part::Variance: return t.f2;
        case Part::Full: return t.full();
    }
    return {};
}

// ---------------------------------------------------------------------------
// Scheme steps

void hv_step(const SchemeBackend& b, double theta, double dt, Direction dir,
             std::vector<double>& field) {
    const std::size_t n = b.size();
    FBK_REQUIRE(field.size() == n, "hv_step: field size mismatch");
    FBK_REQUIRE(dt > 0.0, "hv_step: dt must be positive");
    const double tdt = theta * dt;
    std::vector<double> tmp(n);

    if (dir == Direction::Backward) {
        std::vector<double> f_prev_v(n), y(n);
        b.apply(Part::Full, true, false, field, f_prev_v);

        // Y0 and the two implicit corrections against V_{n-1}.
        std::vector<double> y0 = field;
        axpy(dt, f_prev_v, y0);

        y = y0;
        b.apply(Part::Spot, true, false, field, tmp);
        axpy(-tdt, tmp, y);
        b.solve(Part::Spot, false, tdt, y);

        b.apply(Part::Variance, true, false, field, tmp);
        axpy(-tdt, tmp, y);
        b.solve(Part::Variance, false, tdt, y);  // y = Y2

        std::vector<double> yt = y0;
        b.apply(Part::Full, false, false, y, tmp);
        axpy(0.5 * dt, tmp, yt);
        axpy(-0.5 * dt, f_prev_v, yt);

        b.apply(Part::Spot, false, false, y, tmp);
        axpy(-tdt, tmp, yt);
        b.solve(Part::Spot, false, tdt, yt);

        b.apply(Part::Variance, false, false, y, tmp);
        axpy(-tdt, tmp, yt);
        b.solve(Part::Variance, false, tdt, yt);

        field = std::move(yt);
        return;
    }

    // Forward: the rearranged transposed fractional steps.
    std::vector<double> y0 = field;
    b.solve(Part::Variance, true, tdt, y0);
    std::vector<double> y1 = y0;
    b.solve(Part::Spot, true, tdt, y1);

    std::vector<double> yt = field;  // Ytilde0 = V + dt (c1 Y1 - c2 Y0)
    b.apply(Part::Full, false, true, y1, tmp);
    axpy(0.5 * dt, tmp, yt);
    b.apply(Part::Spot, false, true, y1, tmp);
    axpy(-tdt, tmp, yt);
    b.apply(Part::Variance, false, true, y0, tmp);
    axpy(-tdt, tmp, yt);

    std::vector<double> yt1 = yt;
    b.solve(Part::Variance, true, tdt, yt1);
    std::vector<double> yt2 = yt1;
    b.solve(Part::Spot, true, tdt, yt2);

    std::vector<double> d2(n), d1(n);
    for (std::size_t k = 0; k < n; ++k) {
        d2[k] = yt2[k] - y1[k];
        d1[k] = yt1[k] - y0[k];
    }

    std::vector<double> out = yt2;  // + dt [c3 d2 - c2 d1 + c0 Y1], prev label
    b.apply(Part::Full, true, true, d2, tmp);
    axpy(dt, tmp, out);
    b.apply(Part::Spot, true, true, d2, tmp);
    axpy(-tdt, tmp, out);
    b.apply(Part::Variance, true, true, d1, tmp);
    axpy(-tdt, tmp, out);
    b.apply(Part::Full, true, true, y1, tmp);
    axpy(0.5 * dt, tmp, out);

    field = std::move(out);
}

void mcs_step(const SchemeBackend& b, double theta, double dt, Direction dir,
              std::vector<double>& field) {
    const std::size_t n = b.size();
    FBK_REQUIRE(field.size() == n, "mcs_step: field size mismatch");
    FBK_REQUIRE(dt > 0.0, "mcs_step: dt must be positive");
    const double tdt = theta * dt;
    std::vector<double> tmp(n);

    if (dir == Direction::Backward) {
        std::vector<double> f_prev_v(n);
        b.apply(Part::Full, true, false, field, f_prev_v);

        std::vector<double> y0 = field;
        axpy(dt, f_prev_v, y0);

        std::vector<double> y = y0;
        b.apply(Part::Spot, true, false, field, tmp);
        axpy(-tdt, tmp, y);
        b.solve(Part::Spot, false, tdt, y);

        b.apply(Part::Variance, true, false, field, tmp);
        axpy(-tdt, tmp, y);
        b.solve(Part::Variance, false, tdt, y);  // y = Y2

        // Mixed-derivative correction stage.
        std::vector<double> yt = y0;
        b.apply(Part::Full, false, false, y, tmp);
        axpy(0.5 * dt, tmp, yt);
        axpy(-0.5 * dt, f_prev_v, yt);
        b.apply(Part::Spot, false, false, y, tmp);
        axpy(-tdt, tmp, yt);
        b.apply(Part::Spot, true, false, field, tmp);
        axpy(tdt, tmp, yt);
        b.apply(Part::Variance, false, false, y, tmp);
        axpy(-tdt, tmp, yt);
        b.apply(Part::Variance, true, false, field, tmp);
        axpy(tdt, tmp, yt);

        // Final implicit corrections relax against V_{n-1}.
        b.apply(Part::Spot, false, false, field, tmp);
        axpy(-tdt, tmp, yt);
        b.solve(Part::Spot, false, tdt, yt);

        b.apply(Part::Variance, false, false, field, tmp);
        axpy(-tdt, tmp, yt);
        b.solve(Part::Variance, false, tdt, yt);

        field = std::move(yt);
        return;
    }

    std::vector<double> y0 = field;
    b.solve(Part::Variance, true, tdt, y0);
    std::vector<double> y1 = y0;
    b.solve(Part::Spot, true, tdt, y1);

    std::vector<double> yt = field;  // Ytilde0 = V + dt c_minus Y1
    b.apply(Part::Full, false, true, y1, tmp);
    axpy(0.5 * dt, tmp, yt);
    b.apply(Part::Spot, false, true, y1, tmp);
    axpy(-tdt, tmp, yt);
    b.apply(Part::Variance, false, true, y1, tmp);
    axpy(-tdt, tmp, yt);

    std::vector<double> yt1 = yt;
    b.solve(Part::Variance, true, tdt, yt1);
    std::vector<double> yt2 = yt1;
    b.solve(Part::Spot, true, tdt, yt2);

    std::vector<double> d2(n), d1(n);
    for (std::size_t k = 0; k < n; ++k) {
        d2[k] = yt2[k] - y1[k];
        d1[k] = yt1[k] - y0[k];
    }

    std::vector<double> out = yt2;
    b.apply(Part::Full, true, true, d2, tmp);  // c3 d2
    axpy(dt, tmp, out);
    b.apply(Part::Spot, true, true, d2, tmp);
    axpy(-tdt, tmp, out);
    b.apply(Part::Variance, true, true, d1, tmp);  // c2 d1
    axpy(-tdt, tmp, out);
    b.apply(Part::Full, true, true, y1, tmp);  // [c_plus - theta F1_now^T] Y1
    axpy(0.5 * dt, tmp, out);
    b.apply(Part::Spot, true, true, y1, tmp);
    axpy(tdt, tmp, out);
    b.apply(Part::Variance, true, true, y1, tmp);
    axpy(tdt, tmp, out);
    b.apply(Part::Spot, false, true, y1, tmp);
    axpy(-tdt, tmp, out);
    b.apply(Part::Variance, false, true, y0, tmp);  // c2^n Y0
    axpy(-tdt, tmp, out);

    field = std::move(out);
}

void implicit_euler(const SchemeBackend& b, double dt, Direction dir, std::vector<double>& field) {
    FBK_REQUIRE(field.size() == b.size(), "implicit_euler: field size mismatch");
    FBK_REQUIRE(dt > 0.0, "implicit_euler: dt must be positive");
    b.solve(Part::Full, dir == Direction::Forward, dt, field);
}

void scheme_step(const SchemeBackend& b, SchemeKind kind, double theta, double dt, Direction dir,
                 std::vector<double>& field) {
    switch (kind) {
        case SchemeKind::HV: hv_step(b, theta, dt, dir, field); return;
        case SchemeKind::MCS: mcs_step(b, theta, dt, dir, field); return;
        case SchemeKind::ImplicitEuler: implicit_euler(b, dt, dir, field); return;
    }
}

void hv_forward_step_direct(const SchemeBackend& b, double theta, double dt,
                            std::vector<double>& field) {
    const std::size_t n = b.size();
    const double tdt = theta * dt;
    std::vector<double> tmp(n);

    std::vector<double> y0 = field;
    b.solve(Part::Variance, true, tdt, y0);
    std::vector<double> y1 = y0;
    b.solve(Part::Spot, true, tdt, y1);

    // The small-norm stage: Ytilde0 = [1/2 F^T - theta F1^T] Y1 - theta F2^T Y0.
    std::vector<double> yt(n, 0.0);
    b.apply(Part::Full, false, true, y1, tmp);
    axpy(0.5, tmp, yt);
    b.apply(Part::Spot, false, true, y1, tmp);
    axpy(-theta, tmp, yt);
    b.apply(Part::Variance, false, true, y0, tmp);
    axpy(-theta, tmp, yt);

    std::vector<double> yt1 = yt;
    b.solve(Part::Variance, true, tdt, yt1);
    std::vector<double> yt2 = yt1;
    b.solve(Part::Spot, true, tdt, yt2);

    std::vector<double> inner = yt2;
    b.apply(Part::Full, true, true, yt2, tmp);
    axpy(dt, tmp, inner);
    b.apply(Part::Spot, true, true, yt2, tmp);
    axpy(-tdt, tmp, inner);
    b.apply(Part::Variance, true, true, yt1, tmp);
    axpy(-tdt, tmp, inner);

    std::vector<double> out = y1;
    b.apply(Part::Full, true, true, y1, tmp);
    axpy(0.5 * dt, tmp, out);
    axpy(dt, inner, out);

    field = std::move(out);
}

// ---------------------------------------------------------------------------
// Field-level wrappers

namespace {

Field grid_step(const OperatorSet& prev, const OperatorSet& now, SchemeKind kind, double theta,
                double dt, Direction dir, const Field& f) {
    GridSchemeBackend backend(prev, now);
    Field out = f;
    scheme_step(backend, kind, theta, dt, dir, out.values);
    return out;
}

}  // namespace

Field hv_backward_step(const OperatorSet& ops_prev, const OperatorSet& ops_now, double theta,
                       double dt, const Field& v) {
    return grid_step(ops_prev, ops_now, SchemeKind::HV, theta, dt, Direction::Backward, v);
}
Field hv_forward_step(const OperatorSet& ops_prev, const OperatorSet& ops_now, double theta,
                      double dt, const Field& p) {
    return grid_step(ops_prev, ops_now, SchemeKind::HV, theta, dt, Direction::Forward, p);
}
Field mcs_backward_step(const OperatorSet& ops_prev, const OperatorSet& ops_now, double theta,
                        double dt, const Field& v) {
    return grid_step(ops_prev, ops_now, SchemeKind::MCS, theta, dt, Direction::Backward, v);
}
Field mcs_forward_step(const OperatorSet& ops_prev, const OperatorSet& ops_now, double theta,
                       double dt, const Field& p) {
    return grid_step(ops_prev, ops_now, SchemeKind::MCS, theta, dt, Direction::Forward, p);
}
Field implicit_euler_step(const OperatorSet& ops, double dt, const Field& v, Direction dir) {
    GridSchemeBackend backend(ops, ops);
    Field out = v;
    implicit_euler(backend, dt, dir, out.values);
    return out;
}

// ---------------------------------------------------------------------------
// Transition matrices

namespace {

constexpr std::size_t kOracleSizeLimit = 2500;

DenseMatrix backward_closed_form(SchemeKind kind, double theta, const SchemeBackend& b, double dt) {
    const std::size_t n = b.size();
    const double tdt = theta * dt;
    const DenseMatrix eye = DenseMatrix::identity(n);

    const DenseMatrix f1n = b.dense(Part::Spot, false);
    const DenseMatrix f2n = b.dense(Part::Variance, false);
    if (kind == SchemeKind::ImplicitEuler) {
        DenseLU lu(eye - dt * b.dense(Part::Full, false));
        return lu.solve_matrix(eye);
    }
    const DenseMatrix f1p = b.dense(Part::Spot, true);
    const DenseMatrix f2p = b.dense(Part::Variance, true);
    const DenseMatrix fp = b.dense(Part::Full, true);
    const DenseMatrix fn = b.dense(Part::Full, false);

    DenseLU m1(eye - tdt * f1n);
    DenseLU m2(eye - tdt * f2n);

    const DenseMatrix r2 =
        m2.solve_matrix(m1.solve_matrix(eye + dt * (fp - theta * f1p)) - tdt * f2p);

    if (kind == SchemeKind::HV) {
        DenseMatrix inner = eye + 0.5 * dt * (fp + matmul(fn, r2)) - tdt * matmul(f1n, r2);
        return m2.solve_matrix(m1.solve_matrix(inner) - tdt * matmul(f2n, r2));
    }
    // MCS: the correction stage folded into one explicit matrix.
    DenseMatrix stage = eye + dt * (0.5 * fp + theta * (f1p + f2p)) +
                        matmul(dt * (0.5 * fn - theta * (f1n + f2n)), r2);
    return m2.solve_matrix(m1.solve_matrix(stage - tdt * f1n) - tdt * f2n);
}

}  // namespace

TransitionMatrix assemble_transition_matrix(SchemeKind kind, double theta, const SchemeBackend& b,
                                            double dt, Direction dir, TransitionBuild build) {
    const std::size_t n = b.size();
    FBK_REQUIRE(n <= kOracleSizeLimit,
                "transition matrix: " << n << " unknowns exceed the dense-oracle limit "
                                      << kOracleSizeLimit);
    TransitionMatrix tm;
    tm.direction = dir;
    if (build == TransitionBuild::Probe) {
        tm.r = DenseMatrix(n, n);
        std::vector<double> e(n, 0.0);
        for (std::size_t k = 0; k < n; ++k) {
            e[k] = 1.0;
            std::vector<double> col = e;
            scheme_step(b, kind, theta, dt, dir, col);
            for (std::size_t i = 0; i < n; ++i) tm.r(i, k) = col[i];
            e[k] = 0.0;
        }
        return tm;
    }
    DenseMatrix r = backward_closed_form(kind, theta, b, dt);
    tm.r = (dir == Direction::Backward) ? std::move(r) : r.transposed();
    return tm;
}

// ---------------------------------------------------------------------------
// Scalar amplification factors

std::complex<double> hv_amplification(std::complex<double> z0, std::complex<double> z1,
                                      std::complex<double> z2, double theta) {
    const std::complex<double> one(1.0, 0.0);
    const std::complex<double> z = z0 + z1 + z2;
    const std::complex<double> y0 = one + z;
    const std::complex<double> y1 = (y0 - theta * z1) / (one - theta * z1);
    const std::complex<double> y2 = (y1 - theta * z2) / (one - theta * z2);
    const std::complex<double> yt0 = y0 + 0.5 * z * (y2 - one);
    const std::complex<double> yt1 = (yt0 - theta * z1 * y2) / (one - theta * z1);
    return (yt1 - theta * z2 * y2) / (one - theta * z2);
}

std::complex<double> mcs_amplification(std::complex<double> z0, std::complex<double> z1,
                                       std::complex<double> z2, double theta) {
    const std::complex<double> one(1.0, 0.0);
    const std::complex<double> z = z0 + z1 + z2;
    const std::complex<double> y0 = one + z;
    const std::complex<double> y1 = (y0 - theta * z1) / (one - theta * z1);
    const std::complex<double> y2 = (y1 - theta * z2) / (one - theta * z2);
    const std::complex<double> yt0 =
        y0 + (0.5 * z - theta * (z1 + z2)) * (y2 - one);
    const std::complex<double> yt1 = (yt0 - theta * z1) / (one - theta * z1);
    return (yt1 - theta * z2) / (one - theta * z2);
}

// ---------------------------------------------------------------------------
// Full induction

Field run_induction(const InductionSettings& settings, const ModelParams& model, const Grid2D& grid,
                    const Field& initial, InductionReport* report) {
    validate_config(settings.scheme);
    model.validate();
    const Direction dir = settings.direction;
    FBK_REQUIRE(initial.values.size() == grid.size(), "induction: field does not match grid");
    if (dir == Direction::Backward)
        FBK_REQUIRE(initial.kind == FieldKind::OptionValue,
                    "induction: backward runs start from an OptionValue field");
    else
        FBK_REQUIRE(initial.kind == FieldKind::Density,
                    "induction: forward runs start from a Density field");

    const int m_steps = settings.scheme.n_steps;
    const double maturity = settings.scheme.maturity;
    const double dt = maturity / m_steps;

    settings.dividends.validate(maturity);

    // Jump stage setup.
    const bool with_jumps = settings.jumps.has_value() && settings.jumps->active();
    DenseMatrix jump_exp;
    if (with_jumps) {
        FBK_REQUIRE(grid.s_log_uniform(),
                    "induction: jump stages need a log-uniform spot grid (geometric spacing)");
        FBK_REQUIRE(!model.phi_time_dependent,
                    "induction: jump stages support time-invariant coefficients only");
        std::vector<double> x(grid.ns());
        for (std::size_t i = 0; i < grid.ns(); ++i) x[i] = std::log(grid.s_nodes()[i] / model.s0);
        jump_exp = jump_exponential(build_jump_operator(*settings.jumps, x), dt);
    }

    // Dividend events snapped to time nodes, amounts moved at rate r.
    struct Event {
        int node;
        double t_exact;
        DividendOperator op;
    };
    std::vector<Event> events;
    for (const auto& ev : settings.dividends.events) {
        if (ev.d == 0.0) continue;
        int node = static_cast<int>(std::llround(ev.t / dt));
        node = std::clamp(node, 1, m_steps - 1);
        const double amount = ev.d * std::exp(model.r * (node * dt - ev.t));
        DividendOperator op = (dir == Direction::Backward)
                                  ? build_backward_dividend_op(grid, amount)
                                  : build_forward_dividend_op(grid, amount, settings.dividend_mode);
        events.push_back({node, ev.t, std::move(op)});
    }

    // Frozen operators; reassembled per step only when phi depends on time.
    const bool constant_ops = !model.phi_time_dependent;
    OperatorSet ops_now, ops_prev;
    std::unique_ptr<GridSchemeBackend> backend;
    if (constant_ops) {
        ops_now = assemble(grid, model, 0.0, settings.policy);
        backend = std::make_unique<GridSchemeBackend>(ops_now, ops_now);
    }

    Field field = initial;
    // Forward runs step the cell-mass vector; densities are restored at exit.
    if (dir == Direction::Forward)
        for (std::size_t i = 0; i < grid.ns(); ++i)
            for (std::size_t j = 0; j < grid.nv(); ++j)
                field.values[grid.index(i, j)] *= grid.cell_area(i, j);

    double min_density = std::numeric_limits<double>::max();
    auto track_minimum = [&]() {
        if (dir != Direction::Forward) return;
        for (std::size_t i = 0; i < grid.ns(); ++i)
            for (std::size_t j = 0; j < grid.nv(); ++j)
                min_density = std::min(min_density,
                                       field.values[grid.index(i, j)] / grid.cell_area(i, j));
    };
    track_minimum();

    bool positivity_flag = true;
    for (int k = 1; k <= m_steps; ++k) {
        if (!constant_ops) {
            const double t_prev = (dir == Direction::Backward) ? maturity - (k - 1) * dt : k * dt;
            const double t_now = (dir == Direction::Backward) ? maturity - k * dt : (k - 1) * dt;
            ops_prev = assemble(grid, model, t_prev, settings.policy);
            ops_now = assemble(grid, model, t_now, settings.policy);
            backend = std::make_unique<GridSchemeBackend>(ops_prev, ops_now);
        }
        positivity_flag = positivity_flag && ops_now.positivity_constraint_ok;

        const bool damped =
            (k <= settings.scheme.damping_start) || (k > m_steps - settings.scheme.damping_end);
        const SchemeKind kind = damped ? SchemeKind::ImplicitEuler : settings.scheme.scheme;

        if (with_jumps) {
            scheme_step(*backend, kind, settings.scheme.theta, 0.5 * dt, dir, field.values);
            apply_jump_matrix(jump_exp, field.values, grid.ns(), grid.nv(), dir);
            scheme_step(*backend, kind, settings.scheme.theta, 0.5 * dt, dir, field.values);
        } else {
            scheme_step(*backend, kind, settings.scheme.theta, dt, dir, field.values);
        }

        // Dividend adjustments at the calendar node just reached.
        const int node = (dir == Direction::Backward) ? m_steps - k : k;
        if (dir == Direction::Backward) {
            for (auto it = events.rbegin(); it != events.rend(); ++it)
                if (it->node == node) field = apply_dividend(it->op, field, grid);
        } else {
            for (const auto& ev : events)
                if (ev.node == node) field = apply_dividend(ev.op, field, grid);
        }

        track_minimum();
    }

    if (dir == Direction::Forward)
        for (std::size_t i = 0; i < grid.ns(); ++i)
            for (std::size_t j = 0; j < grid.nv(); ++j)
                field.values[grid.index(i, j)] /= grid.cell_area(i, j);

    if (report) {
        report->min_field_value = (dir == Direction::Forward)
                                      ? min_density
                                      : *std::min_element(field.values.begin(), field.values.end());
        report->positivity_constraint_ok = positivity_flag;
    }
    return field;
}

}  // namespace fbk
