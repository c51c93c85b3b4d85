#include <doctest.h>

#include <cmath>
#include <random>
#include <sstream>

#include "fbk/grid.hpp"
#include "fbk/operators.hpp"

using namespace fbk;

namespace {

std::mt19937 rng(77123);

ModelParams heston_test_model() {
    ModelParams m;
    m.r = 0.05;
    m.kappa = 1.5;
    m.v_inf = 0.1;
    m.xi = 0.3;
    m.rho = 0.8;
    m.s0 = 100.0;
    m.v0 = 0.5;
    return m;
}

Grid2D uniform_grid(double s_lo, double s_hi, std::size_t ns, double v_lo, double v_hi,
                    std::size_t nv) {
    std::vector<double> s(ns), v(nv);
    for (std::size_t i = 0; i < ns; ++i)
        s[i] = s_lo + (s_hi - s_lo) * static_cast<double>(i) / static_cast<double>(ns - 1);
    for (std::size_t j = 0; j < nv; ++j)
        v[j] = v_lo + (v_hi - v_lo) * static_cast<double>(j) / static_cast<double>(nv - 1);
    return Grid2D(std::move(s), std::move(v));
}

Grid2D reference_grid(const ModelParams& m) {
    GridSpec spec;
    spec.condense_points = {100.0};
    return build_grid(spec, m, 100.0);
}

std::vector<double> random_vector(std::size_t n) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

double dot(std::span<const double> a, std::span<const double> b) {
    double acc = 0.0;
    for (std::size_t i = 0; i < a.size(); ++i) acc += a[i] * b[i];
    return acc;
}

}  // namespace

TEST_CASE("generator annihilates constants when r = q = 0") {
    ModelParams m = heston_test_model();
    m.r = 0.0;
    const Grid2D g = reference_grid(m);
    const OperatorSet ops = assemble(g, m, 0.0, BoundaryPolicy::PayoffClosure);

    std::vector<double> ones(g.size(), 1.0), out(g.size());
    ops.apply_full(ones, out);
    for (std::size_t i = 1; i + 1 < g.ns(); ++i)
        for (std::size_t j = 1; j + 1 < g.nv(); ++j)
            CHECK(std::abs(out[g.index(i, j)]) < 1e-9);
}

TEST_CASE("reaction split leaves (F1+F2) 1 = -r at interior nodes") {
    const ModelParams m = heston_test_model();
    const Grid2D g = reference_grid(m);
    const OperatorSet ops = assemble(g, m, 0.0, BoundaryPolicy::PayoffClosure);

    std::vector<double> ones(g.size(), 1.0), out(g.size()), tmp(g.size());
    ops.f1.apply(ones, out, false);
    ops.f2.apply(ones, out, true);
    for (std::size_t i = 1; i + 1 < g.ns(); ++i)
        for (std::size_t j = 1; j + 1 < g.nv(); ++j)
            CHECK(out[g.index(i, j)] == doctest::Approx(-m.r).epsilon(1e-9));
}

TEST_CASE("full operator converges at second order against the analytic derivative") {
    ModelParams m = heston_test_model();
    m.kappa = 0.3;
    m.xi = 0.8;
    m.rho = 0.5;
    m.beta = 0.5;

    auto residual = [&](std::size_t ns, std::size_t nv) {
        const Grid2D g = uniform_grid(40.0, 160.0, ns, 0.2, 1.0, nv);
        const OperatorSet ops = assemble(g, m, 0.0, BoundaryPolicy::PayoffClosure);
        std::vector<double> f(g.size()), out(g.size());
        for (std::size_t i = 0; i < g.ns(); ++i)
            for (std::size_t j = 0; j < g.nv(); ++j)
                f[g.index(i, j)] = std::sin(g.s_nodes()[i] / 30.0) * std::exp(0.5 * g.v_nodes()[j]);
        ops.apply_full(f, out);
        double worst = 0.0;
        for (std::size_t i = 1; i + 1 < g.ns(); ++i) {
            for (std::size_t j = 1; j + 1 < g.nv(); ++j) {
                const double s = g.s_nodes()[i];
                const double v = g.v_nodes()[j];
                const double fv = std::sin(s / 30.0) * std::exp(0.5 * v);
                const double f_s = std::cos(s / 30.0) / 30.0 * std::exp(0.5 * v);
                const double f_ss = -fv / 900.0;
                const double f_v = 0.5 * fv;
                const double f_vv = 0.25 * fv;
                const double f_sv = 0.5 * std::cos(s / 30.0) / 30.0 * std::exp(0.5 * v);
                const double want = (m.r - m.q) * s * f_s + 0.5 * v * s * s * f_ss +
                                    m.kappa * (m.v_inf - v) * f_v +
                                    0.5 * m.xi * m.xi * v * f_vv +
                                    m.rho * m.xi * s * v * f_sv - m.r * fv;
                worst = std::max(worst, std::abs(out[g.index(i, j)] - want));
            }
        }
        return worst;
    };

    const double coarse = residual(31, 17);
    const double fine = residual(61, 33);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.15));
}

TEST_CASE("mixed stencil weights reduce to the diagonal cross on uniform steps") {
    const double c = 2.0, h1 = 0.5, h2 = 0.25;
    const MixedStencil st = mixed_stencil_weights(c, h1, h1, h2, h2);
    CHECK(st.w[0][0] == doctest::Approx(c / (2 * h1 * h2)));
    CHECK(st.w[2][2] == doctest::Approx(c / (2 * h1 * h2)));
    CHECK(st.w[0][2] == 0.0);
    CHECK(st.w[2][0] == 0.0);
    CHECK(st.w[1][1] == doctest::Approx(c / (h1 * h2)));

    // Both sign variants reproduce d2/dSdv of S*v exactly.
    for (double coeff : {1.7, -1.7}) {
        const MixedStencil w = mixed_stencil_weights(coeff, h1, h1, h2, h2);
        double acc = 0.0;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b)
                acc += w.w[a + 1][b + 1] * (10.0 + a * h1) * (3.0 + b * h2);
        CHECK(acc == doctest::Approx(coeff).epsilon(1e-12));
    }
}

TEST_CASE("mixed stencil: zero coefficient gives all-zero weights") {
    const MixedStencil st = mixed_stencil_weights(0.0, 0.1, 0.2, 0.3, 0.4);
    for (int a = 0; a < 3; ++a)
        for (int b = 0; b < 3; ++b) CHECK(st.w[a][b] == 0.0);
}

TEST_CASE("mixed stencil is second order on smoothly stretched steps") {
    // Steps drawn from a smooth monotone map; refining the map parameter
    // shrinks |h_e - h_w| at O(h^2), restoring the second order rate.
    auto apply_at = [](double delta) {
        const double u0 = 0.7, w0 = 0.3;
        auto gs = [](double u) { return std::sinh(u); };
        auto gv = [](double u) { return u + 0.4 * u * u; };
        const double s0 = gs(u0), v0 = gv(w0);
        const double hw = s0 - gs(u0 - delta), he = gs(u0 + delta) - s0;
        const double hs = v0 - gv(w0 - delta), hn = gv(w0 + delta) - v0;
        const MixedStencil st = mixed_stencil_weights(1.0, hw, he, hs, hn);
        auto f = [](double s, double v) { return std::sin(s) * std::exp(v); };
        double acc = 0.0;
        for (int a = -1; a <= 1; ++a)
            for (int b = -1; b <= 1; ++b) {
                const double ds = (a < 0) ? -hw : (a > 0 ? he : 0.0);
                const double dv = (b < 0) ? -hs : (b > 0 ? hn : 0.0);
                acc += st.w[a + 1][b + 1] * f(s0 + ds, v0 + dv);
            }
        return std::abs(acc - std::cos(s0) * std::exp(v0));
    };
    const double e1 = apply_at(0.08);
    const double e2 = apply_at(0.04);
    CHECK(e1 / e2 == doctest::Approx(4.0).epsilon(0.2));
}

TEST_CASE("transpose is an involution and satisfies the adjoint identity") {
    const ModelParams m = heston_test_model();
    GridSpec spec;
    spec.ns = 20;
    spec.nv = 14;
    spec.condense_points = {100.0};
    const Grid2D g = build_grid(spec, m, 100.0);

    for (BoundaryPolicy policy : {BoundaryPolicy::PayoffClosure, BoundaryPolicy::ZeroDirichlet}) {
        const OperatorSet ops = assemble(g, m, 0.0, policy);
        const OperatorSet tt = transpose(transpose(ops));
        CHECK(max_abs_diff(tt.dense_full(), ops.dense_full()) == 0.0);

        const OperatorSet t = transpose(ops);
        const auto x = random_vector(g.size());
        const auto y = random_vector(g.size());
        std::vector<double> fx(g.size()), fty(g.size());
        ops.apply_full(x, fx);
        t.apply_full(y, fty);
        CHECK(dot(fx, y) == doctest::Approx(dot(x, fty)).epsilon(1e-13));

        // The materialized transpose agrees with the transposed application.
        std::vector<double> fty2(g.size());
        ops.apply_full(y, fty2, true);
        for (std::size_t k = 0; k < g.size(); ++k)
            CHECK(fty[k] == doctest::Approx(fty2[k]).epsilon(1e-14));
    }
}

TEST_CASE("pure symmetric diffusion operator is self-adjoint") {
    ModelParams m = heston_test_model();
    m.r = 0.0;
    m.q = 0.0;
    m.kappa = 0.0;
    const Grid2D g = uniform_grid(10.0, 20.0, 9, 0.3, 0.5, 5);

    // Hand-build F1 = d^2/dS^2 with constant coefficient on the uniform grid,
    // stencil truncated at the edges so the matrix is symmetric tridiagonal.
    DirectionalOperator d2 = DirectionalOperator::zero(Axis::Spot, g.ns(), g.nv());
    const double h = g.s_nodes()[1] - g.s_nodes()[0];
    for (std::size_t i = 0; i < g.ns(); ++i)
        for (std::size_t j = 0; j < g.nv(); ++j) {
            if (i > 0) d2.sub[g.index(i, j)] = 1.0 / (h * h);
            d2.diag[g.index(i, j)] = -2.0 / (h * h);
            if (i + 1 < g.ns()) d2.sup[g.index(i, j)] = 1.0 / (h * h);
        }
    const DirectionalOperator d2t = d2.transposed();
    for (std::size_t k = 0; k < g.size(); ++k) {
        CHECK(d2t.sub[k] == d2.sub[k]);
        CHECK(d2t.diag[k] == d2.diag[k]);
        CHECK(d2t.sup[k] == d2.sup[k]);
    }
}

TEST_CASE("interior rows of F1 and F2 are Metzler after upwinding") {
    const ModelParams m = heston_test_model();
    const Grid2D g = reference_grid(m);
    const OperatorSet ops = assemble(g, m, 0.0, BoundaryPolicy::PayoffClosure);
    for (std::size_t i = 1; i + 1 < g.ns(); ++i)
        for (std::size_t j = 1; j + 1 < g.nv(); ++j) {
            const std::size_t k = g.index(i, j);
            CHECK(ops.f1.sub[k] >= -1e-12);
            CHECK(ops.f1.sup[k] >= -1e-12);
            CHECK(ops.f2.sub[k] >= -1e-12);
            CHECK(ops.f2.sup[k] >= -1e-12);
        }
}

TEST_CASE("M-matrix reports: diffusion solve matrix, identity, convection-dominated row") {
    // I - theta dt * (pure diffusion) is an M-matrix for any positive factor.
    const std::size_t n = 12;
    DenseMatrix diffusion(n, n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        diffusion(i, i - 1) = 1.0;
        diffusion(i, i) = -2.0;
        diffusion(i, i + 1) = 1.0;
    }
    for (double factor : {0.01, 1.0, 50.0}) {
        const DenseMatrix m = DenseMatrix::identity(n) - factor * diffusion;
        CHECK(check_m_matrix(m).verdict);
    }

    CHECK(check_m_matrix(DenseMatrix::identity(5)).verdict);

    // Central differencing of drift >> diffusion flips an off-diagonal sign.
    DenseMatrix bad = DenseMatrix::identity(n);
    const double drift = 10.0, diff = 0.1, h = 1.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        bad(i, i - 1) = -(diff / (h * h) - drift / (2 * h));
        bad(i, i) = 1.0 + 2 * diff / (h * h);
        bad(i, i + 1) = -(diff / (h * h) + drift / (2 * h));
    }
    const auto rep = check_m_matrix(bad);
    CHECK_FALSE(rep.verdict);
    CHECK_FALSE(rep.offdiag_nonpositive);
}

TEST_CASE("stencil grid-step flag: clear on a tuned log-uniform grid, set on the sinh grid") {
    ModelParams m = heston_test_model();
    m.kappa = 0.1;  // strong mean reversion at high v violates the step bound

    GridSpec log_spec;
    log_spec.ns = 60;
    log_spec.nv = 79;
    log_spec.log_uniform = true;
    log_spec.s_min_mult = 0.025;
    const Grid2D log_grid = build_grid(log_spec, m, 100.0);
    for (double rho : {0.8, 0.0, -0.8}) {
        m.rho = rho;
        const OperatorSet ops = assemble(log_grid, m, 0.0, BoundaryPolicy::ZeroDirichlet);
        CHECK(ops.positivity_constraint_ok);
    }

    m = heston_test_model();
    const Grid2D sinh_grid = reference_grid(m);
    const OperatorSet ops = assemble(sinh_grid, m, 0.0, BoundaryPolicy::PayoffClosure);
    CHECK_FALSE(ops.positivity_constraint_ok);
}

TEST_CASE("coordinate-format dump writes row col value triplets") {
    DenseMatrix m(2, 2);
    m(0, 1) = 2.5;
    m(1, 0) = -1.0;
    std::ostringstream os;
    write_coo(m, os);
    CHECK(os.str() == "0 1 2.5\n1 0 -1\n");
}

TEST_CASE("zero-Dirichlet policy decouples the killed boundaries, keeps v=0 flow") {
    const ModelParams m = heston_test_model();
    GridSpec spec;
    spec.ns = 10;
    spec.nv = 8;
    spec.condense_points = {100.0};
    const Grid2D g = build_grid(spec, m, 100.0);
    const DenseMatrix full = assemble(g, m, 0.0, BoundaryPolicy::ZeroDirichlet).dense_full();
    for (std::size_t i = 0; i < g.ns(); ++i)
        for (std::size_t j = 0; j < g.nv(); ++j) {
            const bool killed = (i == 0 || i + 1 == g.ns() || j + 1 == g.nv());
            if (!killed) continue;
            const std::size_t k = g.index(i, j);
            for (std::size_t l = 0; l < g.size(); ++l) {
                CHECK(full(k, l) == 0.0);
                CHECK(full(l, k) == 0.0);
            }
        }
    // The degenerate v=0 row still pushes upward with the mean reversion.
    const OperatorSet ops = assemble(g, m, 0.0, BoundaryPolicy::ZeroDirichlet);
    const std::size_t k10 = g.index(g.ns() / 2, 0);
    CHECK(ops.f2.sup[k10] > 0.0);
}
