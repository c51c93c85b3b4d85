#include <doctest.h>

#include <cmath>
#include <random>

#include "fbk/errors.hpp"
#include "fbk/jumps.hpp"

using namespace fbk;

namespace {

std::mt19937 rng(90901);

std::vector<double> uniform_x(double lo, double hi, std::size_t n) {
    std::vector<double> x(n);
    for (std::size_t i = 0; i < n; ++i)
        x[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    return x;
}

JumpSpec merton_spec() {
    JumpSpec j;
    j.lambda = 0.5;
    j.mu_j = 0.0;
    j.sigma_j = 0.25;
    j.truncation = 2.0;  // 8 sigma
    return j;
}

std::vector<double> random_vector(std::size_t n, double lo = 0.0, double hi = 1.0) {
    std::uniform_real_distribution<double> dist(lo, hi);
    std::vector<double> v(n);
    for (auto& x : v) x = dist(rng);
    return v;
}

}  // namespace

TEST_CASE("zero intensity gives the zero generator") {
    JumpSpec j = merton_spec();
    j.lambda = 0.0;
    const JumpOperator op = build_jump_operator(j, uniform_x(-3.0, 3.0, 41));
    CHECK(op.j.max_abs() == 0.0);
    CHECK(op.compensator == 0.0);
}

TEST_CASE("compensated generator annihilates constants on every row") {
    const JumpSpec j = merton_spec();
    const JumpOperator op = build_jump_operator(j, uniform_x(-4.0, 4.0, 101));
    const std::vector<double> ones(101, 1.0);
    const auto out = op.j.matvec(ones);
    for (double v : out) CHECK(std::abs(v) <= 1e-8 * j.lambda);
}

TEST_CASE("martingale residual J e^x shrinks at second order") {
    const JumpSpec j = merton_spec();
    auto residual = [&](std::size_t n) {
        const auto x = uniform_x(-5.0, 5.0, n);
        const JumpOperator op = build_jump_operator(j, x);
        std::vector<double> ex(n);
        for (std::size_t i = 0; i < n; ++i) ex[i] = std::exp(x[i]);
        const auto out = op.j.matvec(ex);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i)
            if (std::abs(x[i]) <= 2.5) worst = std::max(worst, std::abs(out[i]));
        return worst;
    };
    const double coarse = residual(129);
    const double fine = residual(257);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("coarse-step generator is Metzler and its exponential is nonnegative") {
    const JumpSpec j = merton_spec();
    const JumpOperator op = build_jump_operator(j, uniform_x(-3.0, 3.0, 41));  // h = 0.15
    CHECK(op.metzler);
    const DenseMatrix e = jump_exponential(op, 0.5);
    for (std::size_t i = 0; i < e.rows(); ++i)
        for (std::size_t k = 0; k < e.cols(); ++k) CHECK(e(i, k) >= -1e-14);
}

TEST_CASE("backward and forward jump stages are exact matrix transposes") {
    const JumpOperator op = build_jump_operator(merton_spec(), uniform_x(-3.0, 3.0, 41));
    const DenseMatrix e = jump_exponential(op, 0.3);
    DenseMatrix jt = op.j.transposed();
    JumpOperator opt = op;
    opt.j = jt;
    const DenseMatrix et = jump_exponential(opt, 0.3);
    CHECK(max_abs_diff(e.transposed(), et) < 1e-12);
}

TEST_CASE("zero time step is the identity stage") {
    const JumpOperator op = build_jump_operator(merton_spec(), uniform_x(-3.0, 3.0, 41));
    const DenseMatrix e = jump_exponential(op, 0.0);
    CHECK(max_abs_diff(e, DenseMatrix::identity(41)) < 1e-15);
}

TEST_CASE("exponential minus first order shrinks as dt^2") {
    const JumpOperator op = build_jump_operator(merton_spec(), uniform_x(-3.0, 3.0, 41));
    const auto v = random_vector(41, -1.0, 1.0);
    auto defect = [&](double dt) {
        const auto ev = jump_exponential(op, dt).matvec(v);
        const auto jv = op.j.matvec(v);
        double worst = 0.0;
        for (std::size_t i = 0; i < v.size(); ++i)
            worst = std::max(worst, std::abs(ev[i] - v[i] - dt * jv[i]));
        return worst;
    };
    const double coarse = defect(0.2);
    const double fine = defect(0.1);
    CHECK(coarse / fine == doctest::Approx(4.0).epsilon(0.25));
}

TEST_CASE("forward stage conserves the total mass of a density row") {
    const std::size_t n = 101;
    const JumpOperator op = build_jump_operator(merton_spec(), uniform_x(-4.0, 4.0, n));
    const DenseMatrix e = jump_exponential(op, 1.0);
    const auto mass = random_vector(n, 0.0, 2.0);
    const auto moved = e.matvec_transposed(mass);
    double before = 0.0, after = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        before += mass[i];
        after += moved[i];
    }
    CHECK(after == doctest::Approx(before).epsilon(1e-10));
}

TEST_CASE("strang composition with an identity jump stage is two half steps") {
    auto half = [](const Field& f) {
        Field out = f;
        for (double& v : out.values) v *= 0.9;
        return out;
    };
    auto ident = [](const Field& f) { return f; };
    Field f{FieldKind::OptionValue, random_vector(12)};
    const Field out = strang_composite_step(half, ident, f);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        CHECK(out.values[i] == doctest::Approx(0.81 * f.values[i]).epsilon(1e-15));
}

TEST_CASE("strang splitting is exact for commuting stages") {
    // Both stages scalar multiples of the identity.
    const double a = -0.4, b = 0.25, dt = 0.7;
    auto half = [&](const Field& f) {
        Field out = f;
        for (double& v : out.values) v *= std::exp(0.5 * dt * a);
        return out;
    };
    auto jump = [&](const Field& f) {
        Field out = f;
        for (double& v : out.values) v *= std::exp(dt * b);
        return out;
    };
    Field f{FieldKind::OptionValue, random_vector(7)};
    const Field out = strang_composite_step(half, jump, f);
    for (std::size_t i = 0; i < f.values.size(); ++i)
        CHECK(out.values[i] == doctest::Approx(std::exp(dt * (a + b)) * f.values[i]).epsilon(1e-13));
}

TEST_CASE("strang error against the dense combined exponential shrinks ~4x per halving") {
    // Non-commuting pair: diffusion tridiagonal plus the Merton generator.
    const std::size_t n = 40;
    const auto x = uniform_x(-3.0, 3.0, n);
    const double h = x[1] - x[0];
    const JumpOperator jop = build_jump_operator(merton_spec(), x);

    DenseMatrix diff(n, n);
    for (std::size_t i = 1; i + 1 < n; ++i) {
        diff(i, i - 1) = 0.5 / (h * h);
        diff(i, i) = -1.0 / (h * h);
        diff(i, i + 1) = 0.5 / (h * h);
    }
    const DenseMatrix combined = diff + jop.j;

    std::vector<double> v0(n);
    for (std::size_t i = 0; i < n; ++i) v0[i] = std::exp(-4.0 * x[i] * x[i]);

    auto strang_error = [&](int steps) {
        const double t_final = 0.5;
        const double dt = t_final / steps;
        const DenseMatrix e_half = expm(0.5 * dt * diff);
        const DenseMatrix e_jump = jump_exponential(jop, dt);
        auto v = v0;
        for (int s = 0; s < steps; ++s) v = e_half.matvec(e_jump.matvec(e_half.matvec(v)));
        const auto want = expm(t_final * combined).matvec(v0);
        double worst = 0.0;
        for (std::size_t i = 0; i < n; ++i) worst = std::max(worst, std::abs(v[i] - want[i]));
        return worst;
    };
    const double e4 = strang_error(4);
    const double e8 = strang_error(8);
    const double e16 = strang_error(16);
    CHECK(e4 / e8 >= 3.5);
    CHECK(e8 / e16 >= 3.5);
}

TEST_CASE("jump operators require uniform log grids") {
    std::vector<double> x = uniform_x(-3.0, 3.0, 41);
    x[7] += 0.01;
    CHECK_THROWS_AS(build_jump_operator(merton_spec(), x), ValidationError);

    JumpSpec narrow = merton_spec();
    narrow.truncation = 1.0;  // < 8 sigma
    CHECK_THROWS_AS(build_jump_operator(narrow, uniform_x(-3.0, 3.0, 41)), ValidationError);
}
