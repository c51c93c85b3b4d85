#include <doctest.h>

#include <cmath>
#include <complex>
#include <random>

#include "fbk/linalg.hpp"

using namespace fbk;

namespace {

std::mt19937 rng(20240917);

DenseMatrix random_matrix(std::size_t n, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
    DenseMatrix m(n, n);
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) m(i, j) = dist(rng);
    return m;
}

std::vector<double> random_vector(std::size_t n, double scale = 1.0) {
    std::uniform_real_distribution<double> dist(-scale, scale);
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

TEST_CASE("dense LU solves and transposed solves invert the matrix") {
    const std::size_t n = 17;
    DenseMatrix a = random_matrix(n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 5.0;  // keep well conditioned
    DenseLU lu(a);

    const auto b = random_vector(n);
    const auto x = lu.solve(b);
    const auto ax = a.matvec(x);
    for (std::size_t i = 0; i < n; ++i) CHECK(ax[i] == doctest::Approx(b[i]).epsilon(1e-12));

    const auto y = lu.solve_transposed(b);
    const auto aty = a.matvec_transposed(y);
    for (std::size_t i = 0; i < n; ++i) CHECK(aty[i] == doctest::Approx(b[i]).epsilon(1e-12));
}

TEST_CASE("dense LU adjoint identity <A^-1 u, w> = <u, A^-T w>") {
    const std::size_t n = 23;
    DenseMatrix a = random_matrix(n);
    for (std::size_t i = 0; i < n; ++i) a(i, i) += 4.0;
    DenseLU lu(a);
    const auto u = random_vector(n);
    const auto w = random_vector(n);
    CHECK(dot(lu.solve(u), w) == doctest::Approx(dot(u, lu.solve_transposed(w))).epsilon(1e-13));
}

TEST_CASE("tridiagonal LU matches a dense solve, both orientations") {
    const std::size_t n = 40;
    Tridiagonal t = Tridiagonal::zero(n);
    std::uniform_real_distribution<double> dist(0.1, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        t.diag[i] = 3.0 + dist(rng);
        if (i > 0) t.sub[i] = -dist(rng);
        if (i + 1 < n) t.sup[i] = -dist(rng);
    }
    DenseMatrix dense(n, n);
    for (std::size_t i = 0; i < n; ++i) {
        dense(i, i) = t.diag[i];
        if (i > 0) dense(i, i - 1) = t.sub[i];
        if (i + 1 < n) dense(i, i + 1) = t.sup[i];
    }
    TridiagonalLU lu(t);
    DenseLU dlu(dense);

    auto b = random_vector(n);
    auto x = b;
    lu.solve_inplace(x);
    const auto xd = dlu.solve(b);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xd[i]).epsilon(1e-12));

    auto y = b;
    lu.solve_transposed_inplace(y);
    const auto yd = dlu.solve_transposed(b);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(yd[i]).epsilon(1e-12));
}

TEST_CASE("banded LU reproduces dense solves on random banded systems") {
    const std::size_t n = 60, kl = 7, ku = 5;
    BandedMatrix bm(n, kl, ku);
    DenseMatrix dense(n, n);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t j = 0; j < n; ++j) {
            if (!bm.in_band(i, j)) continue;
            const double v = (i == j) ? 15.0 + dist(rng) : dist(rng);
            bm.at(i, j) = v;
            dense(i, j) = v;
        }
    }
    BandedLU blu(bm);
    DenseLU dlu(dense);
    const auto b = random_vector(n);

    auto x = b;
    blu.solve_inplace(x);
    const auto xd = dlu.solve(b);
    for (std::size_t i = 0; i < n; ++i) CHECK(x[i] == doctest::Approx(xd[i]).epsilon(1e-11));

    auto y = b;
    blu.solve_transposed_inplace(y);
    const auto yd = dlu.solve_transposed(b);
    for (std::size_t i = 0; i < n; ++i) CHECK(y[i] == doctest::Approx(yd[i]).epsilon(1e-11));
}

TEST_CASE("matrix exponential: diagonal case and the group property") {
    DenseMatrix d(3, 3);
    d(0, 0) = -1.0;
    d(1, 1) = 0.5;
    d(2, 2) = 2.0;
    const DenseMatrix e = expm(d);
    CHECK(e(0, 0) == doctest::Approx(std::exp(-1.0)).epsilon(1e-14));
    CHECK(e(1, 1) == doctest::Approx(std::exp(0.5)).epsilon(1e-14));
    CHECK(e(2, 2) == doctest::Approx(std::exp(2.0)).epsilon(1e-14));
    CHECK(std::abs(e(0, 1)) < 1e-15);

    const DenseMatrix a = random_matrix(8, 0.8);
    const DenseMatrix whole = expm(a);
    const DenseMatrix halves = matmul(expm(0.5 * a), expm(0.5 * a));
    CHECK(max_abs_diff(whole, halves) < 1e-12 * whole.max_abs());
}

TEST_CASE("matrix exponential transposes exactly: expm(A)^T = expm(A^T)") {
    const DenseMatrix a = random_matrix(12, 1.5);
    CHECK(max_abs_diff(expm(a).transposed(), expm(a.transposed())) < 1e-12);
}

TEST_CASE("fft matches a direct DFT and inverts") {
    const std::size_t n = 64;
    std::vector<std::complex<double>> a(n);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    for (auto& z : a) z = {dist(rng), dist(rng)};

    auto direct = [&](int sign) {
        std::vector<std::complex<double>> out(n);
        for (std::size_t k = 0; k < n; ++k) {
            std::complex<double> acc = 0.0;
            for (std::size_t j = 0; j < n; ++j) {
                const double ang = sign * 2.0 * M_PI * static_cast<double>(j * k) / n;
                acc += a[j] * std::complex<double>(std::cos(ang), std::sin(ang));
            }
            out[k] = acc;
        }
        return out;
    };
    const auto want = direct(-1);
    auto got = a;
    fft_inplace(got, -1);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(got[k] - want[k]) < 1e-11);

    fft_inplace(got, +1);
    for (std::size_t k = 0; k < n; ++k) CHECK(std::abs(got[k] / double(n) - a[k]) < 1e-12);
}
