#include "fbk/benchmark.hpp"

#include <cmath>
#include <numbers>
#include <vector>

#include "fbk/errors.hpp"
#include "fbk/linalg.hpp"

namespace fbk {

namespace {

// log(1 + z) without cancellation for small complex z.
std::complex<double> log1p_complex(std::complex<double> z) {
    if (std::abs(z) < 1e-4) {
        const std::complex<double> z2 = z * z;
        return z - 0.5 * z2 + z2 * z / 3.0 - 0.25 * z2 * z2;
    }
    return std::log(1.0 + z);
}

}  // namespace

std::complex<double> heston_char_fn(const ModelParams& model, std::complex<double> u,
                                    double maturity) {
    // E[exp(i u log(S_T/S0))], formulated with the stable branch of d. The
    // difference beta - d is evaluated as -xi^2 (iu + u^2) / (beta + d) so
    // the vanishing vol-of-vol limit carries no cancellation.
    const std::complex<double> i(0.0, 1.0);
    const double kappa = model.kappa;
    const double xi = model.xi;
    const double rho = model.rho;
    const std::complex<double> iu = i * u;

    const std::complex<double> beta = kappa - rho * xi * iu;
    const std::complex<double> d = std::sqrt(beta * beta + xi * xi * (iu + u * u));
    const std::complex<double> bmd_over_xi2 = -(iu + u * u) / (beta + d);  // (beta - d)/xi^2
    const std::complex<double> g = xi * xi * bmd_over_xi2 / (beta + d);
    const std::complex<double> edt = std::exp(-d * maturity);

    const std::complex<double> log_term = log1p_complex(-g * edt) - log1p_complex(-g);
    const std::complex<double> a =
        model.v_inf * kappa * (bmd_over_xi2 * maturity - 2.0 * log_term / (xi * xi));
    const std::complex<double> b = model.v0 * bmd_over_xi2 * (1.0 - edt) / (1.0 - g * edt);

    return std::exp(iu * (model.r - model.q) * maturity + a + b);
}

namespace {

// Carr-Madan transform evaluated on a log-strike grid; alpha < -1 produces
// put prices through the same expression.
double carr_madan_price(const ModelParams& model, double strike, double maturity, double alpha,
                        const FftSettings& st) {
    const std::complex<double> i(0.0, 1.0);
    const std::size_t n = st.n;
    const double eta = st.eta;
    const double lambda = 2.0 * std::numbers::pi / (static_cast<double>(n) * eta);
    const double b = 0.5 * static_cast<double>(n) * lambda;
    const double disc = std::exp(-model.r * maturity);
    const double x0 = std::log(model.s0);

    std::vector<std::complex<double>> work(n);
    for (std::size_t j = 0; j < n; ++j) {
        const double v = eta * static_cast<double>(j);
        const std::complex<double> arg(v, -(alpha + 1.0));
        const std::complex<double> num =
            disc * heston_char_fn(model, arg, maturity) * std::exp(i * arg * x0);
        const std::complex<double> den(alpha * alpha + alpha - v * v, (2.0 * alpha + 1.0) * v);
        const double simpson = (j == 0) ? 1.0 : ((j % 2 == 1) ? 4.0 : 2.0);
        work[j] = std::exp(i * b * v) * (num / den) * (eta * simpson / 3.0);
    }
    fft_inplace(work, -1);

    // Cubic interpolation of the damped transform at log(strike).
    const double k = std::log(strike);
    FBK_REQUIRE(k > -b + 2.0 * lambda && k < b - 3.0 * lambda,
                "fft_price: strike outside the transform's log-strike range");
    const auto m = static_cast<std::size_t>((k + b) / lambda);
    const std::size_t lo = (m == 0) ? 0 : m - 1;
    double value = 0.0;
    for (std::size_t a = 0; a < 4; ++a) {
        const std::size_t idx = lo + a;
        const double ka = -b + lambda * static_cast<double>(idx);
        double w = 1.0;
        for (std::size_t c = 0; c < 4; ++c) {
            if (c == a) continue;
            const double kc = -b + lambda * static_cast<double>(lo + c);
            w *= (k - kc) / (ka - kc);
        }
        value += w * std::exp(-alpha * ka) * work[idx].real() / std::numbers::pi;
    }
    return value;
}

}  // namespace

double fft_price(const ModelParams& model, double strike, double maturity, PayoffKind kind,
                 const FftSettings& settings) {
    model.validate();
    FBK_REQUIRE(strike > 0.0 && maturity > 0.0, "fft_price: strike and maturity must be positive");
    FBK_REQUIRE(!model.phi && model.beta == 0.5,
                "fft_price: reference prices exist for pure Heston only (phi = 1, beta = 1/2)");
    const double call = carr_madan_price(model, strike, maturity, settings.alpha, settings);
    const double put = carr_madan_price(model, strike, maturity, -settings.alpha - 1.0, settings);
    const double forward =
        model.s0 * std::exp(-model.q * maturity) - strike * std::exp(-model.r * maturity);
    const double parity = std::abs(call - put - forward);
    FBK_NUMERIC_REQUIRE(parity <= settings.parity_tol,
                        "fft_price: put-call parity residual " << parity << " exceeds "
                                                               << settings.parity_tol);
    return kind == PayoffKind::Call ? call : put;
}

ErrorReport error_report(double price_bk, double price_fw, double price_ref, double theta) {
    FBK_REQUIRE(price_ref != 0.0, "error_report: zero reference price");
    ErrorReport rep;
    rep.theta = theta;
    rep.reference_price = price_ref;
    rep.eps_bk = (price_ref - price_bk) / price_ref * 100.0;
    rep.eps_fw = (price_ref - price_fw) / price_ref * 100.0;
    rep.gap = rep.eps_bk - rep.eps_fw;
    return rep;
}

}  // namespace fbk
