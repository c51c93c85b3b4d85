#include "fbk/model.hpp"

#include <cmath>
#include <numbers>

#include "fbk/errors.hpp"

namespace fbk {

void ModelParams::validate() const {
    FBK_REQUIRE(xi > 0.0, "model: xi must be > 0, got " << xi);
    FBK_REQUIRE(kappa >= 0.0, "model: kappa must be >= 0, got " << kappa);
    FBK_REQUIRE(v_inf >= 0.0, "model: v_inf must be >= 0, got " << v_inf);
    FBK_REQUIRE(std::abs(rho) <= 1.0, "model: |rho| must be <= 1, got " << rho);
    FBK_REQUIRE(beta >= 0.0, "model: beta must be >= 0, got " << beta);
    FBK_REQUIRE(s0 > 0.0, "model: s0 must be > 0, got " << s0);
    FBK_REQUIRE(v0 > 0.0, "model: v0 must be > 0, got " << v0);
}

void JumpSpec::validate() const {
    FBK_REQUIRE(lambda >= 0.0, "jumps: lambda must be >= 0, got " << lambda);
    FBK_REQUIRE(sigma_j > 0.0, "jumps: sigma_j must be > 0, got " << sigma_j);
    FBK_REQUIRE(truncation > 0.0, "jumps: truncation must be > 0, got " << truncation);
}

double JumpSpec::levy_density(double y) const {
    const double z = (y - mu_j) / sigma_j;
    return lambda * std::exp(-0.5 * z * z) / (sigma_j * std::sqrt(2.0 * std::numbers::pi));
}

void DividendSchedule::validate(double maturity) const {
    double prev = 0.0;
    for (const auto& ev : events) {
        FBK_REQUIRE(ev.t > prev, "dividends: ex-dates must be strictly increasing and > 0");
        FBK_REQUIRE(ev.t < maturity, "dividends: ex-date " << ev.t << " not inside (0, " << maturity << ")");
        FBK_REQUIRE(ev.d >= 0.0, "dividends: amount must be >= 0, got " << ev.d);
        prev = ev.t;
    }
}

ConfigCheck validate_config(const SchemeConfig& cfg) {
    FBK_REQUIRE(cfg.theta > 0.0 && cfg.theta <= 1.0, "scheme: theta must lie in (0, 1], got " << cfg.theta);
    FBK_REQUIRE(cfg.n_steps > 0, "scheme: n_steps must be > 0, got " << cfg.n_steps);
    FBK_REQUIRE(cfg.damping_start >= 0 && cfg.damping_end >= 0, "scheme: damping counts must be >= 0");
    FBK_REQUIRE(cfg.n_steps >= cfg.damping_start + cfg.damping_end,
                "scheme: n_steps (" << cfg.n_steps << ") smaller than total damping steps");
    FBK_REQUIRE(cfg.maturity > 0.0, "scheme: maturity must be > 0, got " << cfg.maturity);
    return ConfigCheck{.stability_warning = cfg.theta < 1.0 / 3.0};
}

double levy_drift(const ModelParams& /*model*/, const JumpSpec& jumps) {
    jumps.validate();
    if (jumps.lambda == 0.0) return 0.0;

    // Composite Simpson over [-truncation, truncation]; the integrand decays
    // like the Gaussian tail so a fixed panel count is ample.
    const int n = 4096;  // even
    const double a = -jumps.truncation;
    const double h = 2.0 * jumps.truncation / n;
    auto f = [&](double y) { return (std::expm1(y)) * jumps.levy_density(y); };
    double acc = f(a) + f(a + n * h);
    for (int k = 1; k < n; ++k) acc += f(a + k * h) * ((k % 2 == 1) ? 4.0 : 2.0);
    const double value = acc * h / 3.0;
    FBK_REQUIRE(std::isfinite(value), "jumps: compensator integral is not finite");
    return value;
}

}  // namespace fbk
