#pragma once

#include <functional>
#include <optional>
#include <vector>

namespace fbk {

// Local-volatility multiplier phi(S, t). Empty means the constant 1.
using LocalVolFn = std::function<double(double, double)>;

// Heston-type LSV diffusion coefficients:
//   dS = (r - q) S dt + phi(S,t) sqrt(v) S dW
//   dv = kappa (v_inf - v) dt + xi v^beta dZ,   <dW,dZ> = rho dt
struct ModelParams {
    double r = 0.0;
    double q = 0.0;
    double kappa = 0.0;
    double v_inf = 0.0;
    double xi = 0.0;
    double rho = 0.0;
    double beta = 0.5;
    double s0 = 0.0;
    double v0 = 0.0;
    LocalVolFn phi;                 // empty -> 1
    bool phi_time_dependent = false;

    double local_vol(double s, double t) const { return phi ? phi(s, t) : 1.0; }
    void validate() const;
};

// Merton jumps: intensity lambda, log-jump size ~ N(mu_j, sigma_j^2).
// truncation is the absolute half-width of the quadrature domain in log-space.
struct JumpSpec {
    double lambda = 0.0;
    double mu_j = 0.0;
    double sigma_j = 0.1;
    double truncation = 1.0;

    void validate() const;
    bool active() const { return lambda > 0.0; }
    // Gaussian jump-size density times lambda (the Levy density).
    double levy_density(double y) const;
};

struct DividendEvent {
    double t = 0.0;  // ex-dividend date, in (0, maturity)
    double d = 0.0;  // cash amount per share
};

struct DividendSchedule {
    std::vector<DividendEvent> events;

    void validate(double maturity) const;
    bool empty() const { return events.empty(); }
};

enum class SchemeKind { HV, MCS, ImplicitEuler };

struct SchemeConfig {
    SchemeKind scheme = SchemeKind::HV;
    double theta = 0.8;
    int n_steps = 100;
    int damping_start = 2;  // implicit-Euler steps at the start of the induction
    int damping_end = 2;    // and at its end
    double maturity = 1.0;
};

struct ConfigCheck {
    bool stability_warning = false;  // theta below the unconditional-stability bound 1/3
};

// Throws ValidationError on bad values; flags theta < 1/3.
ConfigCheck validate_config(const SchemeConfig& cfg);

// Jump compensator integral((e^y - 1) nu(dy)) over [-truncation, truncation].
// Valid for finite-activity measures, so no small-jump cutoff is applied.
double levy_drift(const ModelParams& model, const JumpSpec& jumps);

}  // namespace fbk
