#pragma once

#include <complex>

#include "fbk/grid.hpp"
#include "fbk/model.hpp"

namespace fbk {

// Characteristic function of log(S_T) under pure Heston dynamics
// (phi = 1, variance diffusion xi sqrt(v)), branch-cut-safe form.
std::complex<double> heston_char_fn(const ModelParams& model, std::complex<double> u, double maturity);

struct FftSettings {
    double alpha = 1.25;       // damping for calls; puts use -alpha - 1
    std::size_t n = 1 << 14;   // Fourier nodes
    double eta = 0.05;         // integration step in the frequency domain
    double parity_tol = 1e-6;  // accepted |C - P - forward| residual
};

// Carr-Madan reference price. Resolution is vouched for by an internal
// put-call parity check; a violation throws SolverError.
double fft_price(const ModelParams& model, double strike, double maturity, PayoffKind kind,
                 const FftSettings& settings = {});

struct ErrorReport {
    double theta = 0.0;
    double eps_bk = 0.0;  // percent relative error of the backward price
    double eps_fw = 0.0;  // percent relative error of the forward price
    double gap = 0.0;     // eps_bk - eps_fw
    double reference_price = 0.0;
};

ErrorReport error_report(double price_bk, double price_fw, double price_ref, double theta = 0.0);

}  // namespace fbk
