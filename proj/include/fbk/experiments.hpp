#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "fbk/adi.hpp"
#include "fbk/benchmark.hpp"
#include "fbk/config.hpp"

namespace fbk {

enum class OutputFormat { Csv, Json };

// One backward induction; the price read off at the (S0, v0) node.
double price_backward(const RunConfig& cfg);
double price_backward(const RunConfig& cfg, double strike);

struct DensityResult {
    Field density;                 // discounted transition density at maturity
    std::vector<double> strikes;
    std::vector<double> prices;    // integrate_against per strike
    double min_density = 0.0;
    bool positivity_constraint_ok = true;
};

// One forward induction from the discretized delta; prices for the whole
// strike list from the same density.
DensityResult density_forward(const RunConfig& cfg);

struct SweepRow {
    double theta;
    ErrorReport report;
};

// Backward and forward solves against the FFT reference across the theta list.
std::vector<SweepRow> theta_sweep(const RunConfig& cfg);
void write_sweep(const std::vector<SweepRow>& rows, OutputFormat fmt, std::ostream& os);

struct ConsistencyReport {
    double hv_transpose_residual = 0.0;       // max |R_fw - R_bk^T|, probed
    double mcs_transpose_residual = 0.0;
    double euler_transpose_residual = 0.0;
    double hv_closed_form_residual = 0.0;     // closed form vs probing
    double mcs_closed_form_residual = 0.0;
    double adjoint_price_residual = 0.0;      // |price_fw - price_bk|, shared rows
    bool m1_is_m_matrix = false;
    bool m2_is_m_matrix = false;
    bool positivity_constraint_ok = false;
    double min_forward_density = 0.0;
};

// Small-grid transpose/adjoint diagnostics with shared boundary rows.
ConsistencyReport consistency_check(const RunConfig& cfg);
void write_consistency(const ConsistencyReport& rep, OutputFormat fmt, std::ostream& os);

void write_price(double price, OutputFormat fmt, std::ostream& os);
void write_density(const DensityResult& res, const Grid2D& grid, OutputFormat fmt, std::ostream& os);

}  // namespace fbk
