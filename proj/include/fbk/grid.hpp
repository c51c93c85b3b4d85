#pragma once

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "fbk/model.hpp"

namespace fbk {

enum class FieldKind { OptionValue, Density };

// Flat value vector over the grid, row-major: index = i_s * nv + i_v.
struct Field {
    FieldKind kind = FieldKind::OptionValue;
    std::vector<double> values;
};

struct GridSpec {
    std::size_t ns = 76;
    std::size_t nv = 79;
    double s_max_mult = 40.0;  // S_max = s_max_mult * max(S0, K)
    double v_max_mult = 6.0;   // v_max = v_max_mult * v0
    std::vector<double> condense_points;  // empty -> {S0, K}
    double condense_strength = 25.0;      // 0 -> uniform; larger -> tighter clustering
    bool log_uniform = false;  // geometric S-nodes (uniform in log S); required with jumps
    double s_min_mult = 0.025; // lower S bound as a fraction of S0, log_uniform grids only
};

class Grid2D {
  public:
    Grid2D(std::vector<double> s_nodes, std::vector<double> v_nodes);

    std::size_t ns() const { return s_.size(); }
    std::size_t nv() const { return v_.size(); }
    std::size_t size() const { return s_.size() * v_.size(); }
    std::size_t index(std::size_t i, std::size_t j) const { return i * v_.size() + j; }

    const std::vector<double>& s_nodes() const { return s_; }
    const std::vector<double>& v_nodes() const { return v_; }
    const std::vector<double>& s_cell_widths() const { return ws_; }
    const std::vector<double>& v_cell_widths() const { return wv_; }

    double cell_area(std::size_t i, std::size_t j) const { return ws_[i] * wv_[j]; }

    // Node index holding the given coordinate, or throws.
    std::size_t locate_s(double s0) const;
    std::size_t locate_v(double v0) const;

    bool s_log_uniform(double rel_tol = 1e-9) const;

  private:
    std::vector<double> s_, v_;
    std::vector<double> ws_, wv_;
};

// Nonuniform sinh-condensed S-grid and uniform v-grid. S0 is snapped onto a
// node; the v-grid pitch is nudged so v0 falls exactly on a node.
Grid2D build_grid(const GridSpec& spec, const ModelParams& model, double strike);

enum class PayoffKind { Call, Put };

// Cell averages of the vanilla payoff, exact for the piecewise-linear kink,
// replicated across v-rows.
Field cell_average_payoff(PayoffKind kind, double strike, const Grid2D& grid);
// Generic payoff by 5-point Gauss-Legendre per cell.
Field cell_average_payoff(const std::function<double(double)>& payoff, const Grid2D& grid);

// Discrete Dirac delta at (S0, v0): 1/(cell area) at that node, zero elsewhere.
Field discretize_delta(const Grid2D& grid, const ModelParams& model);

// Cell-weighted inner product sum_ij density * values * ws_i * wv_j.
double integrate_against(const Field& density, const Field& values, const Grid2D& grid);

void write_grid_csv(const Grid2D& grid, std::ostream& os);

}  // namespace fbk
