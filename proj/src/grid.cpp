#include "fbk/grid.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "fbk/errors.hpp"

namespace fbk {

namespace {

std::vector<double> cell_widths(const std::vector<double>& nodes) {
    const std::size_t n = nodes.size();
    std::vector<double> w(n);
    if (n == 1) {
        w[0] = 1.0;
        return w;
    }
    w[0] = 0.5 * (nodes[1] - nodes[0]);
    for (std::size_t i = 1; i + 1 < n; ++i) w[i] = 0.5 * (nodes[i + 1] - nodes[i - 1]);
    w[n - 1] = 0.5 * (nodes[n - 1] - nodes[n - 2]);
    return w;
}

std::size_t locate(const std::vector<double>& nodes, double x, double scale, const char* what) {
    auto it = std::lower_bound(nodes.begin(), nodes.end(), x - 1e-9 * scale);
    FBK_REQUIRE(it != nodes.end() && std::abs(*it - x) <= 1e-9 * scale,
                what << " = " << x << " does not coincide with a grid node");
    return static_cast<std::size_t>(it - nodes.begin());
}

// Single-point Tavella-Randall map over [0, s_max]: S(u) = c + alpha sinh(u)
// on a uniform u-grid between the preimages of the interval ends.
std::vector<double> sinh_map(std::size_t n, double s_max, double center, double alpha) {
    const double u_lo = std::asinh((0.0 - center) / alpha);
    const double u_hi = std::asinh((s_max - center) / alpha);
    std::vector<double> s(n);
    for (std::size_t i = 0; i < n; ++i) {
        const double u = u_lo + (u_hi - u_lo) * static_cast<double>(i) / static_cast<double>(n - 1);
        s[i] = center + alpha * std::sinh(u);
    }
    s.front() = 0.0;
    s.back() = s_max;
    return s;
}

// Snap the node nearest to s0 exactly onto s0.
void snap_node(std::vector<double>& s, double s0) {
    std::size_t best = 0;
    double dist = std::abs(s[0] - s0);
    for (std::size_t i = 1; i < s.size(); ++i) {
        const double d = std::abs(s[i] - s0);
        if (d < dist) {
            dist = d;
            best = i;
        }
    }
    FBK_REQUIRE(best > 0 && best + 1 < s.size(), "spot " << s0 << " snaps onto a boundary node");
    s[best] = s0;
    FBK_REQUIRE(s[best] > s[best - 1] && s[best] < s[best + 1],
                "snapping the spot onto the grid broke monotonicity");
}

}  // namespace

Grid2D::Grid2D(std::vector<double> s_nodes, std::vector<double> v_nodes)
    : s_(std::move(s_nodes)), v_(std::move(v_nodes)) {
    FBK_REQUIRE(s_.size() >= 4 && v_.size() >= 4, "grid: need at least 4 nodes per direction");
    for (std::size_t i = 1; i < s_.size(); ++i)
        FBK_REQUIRE(s_[i] > s_[i - 1], "grid: s-nodes not strictly increasing at index " << i);
    for (std::size_t j = 1; j < v_.size(); ++j)
        FBK_REQUIRE(v_[j] > v_[j - 1], "grid: v-nodes not strictly increasing at index " << j);
    FBK_REQUIRE(s_.front() >= 0.0, "grid: s-nodes must be nonnegative");
    FBK_REQUIRE(v_.front() >= 0.0, "grid: v-nodes must be nonnegative");
    ws_ = cell_widths(s_);
    wv_ = cell_widths(v_);
}

std::size_t Grid2D::locate_s(double s0) const { return locate(s_, s0, s_.back(), "spot"); }
std::size_t Grid2D::locate_v(double v0) const { return locate(v_, v0, v_.back(), "variance"); }

bool Grid2D::s_log_uniform(double rel_tol) const {
    if (s_.front() <= 0.0) return false;
    const double h = std::log(s_[1] / s_[0]);
    for (std::size_t i = 1; i + 1 < s_.size(); ++i) {
        if (std::abs(std::log(s_[i + 1] / s_[i]) - h) > rel_tol * h) return false;
    }
    return true;
}

Grid2D build_grid(const GridSpec& spec, const ModelParams& model, double strike) {
    model.validate();
    FBK_REQUIRE(spec.ns >= 4 && spec.nv >= 4, "grid spec: ns and nv must be >= 4");
    const double s_max = spec.s_max_mult * std::max(model.s0, strike);
    const double v_max0 = spec.v_max_mult * model.v0;
    FBK_REQUIRE(s_max > 0.0 && v_max0 > model.v0, "grid spec: degenerate domain");

    std::vector<double> s;
    if (spec.log_uniform) {
        // Geometric spacing, S0 exactly on a node: uniform x = log(S/S0) grid
        // with zero as a grid point.
        const double s_min = spec.s_min_mult * model.s0;
        FBK_REQUIRE(s_min > 0.0 && s_min < model.s0, "grid spec: s_min_mult must be in (0, 1)");
        const double lo = std::log(s_min / model.s0);
        const double hi = std::log(s_max / model.s0);
        const double h = (hi - lo) / static_cast<double>(spec.ns - 1);
        const auto k0 = static_cast<std::ptrdiff_t>(std::llround(-lo / h));
        FBK_REQUIRE(k0 > 0 && k0 < static_cast<std::ptrdiff_t>(spec.ns) - 1,
                    "grid spec: S0 falls onto a boundary of the log-uniform grid");
        s.resize(spec.ns);
        for (std::size_t i = 0; i < spec.ns; ++i)
            s[i] = model.s0 * std::exp(h * (static_cast<std::ptrdiff_t>(i) - k0));
        s[static_cast<std::size_t>(k0)] = model.s0;
    } else if (spec.condense_strength <= 0.0) {
        s.resize(spec.ns);
        for (std::size_t i = 0; i < spec.ns; ++i)
            s[i] = s_max * static_cast<double>(i) / static_cast<double>(spec.ns - 1);
        snap_node(s, model.s0);
    } else {
        std::vector<double> points = spec.condense_points;
        if (points.empty()) points = {model.s0, strike};
        std::sort(points.begin(), points.end());
        points.erase(std::unique(points.begin(), points.end(),
                                 [&](double a, double b) { return std::abs(a - b) <= 1e-9 * s_max; }),
                     points.end());
        for (double p : points)
            FBK_REQUIRE(p >= 0.0 && p <= s_max, "grid spec: condense point " << p << " outside [0, " << s_max << "]");

        const double alpha = s_max / spec.condense_strength;
        if (points.size() == 1) {
            s = sinh_map(spec.ns, s_max, points.front(), alpha);
        } else {
            // Union of the per-point maps, thinned back to ns nodes.
            std::vector<double> pool;
            for (double p : points) {
                auto m = sinh_map(spec.ns, s_max, p, alpha);
                pool.insert(pool.end(), m.begin(), m.end());
            }
            std::sort(pool.begin(), pool.end());
            pool.erase(std::unique(pool.begin(), pool.end(),
                                   [&](double a, double b) { return std::abs(a - b) <= 1e-9 * s_max; }),
                       pool.end());
            s.resize(spec.ns);
            const double step = static_cast<double>(pool.size() - 1) / static_cast<double>(spec.ns - 1);
            for (std::size_t i = 0; i < spec.ns; ++i)
                s[i] = pool[static_cast<std::size_t>(std::llround(step * static_cast<double>(i)))];
            s.front() = 0.0;
            s.back() = s_max;
        }
        snap_node(s, model.s0);
    }

    // Uniform v-grid with the pitch nudged so v0 sits exactly on a node.
    const double dv0 = v_max0 / static_cast<double>(spec.nv - 1);
    auto j0 = static_cast<std::size_t>(std::llround(model.v0 / dv0));
    j0 = std::clamp<std::size_t>(j0, 1, spec.nv - 2);
    const double dv = model.v0 / static_cast<double>(j0);
    std::vector<double> v(spec.nv);
    for (std::size_t j = 0; j < spec.nv; ++j) v[j] = dv * static_cast<double>(j);
    v[j0] = model.v0;

    return Grid2D(std::move(s), std::move(v));
}

namespace {

double cell_lo(const Grid2D& g, std::size_t i) {
    const auto& s = g.s_nodes();
    return i == 0 ? s[0] : 0.5 * (s[i - 1] + s[i]);
}

double cell_hi(const Grid2D& g, std::size_t i) {
    const auto& s = g.s_nodes();
    return i + 1 == s.size() ? s.back() : 0.5 * (s[i] + s[i + 1]);
}

Field replicate_rows(const Grid2D& grid, const std::vector<double>& per_s) {
    Field f{FieldKind::OptionValue, std::vector<double>(grid.size())};
    for (std::size_t i = 0; i < grid.ns(); ++i)
        for (std::size_t j = 0; j < grid.nv(); ++j) f.values[grid.index(i, j)] = per_s[i];
    return f;
}

}  // namespace

Field cell_average_payoff(PayoffKind kind, double strike, const Grid2D& grid) {
    std::vector<double> avg(grid.ns());
    for (std::size_t i = 0; i < grid.ns(); ++i) {
        const double a = cell_lo(grid, i);
        const double b = cell_hi(grid, i);
        const double h = b - a;
        double value = 0.0;
        if (kind == PayoffKind::Call) {
            if (strike <= a) value = 0.5 * (a + b) - strike;
            else if (strike < b) value = 0.5 * (b - strike) * (b - strike) / h;
        } else {
            if (strike >= b) value = strike - 0.5 * (a + b);
            else if (strike > a) value = 0.5 * (strike - a) * (strike - a) / h;
        }
        avg[i] = value;
    }
    return replicate_rows(grid, avg);
}

Field cell_average_payoff(const std::function<double(double)>& payoff, const Grid2D& grid) {
    // 5-point Gauss-Legendre on [-1, 1].
    static const double gx[] = {-0.9061798459386640, -0.5384693101056831, 0.0,
                                0.5384693101056831, 0.9061798459386640};
    static const double gw[] = {0.2369268850561891, 0.4786286704993665, 0.5688888888888889,
                                0.4786286704993665, 0.2369268850561891};
    std::vector<double> avg(grid.ns());
    for (std::size_t i = 0; i < grid.ns(); ++i) {
        const double a = cell_lo(grid, i);
        const double b = cell_hi(grid, i);
        double acc = 0.0;
        for (int k = 0; k < 5; ++k) acc += gw[k] * payoff(0.5 * (a + b) + 0.5 * (b - a) * gx[k]);
        avg[i] = 0.5 * acc;
    }
    return replicate_rows(grid, avg);
}

Field discretize_delta(const Grid2D& grid, const ModelParams& model) {
    const std::size_t i0 = grid.locate_s(model.s0);
    const std::size_t j0 = grid.locate_v(model.v0);
    Field f{FieldKind::Density, std::vector<double>(grid.size(), 0.0)};
    f.values[grid.index(i0, j0)] = 1.0 / grid.cell_area(i0, j0);
    return f;
}

double integrate_against(const Field& density, const Field& values, const Grid2D& grid) {
    FBK_REQUIRE(density.values.size() == grid.size() && values.values.size() == grid.size(),
                "integrate_against: field size does not match grid");
    double acc = 0.0;
    for (std::size_t i = 0; i < grid.ns(); ++i) {
        const double ws = grid.s_cell_widths()[i];
        double row = 0.0;
        for (std::size_t j = 0; j < grid.nv(); ++j) {
            const std::size_t n = grid.index(i, j);
            row += density.values[n] * values.values[n] * grid.v_cell_widths()[j];
        }
        acc += ws * row;
    }
    return acc;
}

void write_grid_csv(const Grid2D& grid, std::ostream& os) {
    os << "axis,index,node,cell_width\n";
    for (std::size_t i = 0; i < grid.ns(); ++i)
        os << "s," << i << ',' << grid.s_nodes()[i] << ',' << grid.s_cell_widths()[i] << '\n';
    for (std::size_t j = 0; j < grid.nv(); ++j)
        os << "v," << j << ',' << grid.v_nodes()[j] << ',' << grid.v_cell_widths()[j] << '\n';
}

}  // namespace fbk
