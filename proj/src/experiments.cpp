#include "fbk/experiments.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>

#include "fbk/errors.hpp"

namespace fbk {

namespace {

Field payoff_field(const RunConfig& cfg, const Grid2D& grid, double strike) {
    return cell_average_payoff(cfg.option_kind, strike, grid);
}

InductionSettings backward_settings(const RunConfig& cfg) {
    InductionSettings s;
    s.scheme = cfg.scheme;
    s.direction = Direction::Backward;
    s.policy = BoundaryPolicy::PayoffClosure;
    s.jumps = cfg.jumps;
    s.dividends = cfg.dividends;
    return s;
}

InductionSettings forward_settings(const RunConfig& cfg) {
    InductionSettings s = backward_settings(cfg);
    s.direction = Direction::Forward;
    s.policy = BoundaryPolicy::ZeroDirichlet;
    return s;
}

}  // namespace

double price_backward(const RunConfig& cfg) { return price_backward(cfg, cfg.strike); }

double price_backward(const RunConfig& cfg, double strike) {
    const Grid2D grid = build_grid(cfg.grid, cfg.model, cfg.strike);
    const Field terminal = payoff_field(cfg, grid, strike);
    const Field solved = run_induction(backward_settings(cfg), cfg.model, grid, terminal);
    return solved.values[grid.index(grid.locate_s(cfg.model.s0), grid.locate_v(cfg.model.v0))];
}

DensityResult density_forward(const RunConfig& cfg) {
    const Grid2D grid = build_grid(cfg.grid, cfg.model, cfg.strike);
    const Field delta = discretize_delta(grid, cfg.model);
    InductionReport rep;
    DensityResult res;
    res.density = run_induction(forward_settings(cfg), cfg.model, grid, delta, &rep);
    res.min_density = rep.min_field_value;
    res.positivity_constraint_ok = rep.positivity_constraint_ok;
    res.strikes = cfg.strikes.empty() ? std::vector<double>{cfg.strike} : cfg.strikes;
    for (double k : res.strikes)
        res.prices.push_back(integrate_against(res.density, payoff_field(cfg, grid, k), grid));
    return res;
}

std::vector<SweepRow> theta_sweep(const RunConfig& cfg) {
    FBK_REQUIRE(!(cfg.jumps && cfg.jumps->active()),
                "theta_sweep: no semi-analytic reference with jumps enabled");
    const double ref = fft_price(cfg.model, cfg.strike, cfg.scheme.maturity, cfg.option_kind);
    std::vector<SweepRow> rows;
    for (double theta : cfg.thetas) {
        RunConfig run = cfg;
        run.scheme.theta = theta;
        run.strikes = {cfg.strike};
        const double bk = price_backward(run);
        const double fw = density_forward(run).prices.front();
        rows.push_back({theta, error_report(bk, fw, ref, theta)});
    }
    return rows;
}

void write_sweep(const std::vector<SweepRow>& rows, OutputFormat fmt, std::ostream& os) {
    if (fmt == OutputFormat::Csv) {
        os << "theta,eps_bk,eps_fw,gap\n" << std::fixed << std::setprecision(6);
        for (const auto& row : rows)
            os << row.theta << ',' << row.report.eps_bk << ',' << row.report.eps_fw << ','
               << row.report.gap << '\n';
        return;
    }
    os << std::setprecision(12) << "[";
    for (std::size_t i = 0; i < rows.size(); ++i)
        os << (i ? "," : "") << "\n  {\"theta\": " << rows[i].theta
           << ", \"eps_bk\": " << rows[i].report.eps_bk
           << ", \"eps_fw\": " << rows[i].report.eps_fw << ", \"gap\": " << rows[i].report.gap
           << ", \"reference\": " << rows[i].report.reference_price << "}";
    os << "\n]\n";
}

ConsistencyReport consistency_check(const RunConfig& cfg) {
    const Grid2D grid = build_grid(cfg.grid, cfg.model, cfg.strike);
    FBK_REQUIRE(grid.size() <= 2500,
                "consistency_check: grid has " << grid.size() << " nodes, oracle limit is 2500");
    const double dt = cfg.scheme.maturity / cfg.scheme.n_steps;
    const double theta = cfg.scheme.theta;

    const OperatorSet ops = assemble(grid, cfg.model, 0.0, BoundaryPolicy::ZeroDirichlet);
    GridSchemeBackend backend(ops, ops);

    ConsistencyReport rep;
    auto residual = [&](SchemeKind kind) {
        const auto bk = assemble_transition_matrix(kind, theta, backend, dt, Direction::Backward,
                                                   TransitionBuild::Probe);
        const auto fw = assemble_transition_matrix(kind, theta, backend, dt, Direction::Forward,
                                                   TransitionBuild::Probe);
        return max_abs_diff(fw.r, bk.r.transposed());
    };
    rep.hv_transpose_residual = residual(SchemeKind::HV);
    rep.mcs_transpose_residual = residual(SchemeKind::MCS);
    rep.euler_transpose_residual = residual(SchemeKind::ImplicitEuler);

    auto closed_vs_probe = [&](SchemeKind kind) {
        const auto probe = assemble_transition_matrix(kind, theta, backend, dt, Direction::Backward,
                                                      TransitionBuild::Probe);
        const auto closed = assemble_transition_matrix(kind, theta, backend, dt, Direction::Backward,
                                                       TransitionBuild::ClosedForm);
        return max_abs_diff(probe.r, closed.r);
    };
    rep.hv_closed_form_residual = closed_vs_probe(SchemeKind::HV);
    rep.mcs_closed_form_residual = closed_vs_probe(SchemeKind::MCS);

    // Adjoint chain identity with shared boundary rows.
    RunConfig shared = cfg;
    shared.strikes = {cfg.strike};
    InductionSettings bk_set = backward_settings(shared);
    bk_set.policy = BoundaryPolicy::ZeroDirichlet;
    const Field terminal = cell_average_payoff(shared.option_kind, shared.strike, grid);
    const Field solved = run_induction(bk_set, shared.model, grid, terminal);
    const double price_bk =
        solved.values[grid.index(grid.locate_s(shared.model.s0), grid.locate_v(shared.model.v0))];

    InductionSettings fw_set = forward_settings(shared);
    InductionReport fw_rep;
    const Field density =
        run_induction(fw_set, shared.model, grid, discretize_delta(grid, shared.model), &fw_rep);
    const double price_fw = integrate_against(density, terminal, grid);

    rep.adjoint_price_residual = std::abs(price_fw - price_bk);
    rep.min_forward_density = fw_rep.min_field_value;
    rep.positivity_constraint_ok = ops.positivity_constraint_ok;

    const DenseMatrix eye = DenseMatrix::identity(grid.size());
    rep.m1_is_m_matrix = check_m_matrix(eye - theta * dt * ops.dense_f1()).verdict;
    rep.m2_is_m_matrix = check_m_matrix(eye - theta * dt * ops.dense_f2()).verdict;
    return rep;
}

void write_consistency(const ConsistencyReport& rep, OutputFormat fmt, std::ostream& os) {
    if (fmt == OutputFormat::Csv) {
        os << std::scientific << std::setprecision(6)
           << "metric,value\n"
           << "hv_transpose_residual," << rep.hv_transpose_residual << '\n'
           << "mcs_transpose_residual," << rep.mcs_transpose_residual << '\n'
           << "euler_transpose_residual," << rep.euler_transpose_residual << '\n'
           << "hv_closed_form_residual," << rep.hv_closed_form_residual << '\n'
           << "mcs_closed_form_residual," << rep.mcs_closed_form_residual << '\n'
           << "adjoint_price_residual," << rep.adjoint_price_residual << '\n'
           << "m1_is_m_matrix," << rep.m1_is_m_matrix << '\n'
           << "m2_is_m_matrix," << rep.m2_is_m_matrix << '\n'
           << "positivity_constraint_ok," << rep.positivity_constraint_ok << '\n'
           << "min_forward_density," << rep.min_forward_density << '\n';
        return;
    }
    os << std::scientific << std::setprecision(6) << "{\n"
       << "  \"hv_transpose_residual\": " << rep.hv_transpose_residual << ",\n"
       << "  \"mcs_transpose_residual\": " << rep.mcs_transpose_residual << ",\n"
       << "  \"euler_transpose_residual\": " << rep.euler_transpose_residual << ",\n"
       << "  \"hv_closed_form_residual\": " << rep.hv_closed_form_residual << ",\n"
       << "  \"mcs_closed_form_residual\": " << rep.mcs_closed_form_residual << ",\n"
       << "  \"adjoint_price_residual\": " << rep.adjoint_price_residual << ",\n"
       << "  \"m1_is_m_matrix\": " << (rep.m1_is_m_matrix ? "true" : "false") << ",\n"
       << "  \"m2_is_m_matrix\": " << (rep.m2_is_m_matrix ? "true" : "false") << ",\n"
       << "  \"positivity_constraint_ok\": " << (rep.positivity_constraint_ok ? "true" : "false")
       << ",\n"
       << "  \"min_forward_density\": " << rep.min_forward_density << "\n}\n";
}

void write_price(double price, OutputFormat fmt, std::ostream& os) {
    os << std::setprecision(12);
    if (fmt == OutputFormat::Csv)
        os << "price\n" << price << '\n';
    else
        os << "{\"price\": " << price << "}\n";
}

void write_density(const DensityResult& res, const Grid2D& grid, OutputFormat fmt,
                   std::ostream& os) {
    os << std::setprecision(12);
    if (fmt == OutputFormat::Csv) {
        for (std::size_t k = 0; k < res.strikes.size(); ++k)
            os << "# strike " << res.strikes[k] << " price " << res.prices[k] << '\n';
        os << "s,v,density\n";
        for (std::size_t i = 0; i < grid.ns(); ++i)
            for (std::size_t j = 0; j < grid.nv(); ++j)
                os << grid.s_nodes()[i] << ',' << grid.v_nodes()[j] << ','
                   << res.density.values[grid.index(i, j)] << '\n';
        return;
    }
    os << "{\n  \"strikes\": [";
    for (std::size_t k = 0; k < res.strikes.size(); ++k) os << (k ? "," : "") << res.strikes[k];
    os << "],\n  \"prices\": [";
    for (std::size_t k = 0; k < res.prices.size(); ++k) os << (k ? "," : "") << res.prices[k];
    os << "],\n  \"min_density\": " << res.min_density << ",\n  \"density\": [";
    for (std::size_t n = 0; n < res.density.values.size(); ++n)
        os << (n ? "," : "") << res.density.values[n];
    os << "]\n}\n";
}

}  // namespace fbk
