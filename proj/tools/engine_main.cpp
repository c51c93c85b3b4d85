#include <fstream>
#include <iostream>
#include <string>

#include <CLI11.hpp>

#include "fbk/errors.hpp"
#include "fbk/experiments.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;

struct CommonOpts {
    std::string config_path;
    std::string out_path;
    std::string format = "csv";
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "Run configuration (JSON)")->required();
    cmd->add_option("--out", opts.out_path, "Output file; stdout when omitted");
    cmd->add_option("--format", opts.format, "Output format")
        ->check(CLI::IsMember({"csv", "json"}));
}

fbk::OutputFormat format_of(const CommonOpts& opts) {
    return opts.format == "json" ? fbk::OutputFormat::Json : fbk::OutputFormat::Csv;
}

int with_output(const CommonOpts& opts, const std::function<void(std::ostream&)>& writer) {
    if (opts.out_path.empty()) {
        writer(std::cout);
        return kExitOk;
    }
    std::ofstream out(opts.out_path);
    if (!out.good()) {
        std::cerr << "error: cannot open output file '" << opts.out_path << "'\n";
        return kExitValidation;
    }
    writer(out);
    return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Forward/backward finite-difference option pricing engine"};
    app.require_subcommand(1);

    CommonOpts price_opts, density_opts, sweep_opts, consistency_opts;
    auto* price_cmd = app.add_subcommand("price", "Backward solve, price at (S0, v0)");
    add_common(price_cmd, price_opts);
    auto* density_cmd =
        app.add_subcommand("density", "Forward solve, density surface and strike-list prices");
    add_common(density_cmd, density_opts);
    auto* sweep_cmd = app.add_subcommand("theta_sweep", "Backward/forward error table over theta");
    add_common(sweep_cmd, sweep_opts);
    auto* consistency_cmd =
        app.add_subcommand("consistency_check", "Transpose and adjoint residuals on a small grid");
    add_common(consistency_cmd, consistency_opts);

    CLI11_PARSE(app, argc, argv);

    try {
        if (price_cmd->parsed()) {
            const auto cfg = fbk::load_config(price_opts.config_path);
            const double price = fbk::price_backward(cfg);
            return with_output(price_opts,
                               [&](std::ostream& os) { fbk::write_price(price, format_of(price_opts), os); });
        }
        if (density_cmd->parsed()) {
            const auto cfg = fbk::load_config(density_opts.config_path);
            const auto res = fbk::density_forward(cfg);
            const auto grid = fbk::build_grid(cfg.grid, cfg.model, cfg.strike);
            return with_output(density_opts, [&](std::ostream& os) {
                fbk::write_density(res, grid, format_of(density_opts), os);
            });
        }
        if (sweep_cmd->parsed()) {
            const auto cfg = fbk::load_config(sweep_opts.config_path);
            const auto rows = fbk::theta_sweep(cfg);
            return with_output(sweep_opts, [&](std::ostream& os) {
                fbk::write_sweep(rows, format_of(sweep_opts), os);
            });
        }
        const auto cfg = fbk::load_config(consistency_opts.config_path);
        const auto rep = fbk::consistency_check(cfg);
        return with_output(consistency_opts, [&](std::ostream& os) {
            fbk::write_consistency(rep, format_of(consistency_opts), os);
        });
    } catch (const fbk::ValidationError& e) {
        std::cerr << "validation error: " << e.what() << '\n';
        return kExitValidation;
    } catch (const fbk::SolverError& e) {
        std::cerr << "solver error: " << e.what() << '\n';
        return kExitSolver;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitSolver;
    }
}
