#include "fbk/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "fbk/errors.hpp"

namespace fbk {

namespace {

using nlohmann::json;

template <typename T>
T get_or(const json& obj, const char* key, T fallback) {
    if (!obj.contains(key)) return fallback;
    try {
        return obj.at(key).get<T>();
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: bad value for '") + key + "': " + e.what());
    }
}

}  // namespace

RunConfig parse_config(const std::string& json_text) {
    json root;
    try {
        root = json::parse(json_text);
    } catch (const json::exception& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }

    RunConfig cfg;
    const json model = root.value("model", json::object());
    cfg.model.r = get_or(model, "r", 0.0);
    cfg.model.q = get_or(model, "q", 0.0);
    cfg.model.kappa = get_or(model, "kappa", 0.0);
    cfg.model.v_inf = get_or(model, "v_inf", 0.0);
    cfg.model.xi = get_or(model, "xi", 0.0);
    cfg.model.rho = get_or(model, "rho", 0.0);
    cfg.model.beta = get_or(model, "beta", 0.5);
    cfg.model.s0 = get_or(model, "s0", 0.0);
    cfg.model.v0 = get_or(model, "v0", 0.0);
    cfg.model.validate();

    if (root.contains("jumps")) {
        const json j = root.at("jumps");
        JumpSpec js;
        js.lambda = get_or(j, "lambda", 0.0);
        js.mu_j = get_or(j, "mu_j", 0.0);
        js.sigma_j = get_or(j, "sigma_j", 0.1);
        js.truncation = get_or(j, "truncation", 8.0 * js.sigma_j);
        js.validate();
        cfg.jumps = js;
    }

    if (root.contains("dividends")) {
        for (const auto& ev : root.at("dividends")) {
            DividendEvent e;
            e.t = get_or(ev, "t", 0.0);
            e.d = get_or(ev, "d", 0.0);
            cfg.dividends.events.push_back(e);
        }
    }

    const json scheme = root.value("scheme", json::object());
    const std::string kind = get_or<std::string>(scheme, "kind", "hv");
    if (kind == "hv") cfg.scheme.scheme = SchemeKind::HV;
    else if (kind == "mcs") cfg.scheme.scheme = SchemeKind::MCS;
    else if (kind == "euler") cfg.scheme.scheme = SchemeKind::ImplicitEuler;
    else throw ValidationError("config: scheme.kind must be hv, mcs or euler, got '" + kind + "'");
    cfg.scheme.theta = get_or(scheme, "theta", 0.8);
    cfg.scheme.n_steps = get_or(scheme, "n_steps", 100);
    cfg.scheme.damping_start = get_or(scheme, "damping_start", 2);
    cfg.scheme.damping_end = get_or(scheme, "damping_end", 2);
    cfg.scheme.maturity = get_or(scheme, "maturity", 1.0);
    validate_config(cfg.scheme);
    cfg.dividends.validate(cfg.scheme.maturity);

    const json grid = root.value("grid", json::object());
    cfg.grid.ns = get_or<std::size_t>(grid, "ns", 76);
    cfg.grid.nv = get_or<std::size_t>(grid, "nv", 79);
    cfg.grid.s_max_mult = get_or(grid, "s_max_mult", 40.0);
    cfg.grid.v_max_mult = get_or(grid, "v_max_mult", 6.0);
    cfg.grid.condense_points = get_or(grid, "condense_points", std::vector<double>{});
    cfg.grid.condense_strength = get_or(grid, "condense_strength", 25.0);
    cfg.grid.log_uniform = get_or(grid, "log_uniform", false);
    cfg.grid.s_min_mult = get_or(grid, "s_min_mult", 0.025);
    if (cfg.jumps && cfg.jumps->active() && !cfg.grid.log_uniform)
        throw ValidationError("config: jump runs need grid.log_uniform = true");

    const json option = root.value("option", json::object());
    const std::string okind = get_or<std::string>(option, "kind", "call");
    if (okind == "call") cfg.option_kind = PayoffKind::Call;
    else if (okind == "put") cfg.option_kind = PayoffKind::Put;
    else throw ValidationError("config: option.kind must be call or put, got '" + okind + "'");
    cfg.strike = get_or(option, "strike", 100.0);
    FBK_REQUIRE(cfg.strike > 0.0, "config: option.strike must be positive");

    cfg.strikes = get_or(root, "strikes", std::vector<double>{cfg.strike});
    cfg.thetas = get_or(root, "thetas", cfg.thetas);
    FBK_REQUIRE(!cfg.thetas.empty(), "config: thetas must be nonempty");
    return cfg;
}

RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    FBK_REQUIRE(in.good(), "config: cannot open '" << path << "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

}  // namespace fbk
