#include <doctest.h>

#include "fbk/config.hpp"
#include "fbk/errors.hpp"

using namespace fbk;

namespace {

const char* kFullConfig = R"json({
  "model": {"r": 0.05, "q": 0.01, "kappa": 1.5, "v_inf": 0.1, "xi": 0.3,
            "rho": -0.8, "beta": 0.5, "s0": 100.0, "v0": 0.5},
  "jumps": {"lambda": 0.5, "mu_j": -0.1, "sigma_j": 0.25, "truncation": 2.0},
  "dividends": [{"t": 0.25, "d": 1.0}, {"t": 0.75, "d": 1.5}],
  "scheme": {"kind": "mcs", "theta": 0.6, "n_steps": 64, "damping_start": 3,
             "damping_end": 1, "maturity": 2.0},
  "grid": {"ns": 60, "nv": 50, "s_max_mult": 30.0, "v_max_mult": 5.0,
           "condense_points": [90.0, 110.0], "condense_strength": 40.0,
           "log_uniform": true, "s_min_mult": 0.05},
  "option": {"kind": "put", "strike": 95.0},
  "strikes": [90.0, 95.0, 100.0],
  "thetas": [0.4, 0.9]
})json";

}  // namespace

TEST_CASE("full config round-trips every field") {
    const RunConfig cfg = parse_config(kFullConfig);
    CHECK(cfg.model.q == 0.01);
    CHECK(cfg.model.rho == -0.8);
    CHECK(cfg.jumps.has_value());
    CHECK(cfg.jumps->lambda == 0.5);
    CHECK(cfg.dividends.events.size() == 2);
    CHECK(cfg.dividends.events[1].d == 1.5);
    CHECK(cfg.scheme.scheme == SchemeKind::MCS);
    CHECK(cfg.scheme.damping_start == 3);
    CHECK(cfg.scheme.maturity == 2.0);
    CHECK(cfg.grid.ns == 60);
    CHECK(cfg.grid.log_uniform);
    CHECK(cfg.grid.condense_points.size() == 2);
    CHECK(cfg.option_kind == PayoffKind::Put);
    CHECK(cfg.strike == 95.0);
    CHECK(cfg.strikes.size() == 3);
    CHECK(cfg.thetas == std::vector<double>{0.4, 0.9});
}

TEST_CASE("minimal config picks documented defaults") {
    const RunConfig cfg = parse_config(R"({"model": {"xi": 0.3, "s0": 100, "v0": 0.5}})");
    CHECK(cfg.scheme.scheme == SchemeKind::HV);
    CHECK(cfg.scheme.theta == 0.8);
    CHECK(cfg.scheme.n_steps == 100);
    CHECK(cfg.grid.ns == 76);
    CHECK(cfg.grid.nv == 79);
    CHECK(cfg.grid.condense_strength == 25.0);
    CHECK(cfg.thetas.size() == 8);
    CHECK_FALSE(cfg.jumps.has_value());
    CHECK(cfg.dividends.empty());
}

TEST_CASE("malformed configs fail with ValidationError") {
    CHECK_THROWS_AS(parse_config("not json"), ValidationError);
    CHECK_THROWS_AS(parse_config(R"({"model": {"xi": -1, "s0": 100, "v0": 0.5}})"),
                    ValidationError);
    CHECK_THROWS_AS(
        parse_config(R"({"model": {"xi": 0.3, "s0": 100, "v0": 0.5},
                         "scheme": {"kind": "unknown"}})"),
        ValidationError);
    CHECK_THROWS_AS(
        parse_config(R"({"model": {"xi": 0.3, "s0": 100, "v0": 0.5},
                         "option": {"kind": "straddle"}})"),
        ValidationError);
    CHECK_THROWS_AS(
        parse_config(R"({"model": {"xi": 0.3, "s0": 100, "v0": 0.5},
                         "scheme": {"theta": 0.0}})"),
        ValidationError);
    // Jumps demand a log-uniform grid.
    CHECK_THROWS_AS(
        parse_config(R"({"model": {"xi": 0.3, "s0": 100, "v0": 0.5},
                         "jumps": {"lambda": 0.5, "sigma_j": 0.25, "truncation": 2.0}})"),
        ValidationError);
    CHECK_THROWS_AS(load_config("/nonexistent/path.json"), ValidationError);
}
