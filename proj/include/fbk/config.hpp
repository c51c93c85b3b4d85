#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fbk/grid.hpp"
#include "fbk/model.hpp"

namespace fbk {

struct RunConfig {
    ModelParams model;
    std::optional<JumpSpec> jumps;
    DividendSchedule dividends;
    SchemeConfig scheme;
    GridSpec grid;
    PayoffKind option_kind = PayoffKind::Call;
    double strike = 100.0;
    std::vector<double> strikes;  // density command; defaults to {strike}
    std::vector<double> thetas = {0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 1.0};
};

// Parses the JSON run configuration; throws ValidationError with the key
// path on malformed input.
RunConfig parse_config(const std::string& json_text);
RunConfig load_config(const std::string& path);

}  // namespace fbk
