#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "sklab/family.hpp"

namespace sklab {

/// Reads the subset of TOML used by the bundled configs: tables, arrays of
/// tables, dotted keys, strings, integers, floats, booleans, arrays and inline
/// tables. Errors carry the line number.
nlohmann::json parse_toml(const std::string& text);

struct LadderSpec {
    double from = 1e-2;
    double to = 1e-5;
    double ratio = 1.7782794100389228;
    bool single_pair = false; // multi-collision: one extra ladder per pair
};

struct MonodromySpec {
    cplx eps0 = 0.05;
    int steps = 64;
    std::vector<int> turns{0, 1, 2};
};

struct RadialSpec {
    cplx eps = 0.1;
    std::vector<double> moduli{0.25, 0.5, 1.0, 2.0, 4.0};
    std::vector<double> args{-0.5, 0.0, 0.5, 1.0};
};

struct RunConfig {
    Family family;
    FamilyPoint point;        // base point for periods/potential
    std::optional<LadderSpec> ladder;
    std::optional<MonodromySpec> monodromy;
    std::optional<RadialSpec> radial;
    double fd_eps = 0.05;     // potential: finite-difference cross-check point
    nlohmann::json echo;
};

/// Validates a parsed config. Field errors name the offending path.
RunConfig parse_run_config(const nlohmann::json& j);
/// .toml or .json by extension.
RunConfig load_run_config(const std::string& path);

} // namespace sklab
