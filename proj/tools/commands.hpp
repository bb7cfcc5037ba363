#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include <json.hpp>

#include "sklab/config.hpp"
#include "sklab/report.hpp"

namespace sklab::cli {

struct Options {
    std::string config;
    std::string out = ".";
    std::optional<double> tol;
    int threads = 1;
    std::uint64_t seed = 20240611;
};

struct Outcome {
    std::vector<Verdict> verdicts;
    nlohmann::json report;
    bool numeric_abort = false;
};

RunConfig load(const Options& o);
ScanOptions scan_options(const RunConfig& rc, const Options& o);

Outcome run_periods(const RunConfig& rc, const Options& o);
Outcome run_degenerate(const RunConfig& rc, const Options& o);
Outcome run_monodromy(const RunConfig& rc, const Options& o);
Outcome run_radial(const RunConfig& rc, const Options& o);
Outcome run_potential(const RunConfig& rc, const Options& o);
Outcome run_check(const Options& o);

} // namespace sklab::cli
