#include <chrono>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>

#include "commands.hpp"
#include "sklab/error.hpp"

using namespace sklab;
using namespace sklab::cli;

int main(int argc, char** argv) {
    CLI::App app{"Special Kahler geometry of hyperelliptic spectral curves"};
    app.require_subcommand(1);
    Options opt;
    double tol = 0.0;
    app.add_option("--config", opt.config, "family config (.toml or .json)");
    app.add_option("--out", opt.out, "output directory");
    auto* tol_opt = app.add_option("--tol", tol, "quadrature relative tolerance");
    app.add_option("--threads", opt.threads, "worker threads for ladder rows")->check(CLI::PositiveNumber);
    app.add_option("--seed", opt.seed, "seed for the randomized suite of check");
    const char* names[] = {"periods", "degenerate", "monodromy", "radial", "potential", "check"};
    for (const char* n : names) app.add_subcommand(n)->fallthrough();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? 0 : 2;
    }
    if (tol_opt->count()) opt.tol = tol;
    const std::string cmd = app.get_subcommands().front()->get_name();

    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    nlohmann::json echo;
    try {
        std::filesystem::create_directories(opt.out);
        if (cmd == "check") {
            out = run_check(opt);
        } else {
            const RunConfig rc = load(opt);
            echo = rc.echo;
            if (cmd == "periods") out = run_periods(rc, opt);
            else if (cmd == "degenerate") out = run_degenerate(rc, opt);
            else if (cmd == "monodromy") out = run_monodromy(rc, opt);
            else if (cmd == "radial") out = run_radial(rc, opt);
            else out = run_potential(rc, opt);
        }
    } catch (const Error& e) {
        std::cerr << e.what() << "\n";
        return e.kind() == ErrorKind::ConfigError ? 2 : 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    nlohmann::json doc = report_header(cmd, echo);
    doc["results"] = out.report;
    doc["verdicts"] = to_json(out.verdicts);
    doc["wall_clock_seconds"] = secs;
    write_text((std::filesystem::path(opt.out) / "report.json").string(), doc.dump(2) + "\n");

    for (const auto& v : out.verdicts)
        if (!v.passed)
            std::cerr << (v.asserted ? "assertion failed: " : "note: ") << v.name << "  " << v.detail << "\n";
    if (out.numeric_abort) {
        std::cerr << "numeric abort: some rows failed, see report.json\n";
        return 3;
    }
    return all_passed(out.verdicts) ? 0 : 1;
}
