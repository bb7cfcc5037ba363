#include <doctest.h>

#include "sklab/config.hpp"
#include "sklab/error.hpp"
#include "sklab/report.hpp"

using namespace sklab;
using nlohmann::json;

namespace {
std::string error_of(const std::string& toml) {
    try {
        parse_run_config(parse_toml(toml));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::ConfigError);
        return e.what();
    }
    return "";
}
bool has(const std::string& s, const std::string& sub) { return s.find(sub) != std::string::npos; }
} // namespace

TEST_CASE("toml subset") {
    const json j = parse_toml(R"(
# comment
a = 1
b = -2.5e-3   # trailing
s = "x\"y"
t = 'lit'
flag = true
arr = [1, 2,
       3]
nested = [[1, 2], [3, 4]]
inline = { p = 1, q = "r" }
[tab]
x.y = 4
[[list]]
k = 1
[[list]]
k = 2
[list.sub]
m = 3
)");
    CHECK(j["a"].is_number_integer());
    CHECK(j["b"].get<double>() == -2.5e-3);
    CHECK(j["s"] == "x\"y");
    CHECK(j["t"] == "lit");
    CHECK(j["flag"] == true);
    CHECK(j["arr"] == json::array({1, 2, 3}));
    CHECK(j["nested"][1][0] == 3);
    CHECK(j["inline"]["q"] == "r");
    CHECK(j["tab"]["x"]["y"] == 4);
    CHECK(j["list"].size() == 2);
    CHECK(j["list"][1]["sub"]["m"] == 3);
}

TEST_CASE("toml errors carry the line") {
    auto msg = [](const std::string& t) {
        try {
            parse_toml(t);
        } catch (const Error& e) {
            return std::string(e.what());
        }
        return std::string();
    };
    CHECK(has(msg("a = 1\na = 2\n"), "line 2"));
    CHECK(has(msg("a = 1\n\nb = [1, 2\n"), "opened on line 3"));
    CHECK(has(msg("x = \"open\n"), "line 1"));
    CHECK(has(msg("y = 1x\n"), "malformed"));
}

TEST_CASE("bundled configs load into the reference families") {
    const RunConfig f1 = load_run_config(SKLAB_SOURCE_DIR "/configs/f1.toml");
    const Family ref = family_f1();
    CHECK(f1.family.kind == FamilyKind::pair_collision);
    CHECK(f1.family.roots(f1.point) == ref.roots(ref.at(0.1)));
    CHECK(f1.family.plan.a_cycles == ref.plan.a_cycles);
    CHECK(f1.ladder.has_value());
    CHECK(f1.monodromy->turns == std::vector<int>{0, 1, 2});

    const RunConfig f3 = load_run_config(SKLAB_SOURCE_DIR "/configs/f3.toml");
    const Family r3 = family_f3();
    CHECK(f3.family.kind == FamilyKind::multi_collision);
    CHECK(f3.family.roots(f3.family.at(1e-3)) == r3.roots(r3.at(1e-3)));
    CHECK(f3.family.plan.a_cycles == r3.plan.a_cycles);
    CHECK(f3.ladder->single_pair);

    const RunConfig r1 = load_run_config(SKLAB_SOURCE_DIR "/configs/r1.toml");
    CHECK(r1.family.kind == FamilyKind::radial);
    CHECK(r1.radial->moduli.size() == 5);
}

TEST_CASE("config validation names the field") {
    const std::string base = "kind = \"raw\"\nfixed_roots = [1.0, 2.0, 3.0, 4.0]\n";
    CHECK(error_of(base).empty());
    CHECK(has(error_of("fixed_roots = [1.0, 2.0, 3.0, 4.0]\n"), "'kind'"));
    CHECK(has(error_of("kind = \"raw\"\nfixed_roots = [1.0, 2.0, 3.0]\n"), "even degree"));
    CHECK(has(error_of("kind = \"radial\"\nfixed_roots = [1.0, 2.0, 3.0, 4.0]\n"), "'radial'"));
    CHECK(has(error_of("kind = \"pair-collision\"\nfixed_roots = [1.0, 2.0, 3.0, 4.0]\n"), "'pairs'"));
    CHECK(has(error_of(base + "bogus = 1\n"), "'bogus'"));
    CHECK(has(error_of(base + "[quad]\nrel_tol = \"x\"\n"), "'quad.rel_tol'"));
    CHECK(has(error_of(base + "[plan]\nloops = [{ roots = [0, 9] }]\ngaps = []\na_cycles = []\n"),
              "'plan.loops[0].roots'"));
    CHECK(has(error_of(base + "[radial]\nmoduli = [1.0]\n"), "'radial.moduli'"));
    CHECK(has(error_of("kind = \"pair-collision\"\nfixed_roots = [1.0, 2.0, 3.0, 4.0]\n[[pairs]]\ncenter = 0.0\n"
                       "[plan]\nloops = [{ roots = [0, 1] }]\ngaps = [{ from = 0, to = 2 }]\na_cycles = [[1]]\n"
                       "[ladder]\nto = 1e-8\n"),
              "'ladder.to'"));
}

TEST_CASE("raw configs: coefficients and chain plans") {
    // (z^2 - 1)(z^2 - 4) = z^4 - 5 z^2 + 4
    const RunConfig rc = parse_run_config(parse_toml("kind = \"raw\"\ncoefficients = [4.0, 0.0, -5.0, 0.0, 1.0]\n"));
    CHECK(rc.family.fixed_roots.size() == 4);
    CHECK(rc.family.plan.loops.size() == 2);
    CHECK(rc.family.plan.gaps.size() == 1);
    const json js = json::parse(R"({"kind": "raw", "fixed_roots": [[0, 1], [0, -1], 2, 3]})");
    CHECK(parse_run_config(js).family.fixed_roots[0] == cplx(0, 1));
}

TEST_CASE("report serialization") {
    CHECK(fmt17(0.1) == "0.10000000000000001");
    CHECK(fmt17(-0.0) == "0");
    CHECK(fmt17(1e-5) == "1.0000000000000001e-05");
    CHECK(to_json(cplx(1.5, -2)) == json::array({1.5, -2.0}));
    CsvTable t({"a", "b"});
    t.add_row(std::vector<double>{1.0, 0.25});
    CHECK(t.str() == "a,b\n1,0.25\n");
    CHECK_THROWS(t.add_row(std::vector<double>{1.0}));
}
