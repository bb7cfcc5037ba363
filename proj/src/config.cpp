#include "sklab/config.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <sstream>

#include "sklab/error.hpp"

namespace sklab {

using nlohmann::json;

namespace {

class TomlReader {
public:
    explicit TomlReader(const std::string& text) : s_(text) {}

    json parse() {
        json root = json::object();
        json* table = &root;
        while (true) {
            skip_blank_lines();
            if (eof()) break;
            if (peek() == '[') {
                const bool array = s_.compare(pos_, 2, "[[") == 0;
                pos_ += array ? 2 : 1;
                std::vector<std::string> path = key_path();
                skip_ws();
                if (!consume(array ? "]]" : "]")) fail("expected closing bracket in table header");
                table = open_table(root, path, array);
            } else {
                std::vector<std::string> path = key_path();
                skip_ws();
                if (!consume("=")) fail("expected '=' after key");
                skip_ws();
                json v = value();
                json* t = table;
                for (std::size_t i = 0; i + 1 < path.size(); ++i) {
                    json& next = (*t)[path[i]];
                    if (next.is_null()) next = json::object();
                    if (!next.is_object()) fail("key '" + path[i] + "' is not a table");
                    t = &next;
                }
                if (t->contains(path.back())) fail("duplicate key '" + path.back() + "'");
                (*t)[path.back()] = std::move(v);
            }
            skip_ws();
            skip_comment();
            if (!eof() && peek() != '\n') fail("unexpected trailing characters");
        }
        return root;
    }

private:
    [[noreturn]] void fail(const std::string& msg) const {
        throw Error(ErrorKind::ConfigError, "line " + std::to_string(line_) + ": " + msg);
    }
    bool eof() const { return pos_ >= s_.size(); }
    char peek() const { return s_[pos_]; }
    bool consume(const char* lit) {
        const std::size_t n = std::char_traits<char>::length(lit);
        if (s_.compare(pos_, n, lit) != 0) return false;
        pos_ += n;
        return true;
    }
    void skip_ws() {
        while (!eof() && (peek() == ' ' || peek() == '\t' || peek() == '\r')) ++pos_;
    }
    void skip_comment() {
        if (!eof() && peek() == '#')
            while (!eof() && peek() != '\n') ++pos_;
    }
    void skip_blank_lines() {
        while (true) {
            skip_ws();
            skip_comment();
            if (!eof() && peek() == '\n') {
                ++pos_;
                ++line_;
                continue;
            }
            break;
        }
    }

    std::string key() {
        skip_ws();
        if (eof()) fail("expected key");
        if (peek() == '"') return basic_string();
        if (peek() == '\'') return literal_string();
        const std::size_t start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '_' || peek() == '-')) ++pos_;
        if (pos_ == start) fail("expected key");
        return s_.substr(start, pos_ - start);
    }
    std::vector<std::string> key_path() {
        std::vector<std::string> p{key()};
        skip_ws();
        while (!eof() && peek() == '.') {
            ++pos_;
            p.push_back(key());
            skip_ws();
        }
        return p;
    }

    json* open_table(json& root, const std::vector<std::string>& path, bool array) {
        json* t = &root;
        for (std::size_t i = 0; i < path.size(); ++i) {
            json& next = (*t)[path[i]];
            const bool last = i + 1 == path.size();
            if (last && array) {
                if (next.is_null()) next = json::array();
                if (!next.is_array()) fail("'" + path[i] + "' is not an array of tables");
                next.push_back(json::object());
                return &next.back();
            }
            if (next.is_null()) next = json::object();
            if (next.is_array()) {
                if (next.empty() || !next.back().is_object()) fail("'" + path[i] + "' is not a table");
                t = &next.back();
            } else if (next.is_object()) {
                t = &next;
            } else {
                fail("'" + path[i] + "' is not a table");
            }
        }
        return t;
    }

    std::string basic_string() {
        ++pos_;
        std::string out;
        while (true) {
            if (eof() || peek() == '\n') fail("unterminated string");
            char c = s_[pos_++];
            if (c == '"') break;
            if (c == '\\') {
                if (eof()) fail("unterminated escape");
                char e = s_[pos_++];
                switch (e) {
                case 'n': out += '\n'; break;
                case 't': out += '\t'; break;
                case '"': out += '"'; break;
                case '\\': out += '\\'; break;
                default: fail(std::string("unsupported escape \\") + e);
                }
            } else {
                out += c;
            }
        }
        return out;
    }
    std::string literal_string() {
        ++pos_;
        const std::size_t start = pos_;
        while (!eof() && peek() != '\'' && peek() != '\n') ++pos_;
        if (eof() || peek() != '\'') fail("unterminated string");
        return s_.substr(start, pos_++ - start);
    }

    // whitespace, newlines and comments inside arrays
    void skip_array_space() {
        while (true) {
            skip_ws();
            skip_comment();
            if (!eof() && peek() == '\n') {
                ++pos_;
                ++line_;
                continue;
            }
            break;
        }
    }

    json value() {
        if (eof()) fail("expected value");
        const char c = peek();
        if (c == '"') return basic_string();
        if (c == '\'') return literal_string();
        if (c == '[') {
            ++pos_;
            const int opened = line_;
            json arr = json::array();
            skip_array_space();
            while (!eof() && peek() != ']') {
                arr.push_back(value());
                skip_array_space();
                if (!eof() && peek() == ',') {
                    ++pos_;
                    skip_array_space();
                } else if (eof()) {
                    fail("unterminated array opened on line " + std::to_string(opened));
                } else if (peek() != ']') {
                    fail("expected ',' or ']' in array");
                }
            }
            if (eof()) fail("unterminated array opened on line " + std::to_string(opened));
            ++pos_;
            return arr;
        }
        if (c == '{') {
            ++pos_;
            json obj = json::object();
            skip_ws();
            while (!eof() && peek() != '}') {
                const std::string k = key();
                skip_ws();
                if (!consume("=")) fail("expected '=' in inline table");
                skip_ws();
                if (obj.contains(k)) fail("duplicate key '" + k + "'");
                obj[k] = value();
                skip_ws();
                if (!eof() && peek() == ',') {
                    ++pos_;
                    skip_ws();
                } else if (eof() || peek() != '}') {
                    fail("expected ',' or '}' in inline table");
                }
            }
            if (eof()) fail("unterminated inline table");
            ++pos_;
            return obj;
        }
        if (consume("true")) return true;
        if (consume("false")) return false;
        const std::size_t start = pos_;
        while (!eof() && (std::isalnum(static_cast<unsigned char>(peek())) || peek() == '+' || peek() == '-' ||
                          peek() == '.' || peek() == '_'))
            ++pos_;
        std::string tok = s_.substr(start, pos_ - start);
        tok.erase(std::remove(tok.begin(), tok.end(), '_'), tok.end());
        if (tok.empty()) fail("expected value");
        const bool is_float = tok.find_first_of(".eE") != std::string::npos || tok == "inf" || tok == "+inf" ||
                              tok == "-inf" || tok == "nan";
        try {
            std::size_t used = 0;
            if (is_float) {
                const double d = std::stod(tok, &used);
                if (used != tok.size()) fail("malformed number '" + tok + "'");
                return d;
            }
            const long long v = std::stoll(tok, &used, 10);
            if (used != tok.size()) fail("malformed number '" + tok + "'");
            return v;
        } catch (const std::logic_error&) {
            fail("malformed value '" + tok + "'");
        }
    }

    const std::string& s_;
    std::size_t pos_ = 0;
    int line_ = 1;
};

[[noreturn]] void field_error(const std::string& path, const std::string& msg) {
    throw Error(ErrorKind::ConfigError, "field '" + path + "': " + msg);
}

double get_double(const json& j, const std::string& path) {
    if (!j.is_number()) field_error(path, "expected a number");
    return j.get<double>();
}

int get_int(const json& j, const std::string& path) {
    if (!j.is_number_integer()) field_error(path, "expected an integer");
    return j.get<int>();
}

cplx get_complex(const json& j, const std::string& path) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (j.is_array() && j.size() == 2 && j[0].is_number() && j[1].is_number())
        return {j[0].get<double>(), j[1].get<double>()};
    field_error(path, "expected a number or [re, im]");
}

std::vector<cplx> get_complex_list(const json& j, const std::string& path) {
    if (!j.is_array()) field_error(path, "expected an array");
    std::vector<cplx> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_complex(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<double> get_double_list(const json& j, const std::string& path) {
    if (!j.is_array()) field_error(path, "expected an array");
    std::vector<double> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_double(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

std::vector<int> get_int_list(const json& j, const std::string& path) {
    if (!j.is_array()) field_error(path, "expected an array");
    std::vector<int> out;
    for (std::size_t i = 0; i < j.size(); ++i) out.push_back(get_int(j[i], path + "[" + std::to_string(i) + "]"));
    return out;
}

void check_keys(const json& j, const std::string& path, std::initializer_list<const char*> allowed) {
    if (!j.is_object()) field_error(path.empty() ? "<root>" : path, "expected a table");
    for (auto it = j.begin(); it != j.end(); ++it) {
        bool ok = false;
        for (const char* a : allowed) ok = ok || it.key() == a;
        if (!ok) field_error(path.empty() ? it.key() : path + "." + it.key(), "unknown field");
    }
}

BasisPlan parse_plan(const json& j, int nroots) {
    check_keys(j, "plan", {"loops", "gaps", "a_cycles", "gap_weight"});
    BasisPlan p;
    if (!j.contains("loops") || !j.contains("gaps") || !j.contains("a_cycles"))
        field_error("plan", "needs loops, gaps and a_cycles");
    for (std::size_t i = 0; i < j["loops"].size(); ++i) {
        const std::string path = "plan.loops[" + std::to_string(i) + "]";
        const json& L = j["loops"][i];
        check_keys(L, path, {"roots", "kind"});
        LoopSpec spec;
        if (!L.contains("roots")) field_error(path, "missing roots");
        spec.roots = get_int_list(L["roots"], path + ".roots");
        for (int r : spec.roots)
            if (r < 0 || r >= nroots) field_error(path + ".roots", "root index out of range");
        const std::string kind = L.value("kind", "automatic");
        if (kind == "automatic") spec.kind = LoopKind::automatic;
        else if (kind == "vanishing") spec.kind = LoopKind::vanishing;
        else if (kind == "spectator") spec.kind = LoopKind::spectator;
        else field_error(path + ".kind", "expected automatic, vanishing or spectator");
        p.loops.push_back(spec);
    }
    for (std::size_t i = 0; i < j["gaps"].size(); ++i) {
        const std::string path = "plan.gaps[" + std::to_string(i) + "]";
        const json& G = j["gaps"][i];
        check_keys(G, path, {"from", "to"});
        if (!G.contains("from") || !G.contains("to")) field_error(path, "needs from and to");
        GapSpec g{get_int(G["from"], path + ".from"), get_int(G["to"], path + ".to")};
        if (g.from < 0 || g.from >= nroots || g.to < 0 || g.to >= nroots) field_error(path, "root index out of range");
        p.gaps.push_back(g);
    }
    for (std::size_t i = 0; i < j["a_cycles"].size(); ++i) {
        const std::string path = "plan.a_cycles[" + std::to_string(i) + "]";
        p.a_cycles.push_back(get_int_list(j["a_cycles"][i], path));
        if (p.a_cycles.back().size() != p.loops.size()) field_error(path, "needs one coefficient per loop");
    }
    if (j.contains("gap_weight")) {
        p.gap_weight = get_double(j["gap_weight"], "plan.gap_weight");
        if (p.gap_weight != 1.0 && p.gap_weight != 0.5) field_error("plan.gap_weight", "expected 1 or 0.5");
    }
    return p;
}

} // namespace

json parse_toml(const std::string& text) { return TomlReader(text).parse(); }

RunConfig parse_run_config(const json& j) {
    check_keys(j, "", {"schema_version", "name", "kind", "lead", "pairs", "fixed_roots", "coefficients", "plan",
                       "quad", "point", "ladder", "monodromy", "radial", "potential"});
    RunConfig rc;
    rc.echo = j;
    Family& f = rc.family;
    if (j.contains("schema_version") && get_int(j["schema_version"], "schema_version") != 1)
        field_error("schema_version", "unsupported version");
    f.name = j.value("name", "unnamed");
    if (!j.contains("kind")) field_error("kind", "missing");
    if (!j["kind"].is_string()) field_error("kind", "expected a string");
    try {
        f.kind = family_kind_from_string(j["kind"].get<std::string>());
    } catch (const Error&) {
        field_error("kind", "expected pair-collision, multi-collision, radial or raw");
    }
    if (j.contains("lead")) f.lead = get_complex(j["lead"], "lead");
    if (f.lead == cplx{}) field_error("lead", "must be nonzero");
    if (j.contains("pairs")) {
        if (!j["pairs"].is_array()) field_error("pairs", "expected an array of tables");
        for (std::size_t i = 0; i < j["pairs"].size(); ++i) {
            const std::string path = "pairs[" + std::to_string(i) + "]";
            const json& P = j["pairs"][i];
            check_keys(P, path, {"center", "direction"});
            if (!P.contains("center")) field_error(path, "missing center");
            CollisionPair cp{get_complex(P["center"], path + ".center"), 1.0};
            if (P.contains("direction")) cp.direction = get_complex(P["direction"], path + ".direction");
            f.pairs.push_back(cp);
        }
    }
    if (j.contains("fixed_roots")) f.fixed_roots = get_complex_list(j["fixed_roots"], "fixed_roots");
    if (j.contains("coefficients")) {
        if (!f.fixed_roots.empty()) field_error("coefficients", "give either fixed_roots or coefficients");
        const ComplexPoly q(get_complex_list(j["coefficients"], "coefficients"));
        if (q.degree() < 2 || q.degree() % 2) field_error("coefficients", "Q must have even degree >= 2");
        f.lead *= q.leading();
        f.fixed_roots = find_roots(q).flat();
    }
    const bool collision = f.kind == FamilyKind::pair_collision || f.kind == FamilyKind::multi_collision;
    if (collision && f.pairs.empty()) field_error("pairs", "collision families need at least one pair");
    if (f.kind == FamilyKind::pair_collision && f.pairs.size() != 1)
        field_error("pairs", "pair-collision families have exactly one pair");
    const int nroots = int(2 * f.pairs.size() + f.fixed_roots.size());
    if (nroots % 2) field_error("fixed_roots", "Q must have even degree");
    if (nroots < 4) field_error("fixed_roots", "Q must have degree >= 4");

    if (j.contains("plan")) {
        f.plan = parse_plan(j["plan"], nroots);
    } else if (f.pairs.empty()) {
        f.plan = chain_plan(HyperellipticCurve::from_roots(f.fixed_roots, f.lead));
    } else {
        field_error("plan", "collision families need an explicit plan");
    }
    if (j.contains("quad")) {
        check_keys(j["quad"], "quad", {"rel_tol", "abs_tol", "max_depth"});
        const json& q = j["quad"];
        if (q.contains("rel_tol")) f.quad.rel_tol = get_double(q["rel_tol"], "quad.rel_tol");
        if (q.contains("abs_tol")) f.quad.abs_tol = get_double(q["abs_tol"], "quad.abs_tol");
        if (q.contains("max_depth")) f.quad.max_depth = get_int(q["max_depth"], "quad.max_depth");
        if (f.quad.rel_tol < 1e-13) field_error("quad.rel_tol", "must be >= 1e-13");
        if (f.quad.max_depth > 40 || f.quad.max_depth < 1) field_error("quad.max_depth", "must be in 1..40");
    }

    cplx eps_point = 0.1;
    cplx l_point = 1.0;
    if (j.contains("point")) {
        check_keys(j["point"], "point", {"eps", "l"});
        if (j["point"].contains("eps")) eps_point = get_complex(j["point"]["eps"], "point.eps");
        if (j["point"].contains("l")) l_point = get_complex(j["point"]["l"], "point.l");
    }
    rc.point = f.at(eps_point);
    rc.point.l = l_point;

    if (j.contains("ladder")) {
        const json& L = j["ladder"];
        check_keys(L, "ladder", {"from", "to", "ratio", "single_pair"});
        LadderSpec s;
        if (L.contains("from")) s.from = get_double(L["from"], "ladder.from");
        if (L.contains("to")) s.to = get_double(L["to"], "ladder.to");
        if (L.contains("ratio")) s.ratio = get_double(L["ratio"], "ladder.ratio");
        if (L.contains("single_pair")) {
            if (!L["single_pair"].is_boolean()) field_error("ladder.single_pair", "expected a boolean");
            s.single_pair = L["single_pair"].get<bool>();
        }
        if (!(s.from > s.to && s.to > 0.0)) field_error("ladder", "need from > to > 0");
        if (s.to < 1e-6) field_error("ladder.to", "near-stratum floor is 1e-6");
        if (!(s.ratio > 1.0)) field_error("ladder.ratio", "must exceed 1");
        if (!collision) field_error("ladder", "ladders need a collision family");
        rc.ladder = s;
    }
    if (j.contains("monodromy")) {
        const json& M = j["monodromy"];
        check_keys(M, "monodromy", {"eps0", "steps", "turns"});
        MonodromySpec s;
        if (M.contains("eps0")) s.eps0 = get_complex(M["eps0"], "monodromy.eps0");
        if (M.contains("steps")) s.steps = get_int(M["steps"], "monodromy.steps");
        if (M.contains("turns")) s.turns = get_int_list(M["turns"], "monodromy.turns");
        if (s.steps < 1) field_error("monodromy.steps", "must be positive");
        if (!collision) field_error("monodromy", "monodromy loops need a collision family");
        rc.monodromy = s;
    }
    if (j.contains("radial")) {
        const json& R = j["radial"];
        check_keys(R, "radial", {"eps", "moduli", "args"});
        RadialSpec s;
        if (R.contains("eps")) s.eps = get_complex(R["eps"], "radial.eps");
        if (R.contains("moduli")) s.moduli = get_double_list(R["moduli"], "radial.moduli");
        if (R.contains("args")) s.args = get_double_list(R["args"], "radial.args");
        if (s.moduli.size() < 2) field_error("radial.moduli", "need at least two moduli");
        for (double m : s.moduli)
            if (!(m > 0.0)) field_error("radial.moduli", "moduli must be positive");
        if (s.args.empty()) field_error("radial.args", "need at least one argument");
        rc.radial = s;
    }
    if (f.kind == FamilyKind::radial && !rc.radial) field_error("radial", "radial families require an l grid");
    if (j.contains("potential")) {
        check_keys(j["potential"], "potential", {"fd_eps"});
        if (j["potential"].contains("fd_eps")) rc.fd_eps = get_double(j["potential"]["fd_eps"], "potential.fd_eps");
    }
    return rc;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw Error(ErrorKind::ConfigError, "cannot open config '" + path + "'");
    std::stringstream ss;
    ss << in.rdbuf();
    const std::string text = ss.str();
    const bool is_json = path.size() >= 5 && path.substr(path.size() - 5) == ".json";
    json j;
    if (is_json) {
        try {
            j = json::parse(text);
        } catch (const json::parse_error& e) {
            throw Error(ErrorKind::ConfigError, std::string("JSON: ") + e.what());
        }
    } else {
        j = parse_toml(text);
    }
    return parse_run_config(j);
}

} // namespace sklab
