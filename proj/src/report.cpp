#include "sklab/report.hpp"

#include <cstdio>
#include <fstream>

#include "sklab/error.hpp"

namespace sklab {

using nlohmann::json;

std::string fmt17(double x) {
    char buf[40];
    if (x == 0.0) x = 0.0;
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

void CsvTable::add_row(std::vector<std::string> cells) {
    if (cells.size() != header_.size()) throw std::logic_error("csv row width mismatch");
    rows_.push_back(std::move(cells));
}

void CsvTable::add_row(const std::vector<double>& cells) {
    std::vector<std::string> s;
    s.reserve(cells.size());
    for (double x : cells) s.push_back(fmt17(x));
    add_row(std::move(s));
}

std::string CsvTable::str() const {
    std::string out;
    auto line = [&](const std::vector<std::string>& cells) {
        for (std::size_t i = 0; i < cells.size(); ++i) {
            if (i) out += ',';
            out += cells[i];
        }
        out += '\n';
    };
    line(header_);
    for (const auto& r : rows_) line(r);
    return out;
}

void CsvTable::write(const std::string& path) const { write_text(path, str()); }

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path);
    out << text;
}

json to_json(cplx c) { return json::array({c.real(), c.imag()}); }

json to_json(const Eigen::VectorXcd& v) {
    json a = json::array();
    for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(to_json(v(i)));
    return a;
}

json to_json(const Eigen::MatrixXcd& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(to_json(m(i, j)));
        a.push_back(r);
    }
    return a;
}

json to_json(const Eigen::MatrixXd& m) {
    json a = json::array();
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        json r = json::array();
        for (Eigen::Index j = 0; j < m.cols(); ++j) r.push_back(m(i, j));
        a.push_back(r);
    }
    return a;
}

json to_json(const FitResult& f) {
    return {{"slope", f.slope},         {"intercept", f.intercept},
            {"r_squared", f.r_squared}, {"t_stat", f.t_stat},
            {"class", f.divergent ? "divergent" : "continuous"}, {"rows", f.rows}};
}

json to_json(const std::vector<Verdict>& v) {
    json a = json::array();
    for (const auto& x : v)
        a.push_back({{"name", x.name}, {"passed", x.passed}, {"asserted", x.asserted}, {"detail", x.detail}});
    return a;
}

bool all_passed(const std::vector<Verdict>& v) {
    for (const auto& x : v)
        if (x.asserted && !x.passed) return false;
    return true;
}

CsvTable ladder_table(const DegenerationReport& r) {
    const std::size_t npairs = r.rows.empty() ? 1 : r.rows.front().z_van.size();
    const int g = r.vanishing.empty() ? 0 : int(r.vanishing.size());
    std::vector<std::string> h{"eps_abs"};
    if (npairs == 1) h.push_back("z_van_abs");
    else
        for (std::size_t k = 0; k < npairs; ++k) h.push_back("z_van_abs_" + std::to_string(k + 1));
    for (int i = 0; i < g; ++i)
        for (int j = i; j < g; ++j) h.push_back("imtau_" + std::to_string(i + 1) + std::to_string(j + 1));
    h.push_back("err_est");
    CsvTable t(h);
    for (const auto& row : r.rows) {
        if (!row.error.empty()) continue;
        std::vector<double> cells{row.eps_abs};
        for (std::size_t k = 0; k < npairs; ++k) cells.push_back(std::abs(row.z_van[k]));
        for (int i = 0; i < g; ++i)
            for (int j = i; j < g; ++j) cells.push_back(row.metric.gram(i, j));
        cells.push_back(row.periods.err_est);
        t.add_row(cells);
    }
    return t;
}

CsvTable fit_table(const DegenerationReport& r) {
    CsvTable t({"entry", "regressor", "slope", "intercept", "r_squared", "t_stat", "class"});
    auto add = [&](const std::vector<EntryFit>& fits, const char* regressor) {
        for (const auto& e : fits)
            t.add_row({"imtau_" + std::to_string(e.i + 1) + std::to_string(e.j + 1), regressor, fmt17(e.fit.slope),
                       fmt17(e.fit.intercept), fmt17(e.fit.r_squared), fmt17(e.fit.t_stat),
                       e.fit.divergent ? "divergent" : "continuous"});
    };
    add(r.fits, "neg_log_z_van");
    add(r.eps_fits, "neg_log_eps");
    return t;
}

Verdict riemann_verdict(const std::vector<LadderRow>& rows, const std::string& label) {
    double sym = 0.0, res = 0.0, eig = 1e300;
    std::size_t n = 0;
    for (const auto& row : rows) {
        if (!row.error.empty()) continue;
        ++n;
        sym = std::max(sym, row.metric.symmetry_defect);
        res = std::max(res, row.periods.normalization_residual);
        eig = std::min(eig, row.metric.min_eig);
    }
    Verdict v;
    v.name = label + ": riemann relations";
    v.passed = n > 0 && sym <= 1e-6 && res <= 1e-8 && eig > 0.0;
    v.detail = "rows=" + std::to_string(n) + " max_symmetry_defect=" + fmt17(sym) +
               " max_dual_residual=" + fmt17(res) + " min_eig_imtau=" + fmt17(n ? eig : 0.0);
    return v;
}

json report_header(const std::string& command, const json& echo) {
    return {{"schema_version", kSchemaVersion}, {"version", kVersion}, {"command", command}, {"config", echo}};
}

} // namespace sklab
